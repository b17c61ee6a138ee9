// Tests for the modification catalog (costs, gains, conflicts, counting,
// apply) and the branch-and-bound optimizers, including brute-force oracle
// comparisons on random instances.

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

using plopt::Catalog;
using plopt::Modification;
using plopt::Rat;
using testsupport::load_fixtures;

namespace {

// n modifications "m1".."mn", unit gains/costs unless remapped by the caller.
Catalog plain_catalog(int n) {
    Catalog catalog;
    for (int i = 1; i <= n; ++i) {
        Modification mod;
        mod.id = "m" + std::to_string(i);
        mod.label = mod.id;
        mod.shared_cost = Rat(1);
        mod.gains.per_product["p1"] = Rat(1);
        catalog.modifications.push_back(std::move(mod));
    }
    return catalog;
}

plopt::ResolvedAssessment trivial_resolved() {
    auto model = testsupport::single_char_model({Rat(1)});
    auto matrix = testsupport::matrix_of({"p1"}, {{"1.1", {Rat(1, 2)}}});
    return plopt::resolve_irrelevance(model, matrix, plopt::IrrelevancePolicy::perfect);
}

}  // namespace

// -------------------------------------------------------------- catalog --

TEST(Catalog, FixtureCostsAndGains) {
    auto f = load_fixtures();
    const Modification& m8 = f.catalog.modifications[f.catalog.index_of("m8")];
    EXPECT_EQ(m8.shared_cost, Rat(15));
    EXPECT_EQ(plopt::total_cost(m8), Rat(25));
    EXPECT_EQ(plopt::subset_gain(f.catalog, {"m8"}, f.resolved), Rat(15));
    EXPECT_EQ(plopt::subset_cost(f.catalog, {"m3", "m5", "m6", "m8", "m10"}), Rat(233));
    EXPECT_EQ(plopt::subset_gain(f.catalog, {"m3", "m5", "m6", "m8", "m10"}, f.resolved),
              Rat(205, 2));
    EXPECT_THROW(plopt::subset_cost(f.catalog, {"m99"}), plopt::DataError);
}

TEST(Catalog, FixtureFeasibility) {
    auto f = load_fixtures();
    EXPECT_TRUE(plopt::is_feasible(f.catalog, {"m3", "m5"}));
    EXPECT_TRUE(plopt::is_feasible(f.catalog, {"m3", "m5", "m6", "m8", "m10"}));
    EXPECT_FALSE(plopt::is_feasible(f.catalog, {"m7", "m8"}));
    EXPECT_FALSE(plopt::is_feasible(f.catalog, {"m1", "m3"}));
    EXPECT_FALSE(plopt::is_feasible(f.catalog, {"m2", "m9", "m10"}));
    EXPECT_TRUE(plopt::is_feasible(f.catalog, {}));
}

TEST(Catalog, FixtureFeasibleCount) {
    auto f = load_fixtures();
    EXPECT_EQ(plopt::count_feasible(f.catalog), 359u);
}

TEST(Catalog, CountOnPathShapedConflicts) {
    // ten modifications, conflicts forming a path m1-m2-m3 plus two
    // disjoint pairs: 5 * 3 * 3 * 2^3 - 1 = 359 as well
    auto catalog = plain_catalog(10);
    catalog.conflicts = {{"m1", "m2"}, {"m2", "m3"}, {"m7", "m8"}, {"m9", "m10"}};
    EXPECT_EQ(plopt::count_feasible(catalog), 359u);
}

TEST(Catalog, CountClosedForms) {
    EXPECT_EQ(plopt::count_feasible(plain_catalog(12)), (1u << 12) - 1);
    EXPECT_EQ(plopt::count_feasible(plain_catalog(25)), (std::uint64_t{1} << 25) - 1);

    auto triangle = plain_catalog(3);
    triangle.conflicts = {{"m1", "m2"}, {"m2", "m3"}, {"m1", "m3"}};
    EXPECT_EQ(plopt::count_feasible(triangle), 3u);

    Catalog empty;
    EXPECT_EQ(plopt::count_feasible(empty), 0u);

    auto too_big = plain_catalog(31);
    EXPECT_THROW(plopt::count_feasible(too_big), plopt::DataError);
}

TEST(Catalog, CountMatchesBruteForce) {
    std::mt19937 rng(41);
    std::uniform_int_distribution<int> size(1, 15), pct(0, 99);
    for (int iter = 0; iter < 50; ++iter) {
        int n = size(rng);
        auto catalog = plain_catalog(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (pct(rng) < 25)
                    catalog.conflicts.emplace_back(catalog.modifications[i].id,
                                                   catalog.modifications[j].id);
        auto adjacency = catalog.conflict_masks();
        std::uint64_t expected = 0;
        for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
            bool ok = true;
            for (int i = 0; i < n && ok; ++i)
                if ((mask >> i & 1) && (adjacency[i] & mask)) ok = false;
            if (ok) ++expected;
        }
        EXPECT_EQ(plopt::count_feasible(catalog), expected);
    }
}

TEST(Catalog, FeasibilityIsDownwardClosed) {
    std::mt19937 rng(43);
    auto model = testsupport::random_model(rng);
    auto matrix = testsupport::random_matrix(rng, model, 3, false);
    auto resolved = plopt::resolve_irrelevance(model, matrix, plopt::IrrelevancePolicy::perfect);
    for (int iter = 0; iter < 20; ++iter) {
        auto catalog = testsupport::random_catalog(rng, model, resolved.products, 8, false);
        const std::size_t n = catalog.modifications.size();
        auto adjacency = catalog.conflict_masks();
        for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
            std::vector<std::string> sub;
            for (std::size_t i = 0; i < n; ++i)
                if (mask >> i & 1) sub.push_back(catalog.modifications[i].id);
            if (!plopt::is_feasible(catalog, sub)) continue;
            for (std::size_t drop = 0; drop < sub.size(); ++drop) {
                std::vector<std::string> smaller = sub;
                smaller.erase(smaller.begin() + static_cast<long>(drop));
                EXPECT_TRUE(plopt::is_feasible(catalog, smaller));
            }
        }
    }
}

TEST(Catalog, ApplyClampsAfterSummation) {
    // v = 0.8, deltas +0.3 and +0.2: each alone and both together cap at 1
    auto model = testsupport::single_char_model({Rat(1)});
    auto matrix = testsupport::matrix_of({"p1"}, {{"1.1", {Rat(4, 5)}}});
    auto resolved = plopt::resolve_irrelevance(model, matrix, plopt::IrrelevancePolicy::perfect);

    Catalog catalog;
    for (const char* id : {"mA", "mB"}) {
        Modification mod;
        mod.id = id;
        mod.shared_cost = Rat(1);
        mod.gains.mode = plopt::GainSpec::Mode::per_feature;
        mod.gains.per_feature["1.1"]["p1"] = id[1] == 'A' ? Rat(3, 10) : Rat(1, 5);
        catalog.modifications.push_back(std::move(mod));
    }

    EXPECT_EQ(plopt::apply(catalog, {"mA"}, resolved).values.at("1.1")[0], Rat(1));
    EXPECT_EQ(plopt::apply(catalog, {"mA", "mB"}, resolved).values.at("1.1")[0], Rat(1));
    EXPECT_EQ(plopt::subset_gain(catalog, {"mA"}, resolved), Rat(20));
    EXPECT_EQ(plopt::subset_gain(catalog, {"mB"}, resolved), Rat(20));
    EXPECT_EQ(plopt::subset_gain(catalog, {"mA", "mB"}, resolved), Rat(20));
}

TEST(Catalog, ApplyIsOrderIndependent) {
    std::mt19937 rng(47);
    auto model = testsupport::random_model(rng);
    auto matrix = testsupport::random_matrix(rng, model, 3, false);
    auto resolved = plopt::resolve_irrelevance(model, matrix, plopt::IrrelevancePolicy::perfect);
    for (int iter = 0; iter < 20; ++iter) {
        auto catalog = testsupport::random_catalog(rng, model, resolved.products, 4, true);
        catalog.conflicts.clear();
        std::vector<std::string> fwd, rev;
        for (const auto& mod : catalog.modifications) fwd.push_back(mod.id);
        rev.assign(fwd.rbegin(), fwd.rend());
        EXPECT_EQ(plopt::apply(catalog, fwd, resolved).values,
                  plopt::apply(catalog, rev, resolved).values);
        EXPECT_EQ(plopt::subset_gain(catalog, fwd, resolved),
                  plopt::subset_gain(catalog, rev, resolved));
    }
}

TEST(Catalog, ApplyRejectsConflictingSubsets) {
    auto f = load_fixtures();
    try {
        plopt::apply(f.catalog, {"m7", "m8"}, f.resolved);
        FAIL() << "expected DataError";
    } catch (const plopt::DataError& e) {
        EXPECT_EQ(std::string(e.what()), "conflicting modifications m7,m8");
    }
    EXPECT_THROW(plopt::subset_gain(f.catalog, {"m9", "m10"}, f.resolved), plopt::DataError);
}

TEST(Catalog, ValidateStructure) {
    auto f = load_fixtures();
    EXPECT_TRUE(plopt::validate_catalog(f.catalog).items.empty());
    EXPECT_TRUE(plopt::validate_catalog_refs(f.catalog, f.model, f.resolved).items.empty());

    auto dup = plain_catalog(2);
    dup.modifications[1].id = "m1";
    EXPECT_FALSE(plopt::validate_catalog(dup).ok());

    auto negative = plain_catalog(1);
    negative.modifications[0].per_product_costs["p1"] = Rat(-1);
    EXPECT_FALSE(plopt::validate_catalog(negative).ok());

    auto free_mod = plain_catalog(1);
    free_mod.modifications[0].shared_cost = Rat(0);
    EXPECT_FALSE(plopt::validate_catalog(free_mod).ok());  // ratio would divide by 0

    auto self_conflict = plain_catalog(2);
    self_conflict.conflicts = {{"m1", "m1"}};
    EXPECT_FALSE(plopt::validate_catalog(self_conflict).ok());

    auto unknown = plain_catalog(2);
    unknown.conflicts = {{"m1", "m9"}};
    EXPECT_FALSE(plopt::validate_catalog(unknown).ok());
}

TEST(Catalog, ValidateReferences) {
    auto f = load_fixtures();

    auto bad_product = f.catalog;
    bad_product.modifications[0].gains.per_product["pZ"] = Rat(1);
    EXPECT_FALSE(plopt::validate_catalog_refs(bad_product, f.model, f.resolved).ok());

    auto bad_cost = f.catalog;
    bad_cost.modifications[0].per_product_costs["pZ"] = Rat(1);
    EXPECT_FALSE(plopt::validate_catalog_refs(bad_cost, f.model, f.resolved).ok());

    auto bad_feature = f.catalog;
    bad_feature.modifications[0].gains.mode = plopt::GainSpec::Mode::per_feature;
    bad_feature.modifications[0].gains.per_feature["9.9"]["pA"] = Rat(1, 10);
    EXPECT_FALSE(plopt::validate_catalog_refs(bad_feature, f.model, f.resolved).ok());

    // fixture gains already push past the ceiling: warning, not error
    auto big = f.catalog;
    big.modifications[0].gains.per_product["pA"] = Rat(400);
    auto report = plopt::validate_catalog_refs(big, f.model, f.resolved);
    EXPECT_TRUE(report.ok());
    ASSERT_EQ(report.items.size(), 1u);
    EXPECT_EQ(report.items[0].severity, plopt::Violation::Severity::warning);
}

// ------------------------------------------------------------ optimizer --

TEST(Optimizer, FixtureBudgetPlan) {
    auto f = load_fixtures();
    plopt::Plan plan = plopt::optimize_budget(f.catalog, f.resolved, Rat(250));
    EXPECT_EQ(plan.subset, (std::vector<std::string>{"m3", "m5", "m6", "m8", "m10"}));
    EXPECT_EQ(plan.total_cost, Rat(233));
    EXPECT_EQ(plan.total_gain, Rat(205, 2));
    EXPECT_EQ(plan.adherence_after, Rat(3649, 10));
    EXPECT_TRUE(testsupport::plan_consistent(f.catalog, f.resolved, plan));
}

TEST(Optimizer, BudgetEdgeCases) {
    auto f = load_fixtures();

    plopt::Plan broke = plopt::optimize_budget(f.catalog, f.resolved, Rat(0));
    EXPECT_TRUE(broke.subset.empty());
    EXPECT_EQ(broke.total_gain, Rat(0));
    EXPECT_EQ(broke.adherence_after, Rat(1312, 5));

    EXPECT_EQ(plopt::optimize_budget(f.catalog, f.resolved, Rat(10, 3)).subset.size(), 0u);
    EXPECT_EQ(plopt::optimize_budget(f.catalog, f.resolved, Rat(25)).subset,
              (std::vector<std::string>{"m8"}));
    EXPECT_EQ(plopt::optimize_budget(f.catalog, f.resolved, Rat(109)).subset,
              (std::vector<std::string>{"m2", "m6", "m8", "m10"}));

    // budget >= every cost: gain equals the global enumeration maximum
    plopt::Plan rich = plopt::optimize_budget(f.catalog, f.resolved, Rat(443));
    EXPECT_EQ(rich.subset, (std::vector<std::string>{"m3", "m4", "m5", "m6", "m8", "m10"}));
    EXPECT_EQ(rich.total_gain, Rat(227, 2));
    auto all = plopt::enumerate_feasible(f.catalog, f.resolved);
    EXPECT_EQ(rich.total_gain, all.front().total_gain);
}

TEST(Optimizer, BudgetGainIsMonotoneInBudget) {
    auto f = load_fixtures();
    Rat prev_gain(-1);
    for (int xi = 0; xi <= 450; xi += 15) {
        plopt::Plan plan = plopt::optimize_budget(f.catalog, f.resolved, Rat(xi));
        EXPECT_GE(plan.total_gain, prev_gain) << "xi=" << xi;
        EXPECT_LE(plan.total_cost, Rat(xi));
        prev_gain = plan.total_gain;
    }
}

TEST(Optimizer, FixtureRatioPlan) {
    auto f = load_fixtures();
    plopt::Plan plan = plopt::optimize_ratio(f.catalog, f.resolved, 1.6);
    EXPECT_EQ(plan.subset, (std::vector<std::string>{"m2", "m6", "m8", "m10"}));
    EXPECT_EQ(plan.total_cost, Rat(109));
    EXPECT_EQ(plan.total_gain, Rat(693, 10));
    EXPECT_EQ(plan.adherence_after, Rat(3317, 10));
    EXPECT_NEAR(plan.objective_value, 8.086240937810773, 1e-9);
    EXPECT_TRUE(testsupport::plan_consistent(f.catalog, f.resolved, plan));
}

TEST(Optimizer, FixtureRatioAdherenceReading) {
    // reading Q as post-change adherence instead of the gain favours the
    // cheapest modification once gamma compresses the quality spread
    auto f = load_fixtures();
    plopt::Plan plan =
        plopt::optimize_ratio(f.catalog, f.resolved, 1.6, plopt::RatioQuality::adherence);
    EXPECT_EQ(plan.subset, (std::vector<std::string>{"m6"}));
    EXPECT_EQ(plan.total_cost, Rat(24));
    EXPECT_NEAR(plan.objective_value, 332.04988146750185, 1e-9);
}

TEST(Optimizer, RatioEdgeCases) {
    auto resolved = trivial_resolved();

    Catalog empty;
    EXPECT_THROW(plopt::optimize_ratio(empty, resolved, 1.0), plopt::NoCandidatesError);

    // a single candidate with negative gain: excluded under the gain
    // reading (no subset left), still selectable under adherence
    Catalog lossy = plain_catalog(1);
    lossy.modifications[0].gains.per_product["p1"] = Rat(-5);
    EXPECT_THROW(plopt::optimize_ratio(lossy, resolved, 1.0), plopt::NoCandidatesError);
    plopt::Plan plan =
        plopt::optimize_ratio(lossy, resolved, 1.0, plopt::RatioQuality::adherence);
    EXPECT_EQ(plan.subset, (std::vector<std::string>{"m1"}));
    EXPECT_EQ(plan.adherence_after, Rat(45));

    Catalog single = plain_catalog(1);
    plopt::Plan only = plopt::optimize_ratio(single, resolved, 2.0);
    EXPECT_EQ(only.subset, (std::vector<std::string>{"m1"}));
    EXPECT_DOUBLE_EQ(only.objective_value, 1.0);
}

TEST(Optimizer, GammaSweepPrefersQualityMonotonically) {
    // four candidates on a clean cost/quality ladder; as gamma grows the
    // chosen plan's quality never drops, and no higher gamma ever picks a
    // plan that is both cheaper and lower-quality than a lower gamma's pick
    auto resolved = trivial_resolved();
    Catalog catalog;
    const std::pair<int, int> spec[] = {{10, 4}, {20, 10}, {40, 24}, {80, 56}};
    int k = 0;
    for (auto [gain, cost] : spec) {
        Modification mod;
        mod.id = "m" + std::to_string(++k);
        mod.shared_cost = Rat(cost);
        mod.gains.per_product["p1"] = Rat(gain);
        catalog.modifications.push_back(std::move(mod));
    }
    // all mutually conflicting: exactly one gets picked
    for (int i = 1; i <= 4; ++i)
        for (int j = i + 1; j <= 4; ++j)
            catalog.conflicts.emplace_back("m" + std::to_string(i), "m" + std::to_string(j));

    Rat prev_gain(-1), prev_cost(-1);
    for (double gamma : {0.5, 1.0, 1.3, 1.6, 2.0, 2.5, 3.0}) {
        plopt::Plan plan = plopt::optimize_ratio(catalog, resolved, gamma);
        ASSERT_EQ(plan.subset.size(), 1u);
        EXPECT_GE(plan.total_gain, prev_gain) << "gamma=" << gamma;
        EXPECT_FALSE(plan.total_cost < prev_cost && plan.total_gain < prev_gain);
        prev_gain = plan.total_gain;
        prev_cost = plan.total_cost;
    }
    // the sweep actually moves: gamma 0.5 and 3.0 pick opposite ends
    EXPECT_EQ(plopt::optimize_ratio(catalog, resolved, 0.5).subset,
              (std::vector<std::string>{"m1"}));
    EXPECT_EQ(plopt::optimize_ratio(catalog, resolved, 3.0).subset,
              (std::vector<std::string>{"m4"}));
}

TEST(Optimizer, BoundSurvivesClampInteraction) {
    // mB's big f1 delta clamps to +25 standalone but is worth +125 raw;
    // combined with mA (whose -2 neutralizes the clamp headroom) the pair
    // beats the loud standalone candidate mD. A bound built from clamped
    // standalone gains would prune the {mA,mB} branch after seeing mD; the
    // optimistic (unclamped) bound must keep it alive.
    auto model = testsupport::single_char_model({Rat(1, 2), Rat(1, 2)});
    auto matrix = testsupport::matrix_of({"p1"}, {{"1.1", {Rat(1, 2)}}, {"1.2", {Rat(0)}}});
    auto resolved = plopt::resolve_irrelevance(model, matrix, plopt::IrrelevancePolicy::perfect);

    Catalog catalog;
    Modification mA;
    mA.id = "mA";
    mA.shared_cost = Rat(1);
    mA.gains.mode = plopt::GainSpec::Mode::per_feature;
    mA.gains.per_feature["1.1"]["p1"] = Rat(-2);
    mA.gains.per_feature["1.2"]["p1"] = Rat(1);
    Modification mB;
    mB.id = "mB";
    mB.shared_cost = Rat(1);
    mB.gains.mode = plopt::GainSpec::Mode::per_feature;
    mB.gains.per_feature["1.1"]["p1"] = Rat(5, 2);
    Modification mD;
    mD.id = "mD";
    mD.shared_cost = Rat(1);
    mD.gains.per_product["p1"] = Rat(60);
    catalog.modifications = {mA, mB, mD};
    catalog.conflicts = {{"mA", "mD"}, {"mB", "mD"}};

    // standalone: mA +25, mB +25 (clamped), mD +60; the pair saturates
    // both cells for +75
    EXPECT_EQ(plopt::subset_gain(catalog, {"mA"}, resolved), Rat(25));
    EXPECT_EQ(plopt::subset_gain(catalog, {"mB"}, resolved), Rat(25));
    EXPECT_EQ(plopt::subset_gain(catalog, {"mA", "mB"}, resolved), Rat(75));

    plopt::Plan plan = plopt::optimize_budget(catalog, resolved, Rat(10));
    EXPECT_EQ(plan.subset, (std::vector<std::string>{"mA", "mB"}));
    EXPECT_EQ(plan.total_gain, Rat(75));
}

TEST(Optimizer, MatchesBruteForceOnRandomInstances) {
    std::mt19937 rng(53);
    std::uniform_int_distribution<int> size(1, 12), xir(0, 120);
    for (int iter = 0; iter < 150; ++iter) {
        auto model = testsupport::random_model(rng);
        auto matrix = testsupport::random_matrix(rng, model, 3, false);
        auto resolved =
            plopt::resolve_irrelevance(model, matrix, plopt::IrrelevancePolicy::perfect);
        auto catalog =
            testsupport::random_catalog(rng, model, resolved.products, size(rng), true);

        Rat xi(xir(rng));
        plopt::Plan plan = plopt::optimize_budget(catalog, resolved, xi);
        auto brute = testsupport::brute_budget(catalog, resolved, xi);
        EXPECT_TRUE(testsupport::same_subset(catalog, brute, plan)) << "budget iter " << iter;
        EXPECT_EQ(plan.total_gain, brute.gain);
        EXPECT_EQ(plan.total_cost, brute.cost);
        EXPECT_TRUE(testsupport::plan_consistent(catalog, resolved, plan));

        double gamma = 0.5 + (iter % 5) * 0.5;
        auto ratio_brute =
            testsupport::brute_ratio(catalog, resolved, gamma, plopt::RatioQuality::gain);
        if (ratio_brute.found) {
            plopt::Plan ratio_plan = plopt::optimize_ratio(catalog, resolved, gamma);
            EXPECT_TRUE(testsupport::same_subset(catalog, ratio_brute, ratio_plan))
                << "ratio iter " << iter;
            EXPECT_EQ(ratio_plan.total_gain, ratio_brute.gain);
            EXPECT_TRUE(testsupport::plan_consistent(catalog, resolved, ratio_plan));
        } else {
            EXPECT_THROW(plopt::optimize_ratio(catalog, resolved, gamma),
                         plopt::NoCandidatesError);
        }
    }
}

TEST(Optimizer, RatioAdherenceReadingMatchesBruteForce) {
    std::mt19937 rng(59);
    std::uniform_int_distribution<int> size(1, 10);
    for (int iter = 0; iter < 60; ++iter) {
        auto model = testsupport::random_model(rng);
        auto matrix = testsupport::random_matrix(rng, model, 2, false);
        auto resolved =
            plopt::resolve_irrelevance(model, matrix, plopt::IrrelevancePolicy::perfect);
        auto catalog =
            testsupport::random_catalog(rng, model, resolved.products, size(rng), true);
        double gamma = 1.0 + (iter % 4) * 0.4;
        auto brute = testsupport::brute_ratio(catalog, resolved, gamma,
                                              plopt::RatioQuality::adherence);
        ASSERT_TRUE(brute.found);  // baseline adherence is never negative
        plopt::Plan plan = plopt::optimize_ratio(catalog, resolved, gamma,
                                                 plopt::RatioQuality::adherence);
        EXPECT_TRUE(testsupport::same_subset(catalog, brute, plan)) << "iter " << iter;
    }
}

TEST(Optimizer, ResultsAreThreadCountIndependent) {
    auto f = load_fixtures();
    plopt::Plan serial = plopt::optimize_budget(f.catalog, f.resolved, Rat(250), 1);
    plopt::Plan wide = plopt::optimize_budget(f.catalog, f.resolved, Rat(250), 4);
    EXPECT_EQ(plopt::plan_to_json(serial).dump(), plopt::plan_to_json(wide).dump());

    plopt::Plan rserial = plopt::optimize_ratio(f.catalog, f.resolved, 1.6,
                                                plopt::RatioQuality::gain, 1);
    plopt::Plan rwide = plopt::optimize_ratio(f.catalog, f.resolved, 1.6,
                                              plopt::RatioQuality::gain, 4);
    EXPECT_EQ(plopt::plan_to_json(rserial).dump(), plopt::plan_to_json(rwide).dump());

    std::mt19937 rng(61);
    for (int iter = 0; iter < 10; ++iter) {
        auto model = testsupport::random_model(rng);
        auto matrix = testsupport::random_matrix(rng, model, 3, false);
        auto resolved =
            plopt::resolve_irrelevance(model, matrix, plopt::IrrelevancePolicy::perfect);
        auto catalog = testsupport::random_catalog(rng, model, resolved.products, 11, true);
        plopt::Plan one = plopt::optimize_budget(catalog, resolved, Rat(80), 1);
        plopt::Plan four = plopt::optimize_budget(catalog, resolved, Rat(80), 4);
        EXPECT_EQ(plopt::plan_to_json(one).dump(), plopt::plan_to_json(four).dump());
    }
}

// ---------------------------------------------------------- enumeration --

TEST(Enumeration, FixtureLatticeIsComplete) {
    auto f = load_fixtures();
    auto plans = plopt::enumerate_feasible(f.catalog, f.resolved);
    EXPECT_EQ(plans.size(), 359u);

    // sorted by gain descending (cost ascending within ties)
    for (std::size_t i = 1; i < plans.size(); ++i) {
        EXPECT_GE(plans[i - 1].total_gain, plans[i].total_gain);
        if (plans[i - 1].total_gain == plans[i].total_gain) {
            EXPECT_LE(plans[i - 1].total_cost, plans[i].total_cost);
        }
    }
    EXPECT_EQ(plans.front().total_gain, Rat(227, 2));
    for (const auto& plan : plans)
        EXPECT_TRUE(testsupport::plan_consistent(f.catalog, f.resolved, plan));
}

TEST(Enumeration, SmallLattices) {
    auto resolved = trivial_resolved();

    auto pair = plain_catalog(2);
    EXPECT_EQ(plopt::enumerate_feasible(pair, resolved).size(), 3u);

    auto trio = plain_catalog(3);
    EXPECT_EQ(plopt::enumerate_feasible(trio, resolved).size(), 7u);

    auto conflicted = plain_catalog(2);
    conflicted.conflicts = {{"m1", "m2"}};
    EXPECT_EQ(plopt::enumerate_feasible(conflicted, resolved).size(), 2u);
}

TEST(Enumeration, RefusesOversizeCatalogs) {
    auto resolved = trivial_resolved();
    try {
        plopt::enumerate_feasible(plain_catalog(21), resolved);
        FAIL() << "expected DataError";
    } catch (const plopt::DataError& e) {
        EXPECT_NE(std::string(e.what()).find("enumeration limit (20)"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("branch-and-bound"), std::string::npos);
    }
    // a raised limit admits the same catalog
    EXPECT_THROW(plopt::enumerate_feasible(plain_catalog(5), resolved, 4), plopt::DataError);
    EXPECT_EQ(plopt::enumerate_feasible(plain_catalog(5), resolved, 5).size(), 31u);
}

TEST(Enumeration, ParetoRanksCountUpward) {
    auto f = load_fixtures();
    auto rows = plopt::pareto_export(f.catalog, f.resolved);
    ASSERT_EQ(rows.size(), 359u);
    EXPECT_EQ(rows.front().rank, 359u);  // best plan gets the row count
    EXPECT_EQ(rows.back().rank, 1u);

    // the published budget pick sits at rank 351
    for (const auto& row : rows)
        if (row.plan.subset == std::vector<std::string>{"m3", "m5", "m6", "m8", "m10"}) {
            EXPECT_EQ(row.rank, 351u);
        }
}

TEST(Enumeration, RowCountMatchesFeasibleCount) {
    std::mt19937 rng(67);
    std::uniform_int_distribution<int> size(1, 10);
    for (int iter = 0; iter < 30; ++iter) {
        auto model = testsupport::random_model(rng);
        auto matrix = testsupport::random_matrix(rng, model, 2, false);
        auto resolved =
            plopt::resolve_irrelevance(model, matrix, plopt::IrrelevancePolicy::perfect);
        auto catalog =
            testsupport::random_catalog(rng, model, resolved.products, size(rng), true);
        auto rows = plopt::pareto_export(catalog, resolved);
        EXPECT_EQ(rows.size(), plopt::count_feasible(catalog));
    }
}
