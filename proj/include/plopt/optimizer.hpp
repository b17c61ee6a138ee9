#pragma once

// Exact subset selection over the feasible (conflict-free) lattice.
//
// Budget mode    maximize total gain subject to total cost <= xi; empty
//             subset admitted. Gains and costs compare as exact rationals.
// Ratio mode     maximize quality^gamma / cost over non-empty subsets,
//             where quality is either the gain alone (default, matches the
//             published case study) or the post-plan adherence; see the
//             repo docs for why both readings exist. Objective values are
//             floats compared with a 1e-9 absolute tie tolerance.
//
// Both searches are branch-and-bound with the admissible bound
//   current quality + sum of optimistic gains of the remaining levels
// where a modification's optimistic gain takes its scalar part plus every
// positive per-feature delta unclamped (clamping can only shrink the joint
// effect, never grow it past that sum). Results are verified against
// brute-force enumeration in the test suite.
//
// Tie-breaks, in order: higher gain, lower cost, lexicographically smaller
// subset (by catalog position). Parallel workers share a monotonically
// improving incumbent hint; a final deterministic merge makes the result
// independent of thread scheduling.

#include "plopt/assessment.hpp"
#include "plopt/modification_catalog.hpp"
#include "plopt/rational.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace plopt {

enum class RatioQuality { gain, adherence };

struct Plan {
    std::vector<std::string> subset;  // ids in catalog order
    Rat total_cost = 0;
    Rat total_gain = 0;
    Rat adherence_after = 0;
    double objective_value = 0;
};

// Raised by optimize_ratio when the catalog offers nothing to select.
struct NoCandidatesError : DataError {
    using DataError::DataError;
};

namespace detail {

inline Rat clamp01(Rat v) {
    if (v < 0) return Rat(0);
    if (v > 1) return Rat(1);
    return v;
}

// Catalog compiled into flat arrays for the search inner loop.
struct SearchInstance {
    const Catalog* catalog = nullptr;
    std::size_t n = 0;
    Rat baseline;                              // adherence before any change
    std::vector<Rat> cost;                     // per modification
    std::vector<Rat> scalar_gain;              // per_product part, additive
    std::vector<std::uint32_t> conflict;       // neighbour masks
    // per_feature deltas as (cell, delta); cells index a flat value array
    std::vector<std::vector<std::pair<std::size_t, Rat>>> deltas;
    std::vector<Rat> base_value;               // flat v(f,p)
    std::vector<Rat> cell_weight;              // flat effective w(f,p)
    bool any_per_feature = false;

    explicit SearchInstance(const Catalog& cat, const ResolvedAssessment& resolved) {
        catalog = &cat;
        n = cat.modifications.size();
        if (n > 30) throw DataError("optimizer supports at most 30 modifications");
        baseline = adherence(resolved);
        conflict = cat.conflict_masks();

        const std::size_t m = resolved.products.size();
        std::map<std::string, std::size_t> feature_base;
        for (std::size_t f = 0; f < resolved.feature_ids.size(); ++f) {
            const auto& fid = resolved.feature_ids[f];
            feature_base[fid] = f * m;
            for (std::size_t p = 0; p < m; ++p) {
                base_value.push_back(resolved.values.at(fid)[p]);
                cell_weight.push_back(resolved.weights.at(fid)[p]);
            }
        }

        cost.resize(n);
        scalar_gain.assign(n, Rat(0));
        deltas.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Modification& mod = cat.modifications[i];
            cost[i] = total_cost(mod);
            if (mod.gains.mode == GainSpec::Mode::per_product) {
                for (const auto& [pid, g] : mod.gains.per_product) scalar_gain[i] += g;
            } else {
                any_per_feature = true;
                for (const auto& [fid, row] : mod.gains.per_feature) {
                    auto base = feature_base.find(fid);
                    if (base == feature_base.end())
                        throw DataError("gain references unknown feature '" + fid + "'");
                    for (const auto& [pid, delta] : row)
                        deltas[i].emplace_back(base->second + resolved.product_index(pid),
                                               delta);
                }
            }
        }
    }

    // Upper bound on what modification i can ever add to a subset's gain:
    // the scalar part plus every positive delta taken unclamped. Clamped
    // standalone gains would under-estimate recovery after another
    // modification floor-clamped the same cell, so they are not admissible.
    Rat optimistic_gain(std::size_t i) const {
        Rat g = scalar_gain[i];
        for (const auto& [cell, delta] : deltas[i])
            if (delta > 0) g += cell_weight[cell] * delta;
        return std::max(Rat(0), g);
    }
};

// Mutable search cursor: tracks the current subset's cost/gain with an
// undo stack, so the DFS costs O(touched cells) per step.
struct Cursor {
    const SearchInstance* inst;
    std::uint32_t mask = 0;
    Rat cost = 0;
    Rat gain = 0;                 // scalar + clamped matrix contribution
    std::vector<Rat> raw;         // accumulated per-cell deltas (pre-clamp)
    std::vector<std::size_t> members;

    explicit Cursor(const SearchInstance& instance)
        : inst(&instance), raw(instance.base_value.size(), Rat(0)) {}

    void include(std::size_t i) {
        mask |= std::uint32_t{1} << i;
        members.push_back(i);
        cost += inst->cost[i];
        gain += inst->scalar_gain[i];
        for (const auto& [cell, delta] : inst->deltas[i]) {
            const Rat& v0 = inst->base_value[cell];
            Rat before = clamp01(Rat(v0 + raw[cell]));
            raw[cell] += delta;
            Rat after = clamp01(Rat(v0 + raw[cell]));
            gain += inst->cell_weight[cell] * (after - before);
        }
    }

    void exclude(std::size_t i) {
        mask &= ~(std::uint32_t{1} << i);
        members.pop_back();
        cost -= inst->cost[i];
        gain -= inst->scalar_gain[i];
        for (const auto& [cell, delta] : inst->deltas[i]) {
            const Rat& v0 = inst->base_value[cell];
            Rat before = clamp01(Rat(v0 + raw[cell]));
            raw[cell] -= delta;
            Rat after = clamp01(Rat(v0 + raw[cell]));
            gain += inst->cell_weight[cell] * (after - before);
        }
    }

    bool conflicts(std::size_t i) const { return inst->conflict[i] & mask; }
};

// subset-as-sorted-index-list lexicographic order (catalog positions)
inline bool lex_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct Candidate {
    std::vector<std::size_t> members;  // sorted catalog indices
    Rat cost;
    Rat gain;
    double objective = 0;
};

// gain desc, cost asc, lex; shared by both modes below the primary key
inline bool tie_better(const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.cost != b.cost) return a.cost < b.cost;
    return lex_less(a.members, b.members);
}

inline bool budget_better(const Candidate& a, const Candidate& b) { return tie_better(a, b); }

constexpr double kRatioTolerance = 1e-9;

inline bool ratio_better(const Candidate& a, const Candidate& b) {
    if (a.objective > b.objective + kRatioTolerance) return true;
    if (b.objective > a.objective + kRatioTolerance) return false;
    return tie_better(a, b);
}

struct BudgetSearch {
    const SearchInstance& inst;
    Rat xi;
    std::vector<std::size_t> order;   // descending standalone gain
    std::vector<Rat> positive_rest;   // sum of positive standalone gains from depth d on
    std::atomic<std::int64_t>* shared_hint;  // floor(best gain * 1e6)

    BudgetSearch(const SearchInstance& instance, Rat budget,
                 std::atomic<std::int64_t>* hint)
        : inst(instance), xi(std::move(budget)), shared_hint(hint) {
        order.resize(inst.n);
        for (std::size_t i = 0; i < inst.n; ++i) order[i] = i;
        std::vector<Rat> optimistic(inst.n);
        for (std::size_t i = 0; i < inst.n; ++i) optimistic[i] = inst.optimistic_gain(i);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return optimistic[a] > optimistic[b];
                         });
        positive_rest.assign(inst.n + 1, Rat(0));
        for (std::size_t d = inst.n; d-- > 0;)
            positive_rest[d] = positive_rest[d + 1] + optimistic[order[d]];
    }

    void publish(const Rat& gain) const {
        if (!shared_hint) return;
        double scaled = std::floor(to_double(gain) * 1e6) - 1;
        if (scaled < static_cast<double>(std::numeric_limits<std::int64_t>::min()) ||
            scaled > static_cast<double>(std::numeric_limits<std::int64_t>::max()))
            return;
        auto value = static_cast<std::int64_t>(scaled);
        std::int64_t seen = shared_hint->load(std::memory_order_relaxed);
        while (seen < value &&
               !shared_hint->compare_exchange_weak(seen, value, std::memory_order_relaxed)) {
        }
    }

    // hint is a proven-achievable lower bound; prune strictly below it
    bool prunable(const Cursor& cursor, std::size_t depth,
                  const std::optional<Candidate>& best) const {
        Rat bound = cursor.gain + positive_rest[depth];
        if (best && bound < best->gain) return true;
        if (shared_hint) {
            std::int64_t hint = shared_hint->load(std::memory_order_relaxed);
            if (hint != std::numeric_limits<std::int64_t>::min() &&
                bound < Rat(hint) / 1000000)
                return true;
        }
        return false;
    }

    void consider(const Cursor& cursor, std::optional<Candidate>& best) const {
        Candidate cand{cursor.members, cursor.cost, cursor.gain, to_double(cursor.gain)};
        std::sort(cand.members.begin(), cand.members.end());
        if (!best || budget_better(cand, *best)) {
            publish(cand.gain);
            best = std::move(cand);
        }
    }

    void dfs(Cursor& cursor, std::size_t depth, std::optional<Candidate>& best) const {
        if (prunable(cursor, depth, best)) return;
        if (depth == inst.n) return;
        std::size_t i = order[depth];
        if (!cursor.conflicts(i) && cursor.cost + inst.cost[i] <= xi) {
            cursor.include(i);
            consider(cursor, best);
            dfs(cursor, depth + 1, best);
            cursor.exclude(i);
        }
        dfs(cursor, depth + 1, best);
    }
};

struct RatioSearch {
    const SearchInstance& inst;
    double gamma;
    RatioQuality quality;
    std::vector<std::size_t> order;
    std::vector<Rat> positive_rest;
    std::atomic<std::int64_t>* shared_hint;  // objective scaled by 1e9, floored

    RatioSearch(const SearchInstance& instance, double g, RatioQuality q,
                std::atomic<std::int64_t>* hint)
        : inst(instance), gamma(g), quality(q), shared_hint(hint) {
        order.resize(inst.n);
        for (std::size_t i = 0; i < inst.n; ++i) order[i] = i;
        std::vector<Rat> optimistic(inst.n);
        for (std::size_t i = 0; i < inst.n; ++i) optimistic[i] = inst.optimistic_gain(i);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return optimistic[a] > optimistic[b];
                         });
        positive_rest.assign(inst.n + 1, Rat(0));
        for (std::size_t d = inst.n; d-- > 0;)
            positive_rest[d] = positive_rest[d + 1] + optimistic[order[d]];
    }

    double objective_of(const Rat& gain, const Rat& cost) const {
        Rat q = quality == RatioQuality::gain ? gain : inst.baseline + gain;
        if (q < 0) return -std::numeric_limits<double>::infinity();  // excluded
        return std::pow(to_double(q), gamma) / to_double(cost);
    }

    void publish(double objective) const {
        if (!shared_hint || !std::isfinite(objective)) return;
        double scaled = std::floor(objective * 1e9) - 1;
        if (scaled < static_cast<double>(std::numeric_limits<std::int64_t>::min()) ||
            scaled > static_cast<double>(std::numeric_limits<std::int64_t>::max()))
            return;
        auto value = static_cast<std::int64_t>(scaled);
        std::int64_t seen = shared_hint->load(std::memory_order_relaxed);
        while (seen < value &&
               !shared_hint->compare_exchange_weak(seen, value, std::memory_order_relaxed)) {
        }
    }

    bool prunable(const Cursor& cursor, std::size_t depth,
                  const std::optional<Candidate>& best) const {
        Rat quality_upper = cursor.gain + positive_rest[depth];
        if (quality == RatioQuality::adherence) quality_upper += inst.baseline;
        if (quality_upper < 0) return true;  // every descendant is excluded
        if (cursor.cost == 0) return false;  // root: no denominator yet
        double bound =
            std::pow(to_double(quality_upper), gamma) / to_double(cursor.cost);
        if (best && bound < best->objective - kRatioTolerance) return true;
        if (shared_hint) {
            std::int64_t hint = shared_hint->load(std::memory_order_relaxed);
            if (hint != std::numeric_limits<std::int64_t>::min() &&
                bound < static_cast<double>(hint) / 1e9 - kRatioTolerance)
                return true;
        }
        return false;
    }

    void consider(const Cursor& cursor, std::optional<Candidate>& best) const {
        double objective = objective_of(cursor.gain, cursor.cost);
        if (objective == -std::numeric_limits<double>::infinity()) return;
        Candidate cand{cursor.members, cursor.cost, cursor.gain, objective};
        std::sort(cand.members.begin(), cand.members.end());
        if (!best || ratio_better(cand, *best)) {
            publish(cand.objective);
            best = std::move(cand);
        }
    }

    void dfs(Cursor& cursor, std::size_t depth, std::optional<Candidate>& best) const {
        if (prunable(cursor, depth, best)) return;
        if (depth == inst.n) return;
        std::size_t i = order[depth];
        if (!cursor.conflicts(i)) {
            cursor.include(i);
            consider(cursor, best);
            dfs(cursor, depth + 1, best);
            cursor.exclude(i);
        }
        dfs(cursor, depth + 1, best);
    }
};

inline unsigned resolve_thread_count(unsigned requested) {
    if (requested != 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs `search` over the 2^k prefix split of the first decision levels,
// fanning prefixes out across threads. Each worker owns a cursor; the
// shared hint only accelerates pruning. The final merge scans workers'
// bests in fixed prefix order, so scheduling cannot change the answer.
template <typename Search>
std::optional<Candidate> parallel_search(const SearchInstance& inst, const Search& search,
                                         unsigned threads,
                                         bool admit_prefix_over_budget, const Rat& xi) {
    const std::size_t n = inst.n;
    threads = resolve_thread_count(threads);
    std::size_t k = 0;
    while (k < n && (std::size_t{1} << k) < threads * 4 && k < 10) ++k;

    // prefix = include/exclude choices for order[0..k)
    const std::size_t prefix_count = std::size_t{1} << k;
    std::vector<std::optional<Candidate>> results(prefix_count);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        Cursor cursor(inst);
        for (std::size_t prefix = next.fetch_add(1); prefix < prefix_count;
             prefix = next.fetch_add(1)) {
            std::optional<Candidate>& best = results[prefix];
            bool viable = true;
            std::vector<std::size_t> included;
            for (std::size_t d = 0; d < k && viable; ++d) {
                if (!(prefix >> d & 1)) continue;
                std::size_t i = search.order[d];
                if (cursor.conflicts(i) ||
                    (!admit_prefix_over_budget && cursor.cost + inst.cost[i] > xi)) {
                    viable = false;
                    break;
                }
                cursor.include(i);
                included.push_back(i);
                search.consider(cursor, best);
            }
            if (viable) search.dfs(cursor, k, best);
            for (std::size_t d = included.size(); d-- > 0;) cursor.exclude(included[d]);
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::optional<Candidate> best;
    for (auto& r : results) {
        if (!r) continue;
        bool better;
        if constexpr (std::is_same_v<Search, BudgetSearch>)
            better = !best || budget_better(*r, *best);
        else
            better = !best || ratio_better(*r, *best);
        if (better) best = std::move(r);
    }
    return best;
}

inline Plan to_plan(const SearchInstance& inst, const Candidate& cand) {
    Plan plan;
    for (std::size_t i : cand.members) plan.subset.push_back(inst.catalog->modifications[i].id);
    plan.total_cost = cand.cost;
    plan.total_gain = cand.gain;
    plan.adherence_after = inst.baseline + cand.gain;
    plan.objective_value = cand.objective;
    return plan;
}

}  // namespace detail

inline Plan optimize_budget(const Catalog& catalog, const ResolvedAssessment& resolved,
                            const Rat& xi, unsigned threads = 0) {
    detail::SearchInstance inst(catalog, resolved);
    std::atomic<std::int64_t> hint{std::numeric_limits<std::int64_t>::min()};
    detail::BudgetSearch search(inst, xi, &hint);

    // the empty subset is always affordable and seeds the incumbent
    detail::Candidate empty{{}, Rat(0), Rat(0), 0.0};
    auto best = detail::parallel_search(inst, search, threads, false, xi);
    if (!best || detail::budget_better(empty, *best)) best = empty;
    return detail::to_plan(inst, *best);
}

inline Plan optimize_ratio(const Catalog& catalog, const ResolvedAssessment& resolved,
                           double gamma, RatioQuality quality = RatioQuality::gain,
                           unsigned threads = 0) {
    if (catalog.modifications.empty())
        throw NoCandidatesError("no candidate modifications");
    detail::SearchInstance inst(catalog, resolved);
    std::atomic<std::int64_t> hint{std::numeric_limits<std::int64_t>::min()};
    detail::RatioSearch search(inst, gamma, quality, &hint);
    auto best = detail::parallel_search(inst, search, threads, true, Rat(0));
    if (!best)
        throw NoCandidatesError("no feasible non-empty subset has non-negative quality");
    return detail::to_plan(inst, *best);
}

// All non-empty feasible subsets as plans, sorted by gain descending, cost
// ascending, then subset order. The default ceiling keeps the lattice to
// about a million rows.
inline std::vector<Plan> enumerate_feasible(const Catalog& catalog,
                                            const ResolvedAssessment& resolved,
                                            std::size_t enumeration_limit = 20,
                                            double gamma = 0,
                                            RatioQuality quality = RatioQuality::gain) {
    if (catalog.modifications.size() > enumeration_limit)
        throw DataError("catalog exceeds the enumeration limit (" +
                        std::to_string(enumeration_limit) +
                        "); use the branch-and-bound optimize commands instead");
    detail::SearchInstance inst(catalog, resolved);

    std::vector<detail::Candidate> all;
    detail::Cursor cursor(inst);
    auto walk = [&](auto&& self, std::size_t depth) -> void {
        if (depth == inst.n) return;
        if (!cursor.conflicts(depth)) {
            cursor.include(depth);
            detail::Candidate cand{cursor.members, cursor.cost, cursor.gain, 0.0};
            if (gamma > 0) {
                Rat q = quality == RatioQuality::gain ? cursor.gain
                                                      : inst.baseline + cursor.gain;
                cand.objective = q < 0 ? -std::numeric_limits<double>::infinity()
                                       : std::pow(to_double(q), gamma) / to_double(cursor.cost);
            } else {
                cand.objective = to_double(cursor.gain);
            }
            all.push_back(std::move(cand));
            self(self, depth + 1);
            cursor.exclude(depth);
        }
        self(self, depth + 1);
    };
    walk(walk, 0);

    std::sort(all.begin(), all.end(), [](const detail::Candidate& a, const detail::Candidate& b) {
        if (a.gain != b.gain) return a.gain > b.gain;
        if (a.cost != b.cost) return a.cost < b.cost;
        return detail::lex_less(a.members, b.members);
    });

    std::vector<Plan> plans;
    plans.reserve(all.size());
    for (const auto& cand : all) plans.push_back(detail::to_plan(inst, cand));
    return plans;
}

struct ParetoRow {
    std::size_t rank;  // counts from the lowest gain up; best row = row count
    Plan plan;
};

inline std::vector<ParetoRow> pareto_export(const Catalog& catalog,
                                            const ResolvedAssessment& resolved,
                                            std::size_t enumeration_limit = 20,
                                            double gamma = 0,
                                            RatioQuality quality = RatioQuality::gain) {
    std::vector<Plan> plans = enumerate_feasible(catalog, resolved, enumeration_limit,
                                                 gamma, quality);
    std::vector<ParetoRow> rows;
    rows.reserve(plans.size());
    const std::size_t count = plans.size();
    for (std::size_t i = 0; i < plans.size(); ++i)
        rows.push_back({count - i, std::move(plans[i])});
    return rows;
}

}  // namespace plopt
