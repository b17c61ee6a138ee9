#pragma once

// Architecture modification options: costs (shared + per-product), quality
// gains, and pairwise mutual-exclusion constraints.
//
// Gains come in two shapes:
//   per_product - one scalar adherence gain per product (may be negative);
//              purely additive across modifications.
//   per_feature - deltas on compliance values v(f,p); applying a subset sums
//              all deltas per cell and clamps to [0,1], so the combined
//              effect is order-independent but not necessarily additive.
//
// A subset of modifications is feasible iff it contains no conflicting
// pair, i.e. it is an independent set in the conflict graph.

#include "plopt/assessment.hpp"
#include "plopt/quality_model.hpp"
#include "plopt/rational.hpp"
#include "plopt/validation.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace plopt {

struct GainSpec {
    enum class Mode { per_product, per_feature };
    Mode mode = Mode::per_product;
    std::map<std::string, Rat> per_product;                        // pid -> gain
    std::map<std::string, std::map<std::string, Rat>> per_feature; // fid -> pid -> delta
};

struct Modification {
    std::string id;
    std::string label;
    Rat shared_cost;
    std::map<std::string, Rat> per_product_costs;
    GainSpec gains;
};

struct Catalog {
    std::vector<Modification> modifications;
    std::vector<std::pair<std::string, std::string>> conflicts;

    std::size_t index_of(const std::string& id) const {
        for (std::size_t i = 0; i < modifications.size(); ++i)
            if (modifications[i].id == id) return i;
        throw DataError("unknown modification id: '" + id + "'");
    }

    // conflict_masks()[i] has bit j set iff modification i conflicts with j.
    std::vector<std::uint32_t> conflict_masks() const {
        std::vector<std::uint32_t> masks(modifications.size(), 0);
        for (const auto& [a, b] : conflicts) {
            std::size_t i = index_of(a), j = index_of(b);
            masks[i] |= std::uint32_t{1} << j;
            masks[j] |= std::uint32_t{1} << i;
        }
        return masks;
    }
};

inline Rat total_cost(const Modification& mod) {
    Rat c = mod.shared_cost;
    for (const auto& [pid, pc] : mod.per_product_costs) c += pc;
    return c;
}

inline Rat subset_cost(const Catalog& catalog, const std::vector<std::string>& subset) {
    Rat c = 0;
    for (const auto& id : subset) c += total_cost(catalog.modifications[catalog.index_of(id)]);
    return c;
}

inline bool is_feasible(const Catalog& catalog, const std::vector<std::string>& subset) {
    std::uint32_t mask = 0;
    for (const auto& id : subset) mask |= std::uint32_t{1} << catalog.index_of(id);
    auto conflict = catalog.conflict_masks();
    for (std::size_t i = 0; i < catalog.modifications.size(); ++i)
        if ((mask >> i & 1) && (conflict[i] & mask)) return false;
    return true;
}

// Structural validation; cross-reference checks against a concrete model
// and assessment live in validate_catalog_refs below.
inline ValidationReport validate_catalog(const Catalog& catalog) {
    ValidationReport report;
    std::set<std::string> ids;
    for (const auto& mod : catalog.modifications) {
        if (!ids.insert(mod.id).second) report.add_error(mod.id, "duplicate modification id");
        if (mod.shared_cost < 0)
            report.add_error(mod.id, "negative shared cost");
        for (const auto& [pid, pc] : mod.per_product_costs)
            if (pc < 0) report.add_error(mod.id, "negative cost for product '" + pid + "'");
        // the ratio objective divides by subset cost, so zero-cost
        // modifications would make it undefined
        if (total_cost(mod) <= 0)
            report.add_error(mod.id, "total cost must be strictly positive");
    }
    for (const auto& [a, b] : catalog.conflicts) {
        if (a == b) report.add_error(a, "modification conflicts with itself");
        if (!ids.count(a)) report.add_error(a, "conflict references unknown modification");
        if (!ids.count(b)) report.add_error(b, "conflict references unknown modification");
    }
    return report;
}

inline ValidationReport validate_catalog_refs(const Catalog& catalog,
                                              const QualityModel& model,
                                              const ResolvedAssessment& resolved) {
    ValidationReport report;
    std::set<std::string> product_ids;
    for (const auto& p : resolved.products) product_ids.insert(p.id);

    Rat positive_gain_sum = 0;
    for (const auto& mod : catalog.modifications) {
        for (const auto& [pid, pc] : mod.per_product_costs)
            if (!product_ids.count(pid))
                report.add_error(mod.id, "cost references unknown product '" + pid + "'");
        if (mod.gains.mode == GainSpec::Mode::per_product) {
            for (const auto& [pid, g] : mod.gains.per_product) {
                if (!product_ids.count(pid))
                    report.add_error(mod.id, "gain references unknown product '" + pid + "'");
                if (g > 0) positive_gain_sum += g;
            }
        } else {
            for (const auto& [fid, row] : mod.gains.per_feature) {
                if (!model.find_feature(fid))
                    report.add_error(mod.id, "gain references unknown feature '" + fid + "'");
                for (const auto& [pid, delta] : row)
                    if (!product_ids.count(pid))
                        report.add_error(mod.id,
                                         "gain references unknown product '" + pid + "'");
            }
        }
    }

    // additive per-product gains are not clamped, so they can nominally
    // exceed the 100-per-product ceiling; worth a warning, not an error
    Rat ceiling = max_adherence(model, resolved.products.size());
    Rat baseline = adherence(resolved);
    if (baseline + positive_gain_sum > ceiling)
        report.add_warning("catalog",
                           "baseline adherence plus all positive gains (" +
                               format_rational(baseline + positive_gain_sum) +
                               ") exceeds the maximum adherence " + format_rational(ceiling));
    return report;
}

namespace detail {

// Independent-set count of the sub-graph induced by `remaining`, by the
// standard branch rule: pick a vertex v, count sets without v plus sets
// with v (which exclude its neighbourhood).
inline std::uint64_t count_independent_sets(std::uint32_t remaining,
                                            const std::vector<std::uint32_t>& adjacency) {
    if (remaining == 0) return 1;  // the empty set
    int v = std::countr_zero(remaining);
    std::uint32_t without_v = remaining & ~(std::uint32_t{1} << v);
    return count_independent_sets(without_v, adjacency) +
           count_independent_sets(without_v & ~adjacency[v], adjacency);
}

}  // namespace detail

// Exact number of non-empty feasible subsets. Decomposes the conflict
// graph into connected components first, so n isolated vertices cost n
// doublings instead of a 2^n walk; exact for catalogs up to 30 entries.
inline std::uint64_t count_feasible(const Catalog& catalog) {
    const std::size_t n = catalog.modifications.size();
    if (n > 30) throw DataError("count_feasible supports at most 30 modifications");
    auto adjacency = catalog.conflict_masks();

    std::vector<bool> seen(n, false);
    std::uint64_t product = 1;
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        // flood-fill one component
        std::uint32_t component = 0;
        std::vector<std::size_t> stack{start};
        seen[start] = true;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            component |= std::uint32_t{1} << v;
            for (std::size_t u = 0; u < n; ++u)
                if ((adjacency[v] >> u & 1) && !seen[u]) {
                    seen[u] = true;
                    stack.push_back(u);
                }
        }
        product *= detail::count_independent_sets(component, adjacency);
    }
    return product - 1;  // drop the empty set
}

// Applies a feasible subset to a resolved assessment. Per-feature deltas
// are summed per cell and clamped into [0,1]; per-product scalar gains do
// not touch the matrix and are accounted for by subset_gain/adherence_after.
inline ResolvedAssessment apply(const Catalog& catalog, const std::vector<std::string>& subset,
                                ResolvedAssessment resolved) {
    auto conflict = catalog.conflict_masks();
    std::uint32_t mask = 0;
    for (const auto& id : subset) {
        std::size_t i = catalog.index_of(id);
        if (conflict[i] & mask)
            for (const auto& other : subset)
                if (conflict[i] >> catalog.index_of(other) & 1)
                    throw DataError("conflicting modifications " + other + "," + id);
        mask |= std::uint32_t{1} << i;
    }

    for (const auto& id : subset) {
        const Modification& mod = catalog.modifications[catalog.index_of(id)];
        if (mod.gains.mode != GainSpec::Mode::per_feature) continue;
        for (const auto& [fid, row] : mod.gains.per_feature) {
            auto values = resolved.values.find(fid);
            if (values == resolved.values.end())
                throw DataError("gain references unknown feature '" + fid + "'");
            for (const auto& [pid, delta] : row)
                values->second[resolved.product_index(pid)] += delta;
        }
    }
    // single clamp after summation keeps the result order-independent
    for (auto& [fid, vs] : resolved.values)
        for (Rat& v : vs) v = std::min(Rat(1), std::max(Rat(0), v));
    return resolved;
}

inline Rat subset_gain(const Catalog& catalog, const std::vector<std::string>& subset,
                       const ResolvedAssessment& resolved) {
    Rat scalar = 0;
    bool any_per_feature = false;
    for (const auto& id : subset) {
        const Modification& mod = catalog.modifications[catalog.index_of(id)];
        if (mod.gains.mode == GainSpec::Mode::per_product)
            for (const auto& [pid, g] : mod.gains.per_product) scalar += g;
        else
            any_per_feature = true;
    }
    if (!any_per_feature) {
        if (!is_feasible(catalog, subset)) {
            // surface the same diagnostic apply() would
            apply(catalog, subset, resolved);
        }
        return scalar;
    }
    return scalar + adherence(apply(catalog, subset, resolved)) - adherence(resolved);
}

}  // namespace plopt
