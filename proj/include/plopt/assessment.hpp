#pragma once

// Per-product compliance values v(f,p) in [0,1], irrelevance handling,
// weighted scores s(f,p) = w(f)*v(f,p) and overall adherence
// Q = sum over features and products of s(f,p).
//
// A cell may be marked irrelevant (a product simply has no use for the
// feature). Three policies turn such a matrix into a fully scored one:
//   Redistribute - the feature's weight mass moves to the remaining
//               features of the same characteristic, proportionally to
//               their wf, yielding per-product effective weights;
//   Perfect  - the cell is scored 1 (absence of the feature is no flaw);
//   Empty    - the cell is scored 0 (the product does not handle it).

#include "plopt/quality_model.hpp"
#include "plopt/rational.hpp"
#include "plopt/validation.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace plopt {

struct Product {
    std::string id;
    std::string name;
};

// nullopt = irrelevant for that product.
using CellValue = std::optional<Rat>;

struct ScoreMatrix {
    std::vector<Product> products;
    // feature id -> product id -> cell
    std::map<std::string, std::map<std::string, CellValue>> entries;
};

enum class IrrelevancePolicy { redistribute, perfect, empty };

inline ValidationReport validate_assessment(const QualityModel& model,
                                            const ScoreMatrix& matrix) {
    ValidationReport report;
    if (matrix.products.empty()) report.add_error("assessment", "no products");
    std::set<std::string> product_ids;
    for (const auto& p : matrix.products)
        if (!product_ids.insert(p.id).second)
            report.add_error(p.id, "duplicate product id");

    std::set<std::string> model_features;
    for (const Feature* f : model.all_features()) model_features.insert(f->id);

    for (const auto& [fid, row] : matrix.entries) {
        if (!model_features.count(fid)) {
            report.add_error(fid, "unknown feature id in scores");
            continue;
        }
        for (const auto& [pid, cell] : row) {
            if (!product_ids.count(pid)) {
                report.add_error(fid + "/" + pid, "unknown product id in scores");
                continue;
            }
            if (cell && (*cell < 0 || *cell > 1))
                report.add_error(fid + "/" + pid,
                                 "score " + format_rational(*cell) + " outside [0,1]");
        }
        for (const auto& p : matrix.products)
            if (!row.count(p.id))
                report.add_error(fid + "/" + p.id, "missing cell");
    }
    for (const auto& fid : model_features)
        if (!matrix.entries.count(fid))
            report.add_error(fid, "feature has no score row");
    return report;
}

// Fully resolved assessment: no irrelevant cells remain, and each product
// carries its own effective feature weights (they differ from the model's
// only under Redistribute).
struct ResolvedAssessment {
    std::vector<Product> products;
    std::vector<std::string> feature_ids;            // model document order
    // feature id -> per-product values, aligned with `products`
    std::map<std::string, std::vector<Rat>> values;
    std::map<std::string, std::vector<Rat>> weights;  // effective w(f) per product

    std::size_t product_index(const std::string& pid) const {
        for (std::size_t i = 0; i < products.size(); ++i)
            if (products[i].id == pid) return i;
        throw DataError("unknown product id: '" + pid + "'");
    }
};

inline ResolvedAssessment resolve_irrelevance(const QualityModel& model,
                                              const ScoreMatrix& matrix,
                                              IrrelevancePolicy policy) {
    ResolvedAssessment out;
    out.products = matrix.products;
    const std::size_t m = matrix.products.size();

    auto cell_of = [&](const std::string& fid, const std::string& pid) -> const CellValue& {
        auto row = matrix.entries.find(fid);
        if (row == matrix.entries.end()) throw DataError("missing score row: '" + fid + "'");
        auto cell = row->second.find(pid);
        if (cell == row->second.end())
            throw DataError("missing cell: '" + fid + "/" + pid + "'");
        return cell->second;
    };

    for (const Feature* f : model.all_features()) {
        out.feature_ids.push_back(f->id);
        out.values[f->id].resize(m);
        out.weights[f->id].resize(m);
    }

    for (const auto& c : model.characteristics) {
        for (std::size_t p = 0; p < m; ++p) {
            const std::string& pid = matrix.products[p].id;

            if (policy != IrrelevancePolicy::redistribute) {
                for (const auto& f : c.features) {
                    const CellValue& cell = cell_of(f.id, pid);
                    Rat v = cell ? *cell
                                 : (policy == IrrelevancePolicy::perfect ? Rat(1) : Rat(0));
                    out.values[f.id][p] = v;
                    out.weights[f.id][p] = 100 * c.weight_wc * f.weight_wf;
                }
                continue;
            }

            // Redistribute: split each irrelevant feature's w(f) among the
            // relevant ones of the same characteristic, in proportion to wf.
            Rat relevant_wf = 0, irrelevant_wf = 0;
            for (const auto& f : c.features)
                (cell_of(f.id, pid) ? relevant_wf : irrelevant_wf) += f.weight_wf;
            if (relevant_wf == 0 && irrelevant_wf > 0)
                throw DataError("characteristic fully irrelevant: '" + c.id +
                                "' for product '" + pid + "'");
            for (const auto& f : c.features) {
                const CellValue& cell = cell_of(f.id, pid);
                if (cell) {
                    // own weight plus its share of the irrelevant mass
                    Rat wf_eff = f.weight_wf +
                                 (relevant_wf == 0 ? Rat(0)
                                                   : irrelevant_wf * f.weight_wf / relevant_wf);
                    out.values[f.id][p] = *cell;
                    out.weights[f.id][p] = 100 * c.weight_wc * wf_eff;
                } else {
                    out.values[f.id][p] = 0;
                    out.weights[f.id][p] = 0;
                }
            }
        }
    }
    return out;
}

inline Rat weighted_score(const ResolvedAssessment& resolved, const std::string& feature_id,
                          const std::string& product_id) {
    auto w = resolved.weights.find(feature_id);
    auto v = resolved.values.find(feature_id);
    if (w == resolved.weights.end() || v == resolved.values.end())
        throw DataError("unknown feature id: '" + feature_id + "'");
    std::size_t p = resolved.product_index(product_id);
    return w->second[p] * v->second[p];
}

inline Rat product_quality(const ResolvedAssessment& resolved, const std::string& product_id) {
    std::size_t p = resolved.product_index(product_id);
    Rat q = 0;
    for (const auto& fid : resolved.feature_ids)
        q += resolved.weights.at(fid)[p] * resolved.values.at(fid)[p];
    return q;
}

inline Rat adherence(const ResolvedAssessment& resolved) {
    Rat q = 0;
    for (const auto& fid : resolved.feature_ids) {
        const auto& ws = resolved.weights.at(fid);
        const auto& vs = resolved.values.at(fid);
        for (std::size_t p = 0; p < ws.size(); ++p) q += ws[p] * vs[p];
    }
    return q;
}

}  // namespace plopt
