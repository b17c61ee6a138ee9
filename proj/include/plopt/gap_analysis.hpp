#pragma once

// Quality-gap statistics over a resolved assessment.
//
// Per feature: mu_f = mean of s(f,p) over products, sigma_f = stddev of the
// same, and the quality gap Delta_f = w(f) - mu_f (with per-product
// effective weights, w(f) is their mean, which equals the model weight
// whenever nothing was redistributed).
//
// Flags:
//   high-impact feature:  Delta_f > mean(Delta) + stddev(Delta)
//   product major gap:    s(f,p) < mu_f - sigma_f
//   product strength:     s(f,p) > mu_f + sigma_f   ("high" table annotation)
//
// Standard deviations are population form by default (divide by m); the
// sample form (m-1) is available as a config switch. Square roots live in
// floating point; every comparison pits an exact rational against the
// exact rational value of that float, so flagging is deterministic.

#include "plopt/assessment.hpp"
#include "plopt/rational.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace plopt {

enum class StddevForm { population, sample };

struct FeatureStats {
    Rat weight;   // mean effective w(f) across products
    Rat mean;     // mu_f
    double stddev;  // sigma_f
    Rat gap;      // Delta_f = weight - mean
};

struct GapReport {
    StddevForm form = StddevForm::population;
    std::vector<std::pair<std::string, FeatureStats>> features;  // model order
    double gap_mean = 0;    // mean(Delta) as double, for reporting
    double gap_stddev = 0;  // stddev(Delta)
    std::vector<std::string> high_impact_features;
    std::vector<std::pair<std::string, std::string>> product_major_gaps;  // "low" cells
    std::vector<std::pair<std::string, std::string>> product_strengths;   // "high" cells
};

namespace detail {

// Exact variance of the given exact samples; only the final sqrt is float.
inline double stddev_of(const std::vector<Rat>& xs, StddevForm form) {
    const std::size_t n = xs.size();
    if (n == 0) return 0;
    if (form == StddevForm::sample && n < 2) return 0;
    Rat mean = 0;
    for (const Rat& x : xs) mean += x;
    mean /= static_cast<unsigned>(n);
    Rat var = 0;
    for (const Rat& x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<unsigned>(form == StddevForm::sample ? n - 1 : n);
    return std::sqrt(to_double(var));
}

}  // namespace detail

inline FeatureStats feature_stats(const ResolvedAssessment& resolved,
                                  const std::string& feature_id,
                                  StddevForm form = StddevForm::population) {
    auto w = resolved.weights.find(feature_id);
    auto v = resolved.values.find(feature_id);
    if (w == resolved.weights.end() || v == resolved.values.end())
        throw DataError("unknown feature id: '" + feature_id + "'");
    const std::size_t m = resolved.products.size();
    if (m == 0) throw DataError("no products");

    std::vector<Rat> scores(m);
    Rat score_sum = 0, weight_sum = 0;
    for (std::size_t p = 0; p < m; ++p) {
        scores[p] = w->second[p] * v->second[p];
        score_sum += scores[p];
        weight_sum += w->second[p];
    }
    FeatureStats stats;
    stats.mean = score_sum / static_cast<unsigned>(m);
    stats.weight = weight_sum / static_cast<unsigned>(m);
    stats.stddev = detail::stddev_of(scores, form);
    stats.gap = stats.weight - stats.mean;
    return stats;
}

inline GapReport build_gap_report(const ResolvedAssessment& resolved,
                                  StddevForm form = StddevForm::population) {
    GapReport report;
    report.form = form;

    std::vector<Rat> gaps;
    for (const auto& fid : resolved.feature_ids) {
        FeatureStats stats = feature_stats(resolved, fid, form);
        gaps.push_back(stats.gap);
        report.features.emplace_back(fid, std::move(stats));
    }

    // cross-feature threshold: mean(Delta) + stddev(Delta)
    Rat gap_mean = 0;
    for (const Rat& g : gaps) gap_mean += g;
    gap_mean /= static_cast<unsigned>(gaps.size());
    double gap_sd = detail::stddev_of(gaps, form);
    report.gap_mean = to_double(gap_mean);
    report.gap_stddev = gap_sd;

    // Rat(double) is exact, so the strict > below has no float tolerance.
    Rat threshold = gap_mean + Rat(gap_sd);
    for (const auto& [fid, stats] : report.features)
        if (stats.gap > threshold) report.high_impact_features.push_back(fid);

    for (const auto& [fid, stats] : report.features) {
        Rat low = stats.mean - Rat(stats.stddev);
        Rat high = stats.mean + Rat(stats.stddev);
        for (std::size_t p = 0; p < resolved.products.size(); ++p) {
            Rat s = resolved.weights.at(fid)[p] * resolved.values.at(fid)[p];
            if (s < low)
                report.product_major_gaps.emplace_back(fid, resolved.products[p].id);
            else if (s > high)
                report.product_strengths.emplace_back(fid, resolved.products[p].id);
        }
    }
    return report;
}

inline std::vector<std::string> high_impact_features(const ResolvedAssessment& resolved,
                                                     StddevForm form = StddevForm::population) {
    return build_gap_report(resolved, form).high_impact_features;
}

inline std::vector<std::pair<std::string, std::string>> product_major_gaps(
    const ResolvedAssessment& resolved, StddevForm form = StddevForm::population) {
    return build_gap_report(resolved, form).product_major_gaps;
}

}  // namespace plopt
