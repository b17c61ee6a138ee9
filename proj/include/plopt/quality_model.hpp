#pragma once

// Weighted quality model: characteristics own features, both carry
// normalized weights. The overall feature weight is
//
//     w(f) = 100 * wc(f) * wf(f)
//
// so that a valid model's feature weights always sum to exactly 100.

#include "plopt/rational.hpp"
#include "plopt/validation.hpp"

#include <set>
#include <string>
#include <vector>

namespace plopt {

struct Feature {
    std::string id;        // hierarchical, e.g. "1.3.2"
    std::string name;
    std::string question;  // questionnaire text shown to assessors
    Rat weight_wf;
};

struct Characteristic {
    std::string id;        // short key, e.g. "1"
    std::string name;
    Rat weight_wc;
    std::vector<Feature> features;
};

struct QualityModel {
    std::vector<Characteristic> characteristics;

    // Features in document order; the canonical iteration order everywhere.
    std::vector<const Feature*> all_features() const {
        std::vector<const Feature*> out;
        for (const auto& c : characteristics)
            for (const auto& f : c.features) out.push_back(&f);
        return out;
    }

    const Characteristic* characteristic_of(const std::string& feature_id) const {
        for (const auto& c : characteristics)
            for (const auto& f : c.features)
                if (f.id == feature_id) return &c;
        return nullptr;
    }

    const Feature* find_feature(const std::string& feature_id) const {
        for (const auto& c : characteristics)
            for (const auto& f : c.features)
                if (f.id == feature_id) return &f;
        return nullptr;
    }

    std::size_t feature_count() const {
        std::size_t n = 0;
        for (const auto& c : characteristics) n += c.features.size();
        return n;
    }
};

inline ValidationReport validate_model(const QualityModel& model) {
    ValidationReport report;
    if (model.characteristics.empty()) {
        report.add_error("model", "empty model: no characteristics");
        return report;
    }

    std::set<std::string> char_ids, feature_ids;
    Rat wc_sum = 0;
    for (const auto& c : model.characteristics) {
        if (!char_ids.insert(c.id).second)
            report.add_error(c.id, "duplicate characteristic id");
        if (c.weight_wc < 0 || c.weight_wc > 1)
            report.add_error(c.id, "characteristic weight " + format_rational(c.weight_wc) +
                                       " outside [0,1]");
        wc_sum += c.weight_wc;
        if (c.features.empty())
            report.add_error(c.id, "characteristic has no features");

        Rat wf_sum = 0;
        for (const auto& f : c.features) {
            if (!feature_ids.insert(f.id).second)
                report.add_error(f.id, "duplicate feature id");
            if (f.weight_wf < 0 || f.weight_wf > 1)
                report.add_error(f.id, "feature weight " + format_rational(f.weight_wf) +
                                           " outside [0,1]");
            if (f.weight_wf == 0)
                report.add_warning(f.id, "feature weight is zero; feature never contributes");
            if (f.id.rfind(c.id + ".", 0) != 0)
                report.add_error(f.id, "feature id does not extend characteristic id '" +
                                           c.id + "'");
            wf_sum += f.weight_wf;
        }
        if (!c.features.empty() && wf_sum != 1)
            report.add_error(c.id, "feature weights sum to " + format_rational(wf_sum) +
                                       " != 1");
    }
    if (wc_sum != 1)
        report.add_error("model", "characteristic weights sum to " + format_rational(wc_sum) +
                                      " != 1");
    return report;
}

inline QualityModel apply_default_characteristic_weights(QualityModel model) {
    if (model.characteristics.empty()) throw DataError("empty model");
    Rat each(1, static_cast<int>(model.characteristics.size()));
    for (auto& c : model.characteristics) c.weight_wc = each;
    return model;
}

// Explicit repair: scale characteristic weights to sum 1 and each
// characteristic's feature weights to sum 1. Weights are business
// decisions, so this is never applied implicitly by validation.
inline QualityModel renormalized(QualityModel model) {
    Rat wc_sum = 0;
    for (const auto& c : model.characteristics) wc_sum += c.weight_wc;
    if (wc_sum == 0) throw DataError("cannot renormalize: characteristic weights sum to 0");
    for (auto& c : model.characteristics) {
        c.weight_wc /= wc_sum;
        Rat wf_sum = 0;
        for (const auto& f : c.features) wf_sum += f.weight_wf;
        if (wf_sum == 0)
            throw DataError("cannot renormalize: feature weights of characteristic '" +
                            c.id + "' sum to 0");
        for (auto& f : c.features) f.weight_wf /= wf_sum;
    }
    return model;
}

inline Rat feature_overall_weight(const QualityModel& model, const std::string& feature_id) {
    for (const auto& c : model.characteristics)
        for (const auto& f : c.features)
            if (f.id == feature_id) return 100 * c.weight_wc * f.weight_wf;
    throw DataError("unknown feature id: '" + feature_id + "'");
}

inline Rat max_adherence(const QualityModel&, std::size_t product_count) {
    if (product_count == 0) throw DataError("product count must be positive");
    return Rat(100) * static_cast<unsigned>(product_count);
}

}  // namespace plopt
