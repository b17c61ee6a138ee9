#pragma once

// File formats and report rendering.
//
// The three input documents (model, assessment, modification catalog) are
// JSON with every numeric field carried as a string holding an exact
// decimal ("0.25") or a fraction ("1/3"); see rational.hpp. Loaders throw
// DataError naming the offending document and key. Semantic validation
// (weight sums, ranges, cross-references) lives in the module validators,
// not here: a loader only rejects documents of the wrong shape.
//
// Emitters produce deterministic bytes: fixed key order (ordered_json),
// rationals as canonical decimal strings, floats via shortest round-trip
// formatting. Re-emitting a loaded document therefore always yields the
// same bytes, which the tests rely on.

#include "plopt/assessment.hpp"
#include "plopt/gap_analysis.hpp"
#include "plopt/modification_catalog.hpp"
#include "plopt/optimizer.hpp"
#include "plopt/quality_model.hpp"
#include "plopt/rational.hpp"
#include "plopt/validation.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace plopt {

using json = nlohmann::ordered_json;

// Shortest decimal that parses back to exactly the same double.
inline std::string format_double(double x) {
    std::array<char, 64> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    (void)ec;  // 64 chars always suffice for a double
    return std::string(buf.data(), end);
}

namespace detail {

inline const json& member(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw DataError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw DataError(where + ": missing \"" + key + "\"");
    return *it;
}

inline std::string string_member(const json& obj, const char* key, const std::string& where) {
    const json& v = member(obj, key, where);
    if (!v.is_string()) throw DataError(where + ": \"" + key + "\" must be a string");
    return v.get<std::string>();
}

inline std::string optional_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it != obj.end() && it->is_string() ? it->get<std::string>() : std::string();
}

inline Rat rational_member(const json& obj, const char* key, const std::string& where) {
    std::string text = string_member(obj, key, where);
    try {
        return parse_rational(text);
    } catch (const DataError& e) {
        throw DataError(where + ": \"" + key + "\": " + e.what());
    }
}

inline Rat rational_value(const json& v, const std::string& where) {
    if (!v.is_string()) throw DataError(where + ": numbers must be strings");
    try {
        return parse_rational(v.get<std::string>());
    } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
    }
}

}  // namespace detail

inline json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

// ---------------------------------------------------------------- model --

// Characteristics may omit "weight"; absent weights default to the uniform
// 1/|C| split. Feature weights are always explicit.
inline QualityModel model_from_json(const json& doc) {
    const json& cs = detail::member(doc, "characteristics", "model");
    if (!cs.is_array()) throw DataError("model: \"characteristics\" must be an array");

    QualityModel model;
    for (const json& cj : cs) {
        Characteristic c;
        c.id = detail::string_member(cj, "id", "model characteristic");
        const std::string where = "characteristic '" + c.id + "'";
        c.name = detail::optional_string(cj, "name");
        c.weight_wc = cj.contains("weight")
                          ? detail::rational_member(cj, "weight", where)
                          : Rat(1, static_cast<int>(std::max<std::size_t>(cs.size(), 1)));

        const json& fs = detail::member(cj, "features", where);
        if (!fs.is_array()) throw DataError(where + ": \"features\" must be an array");
        for (const json& fj : fs) {
            Feature f;
            f.id = detail::string_member(fj, "id", where + " feature");
            f.name = detail::optional_string(fj, "name");
            f.question = detail::optional_string(fj, "question");
            f.weight_wf = detail::rational_member(fj, "weight", "feature '" + f.id + "'");
            c.features.push_back(std::move(f));
        }
        model.characteristics.push_back(std::move(c));
    }
    return model;
}

inline json model_to_json(const QualityModel& model) {
    json cs = json::array();
    for (const auto& c : model.characteristics) {
        json fs = json::array();
        for (const auto& f : c.features)
            fs.push_back({{"id", f.id},
                          {"name", f.name},
                          {"question", f.question},
                          {"weight", format_rational(f.weight_wf)}});
        cs.push_back({{"id", c.id},
                      {"name", c.name},
                      {"weight", format_rational(c.weight_wc)},
                      {"features", std::move(fs)}});
    }
    return json{{"characteristics", std::move(cs)}};
}

inline QualityModel load_model(const std::string& path) {
    return model_from_json(read_json_file(path));
}

// ----------------------------------------------------------- assessment --

inline ScoreMatrix assessment_from_json(const json& doc) {
    ScoreMatrix matrix;
    const json& ps = detail::member(doc, "products", "assessment");
    if (!ps.is_array()) throw DataError("assessment: \"products\" must be an array");
    for (const json& pj : ps) {
        Product p;
        p.id = detail::string_member(pj, "id", "assessment product");
        p.name = detail::optional_string(pj, "name");
        matrix.products.push_back(std::move(p));
    }

    const json& scores = detail::member(doc, "scores", "assessment");
    if (!scores.is_object()) throw DataError("assessment: \"scores\" must be an object");
    for (auto row = scores.begin(); row != scores.end(); ++row) {
        const std::string& fid = row.key();
        if (!row.value().is_object())
            throw DataError("assessment: scores for '" + fid + "' must be an object");
        for (auto cell = row.value().begin(); cell != row.value().end(); ++cell) {
            const std::string where = "score " + fid + "/" + cell.key();
            if (cell.value().is_null())
                matrix.entries[fid][cell.key()] = std::nullopt;  // irrelevant
            else
                matrix.entries[fid][cell.key()] = detail::rational_value(cell.value(), where);
        }
    }
    return matrix;
}

inline json assessment_to_json(const ScoreMatrix& matrix) {
    json ps = json::array();
    for (const auto& p : matrix.products) ps.push_back({{"id", p.id}, {"name", p.name}});
    json scores = json::object();
    for (const auto& [fid, row] : matrix.entries) {
        json cells = json::object();
        for (const auto& [pid, cell] : row)
            cells[pid] = cell ? json(format_rational(*cell)) : json(nullptr);
        scores[fid] = std::move(cells);
    }
    return json{{"products", std::move(ps)}, {"scores", std::move(scores)}};
}

inline ScoreMatrix load_assessment(const std::string& path) {
    return assessment_from_json(read_json_file(path));
}

// -------------------------------------------------------------- catalog --

inline Catalog catalog_from_json(const json& doc) {
    Catalog catalog;
    const json& mods = detail::member(doc, "modifications", "catalog");
    if (!mods.is_array()) throw DataError("catalog: \"modifications\" must be an array");
    for (const json& mj : mods) {
        Modification mod;
        mod.id = detail::string_member(mj, "id", "catalog modification");
        const std::string where = "modification '" + mod.id + "'";
        mod.label = detail::optional_string(mj, "label");
        mod.shared_cost = mj.contains("shared_cost")
                              ? detail::rational_member(mj, "shared_cost", where)
                              : Rat(0);
        if (auto it = mj.find("per_product_costs"); it != mj.end()) {
            if (!it->is_object())
                throw DataError(where + ": \"per_product_costs\" must be an object");
            for (auto c = it->begin(); c != it->end(); ++c)
                mod.per_product_costs[c.key()] =
                    detail::rational_value(c.value(), where + " cost for " + c.key());
        }

        const json& gains = detail::member(mj, "gains", where);
        const bool has_pp = gains.contains("per_product");
        const bool has_pf = gains.contains("per_feature");
        if (has_pp == has_pf)
            throw DataError(where +
                            ": gains must hold exactly one of "
                            "\"per_product\" or \"per_feature\"");
        if (has_pp) {
            mod.gains.mode = GainSpec::Mode::per_product;
            const json& pp = gains["per_product"];
            if (!pp.is_object()) throw DataError(where + ": \"per_product\" must be an object");
            for (auto g = pp.begin(); g != pp.end(); ++g)
                mod.gains.per_product[g.key()] =
                    detail::rational_value(g.value(), where + " gain for " + g.key());
        } else {
            mod.gains.mode = GainSpec::Mode::per_feature;
            const json& pf = gains["per_feature"];
            if (!pf.is_object()) throw DataError(where + ": \"per_feature\" must be an object");
            for (auto row = pf.begin(); row != pf.end(); ++row) {
                if (!row.value().is_object())
                    throw DataError(where + ": per_feature row '" + row.key() +
                                    "' must be an object");
                for (auto d = row.value().begin(); d != row.value().end(); ++d)
                    mod.gains.per_feature[row.key()][d.key()] = detail::rational_value(
                        d.value(), where + " delta " + row.key() + "/" + d.key());
            }
        }
        catalog.modifications.push_back(std::move(mod));
    }

    if (auto it = doc.find("conflicts"); it != doc.end()) {
        if (!it->is_array()) throw DataError("catalog: \"conflicts\" must be an array");
        for (const json& pair : *it) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
                !pair[1].is_string())
                throw DataError("catalog: each conflict must be a pair of modification ids");
            catalog.conflicts.emplace_back(pair[0].get<std::string>(),
                                           pair[1].get<std::string>());
        }
    }
    return catalog;
}

inline json catalog_to_json(const Catalog& catalog) {
    json mods = json::array();
    for (const auto& mod : catalog.modifications) {
        json costs = json::object();
        for (const auto& [pid, c] : mod.per_product_costs) costs[pid] = format_rational(c);
        json gains = json::object();
        if (mod.gains.mode == GainSpec::Mode::per_product) {
            json pp = json::object();
            for (const auto& [pid, g] : mod.gains.per_product) pp[pid] = format_rational(g);
            gains["per_product"] = std::move(pp);
        } else {
            json pf = json::object();
            for (const auto& [fid, row] : mod.gains.per_feature) {
                json cells = json::object();
                for (const auto& [pid, d] : row) cells[pid] = format_rational(d);
                pf[fid] = std::move(cells);
            }
            gains["per_feature"] = std::move(pf);
        }
        mods.push_back({{"id", mod.id},
                        {"label", mod.label},
                        {"shared_cost", format_rational(mod.shared_cost)},
                        {"per_product_costs", std::move(costs)},
                        {"gains", std::move(gains)}});
    }
    json conflicts = json::array();
    for (const auto& [a, b] : catalog.conflicts) conflicts.push_back({a, b});
    return json{{"modifications", std::move(mods)}, {"conflicts", std::move(conflicts)}};
}

inline Catalog load_catalog(const std::string& path) {
    return catalog_from_json(read_json_file(path));
}

// -------------------------------------------------------------- reports --

namespace detail {

inline std::string pad_left(const std::string& s, std::size_t width) {
    return std::string(width > s.size() ? width - s.size() : 0, ' ') + s;
}

inline std::string pad_right(const std::string& s, std::size_t width) {
    return s + std::string(width > s.size() ? width - s.size() : 0, ' ');
}

// Renders rows as space-separated columns sized to their widest entry.
// First column left-aligned (labels), the rest right-aligned (numbers).
inline std::string render_columns(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i)
            width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += "  ";
            line += i == 0 ? pad_right(row[i], width[i]) : pad_left(row[i], width[i]);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << '\n';
    }
    return out.str();
}

}  // namespace detail

inline json validation_to_json(const ValidationReport& report) {
    json items = json::array();
    for (const auto& v : report.items)
        items.push_back(
            {{"severity", v.severity == Violation::Severity::error ? "error" : "warning"},
             {"where", v.where},
             {"message", v.message}});
    return json{{"status", report.ok() ? "ok" : "invalid"},
                {"errors", report.error_count()},
                {"warnings", report.items.size() - report.error_count()},
                {"violations", std::move(items)}};
}

inline std::string validation_to_table(const ValidationReport& report) {
    std::ostringstream out;
    for (const auto& v : report.items)
        out << (v.severity == Violation::Severity::error ? "error" : "warning") << "  "
            << v.where << ": " << v.message << '\n';
    out << (report.ok() ? "ok" : "invalid") << " (" << report.error_count() << " errors, "
        << report.items.size() - report.error_count() << " warnings)\n";
    return out.str();
}

// Weighted scores, per-product quality, and total adherence.
inline json score_to_json(const QualityModel& model, const ResolvedAssessment& resolved) {
    json products = json::array();
    for (const auto& p : resolved.products)
        products.push_back({{"id", p.id},
                            {"name", p.name},
                            {"quality", format_rational(product_quality(resolved, p.id))}});

    json scores = json::object();
    for (const auto& fid : resolved.feature_ids) {
        json row = json::object();
        for (const auto& p : resolved.products)
            row[p.id] = format_rational(weighted_score(resolved, fid, p.id));
        scores[fid] = std::move(row);
    }

    return json{{"products", std::move(products)},
                {"scores", std::move(scores)},
                {"adherence", format_rational(adherence(resolved))},
                {"max_adherence",
                 format_rational(max_adherence(model, resolved.products.size()))}};
}

inline std::string score_to_table(const QualityModel& model,
                                  const ResolvedAssessment& resolved) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"feature"};
    for (const auto& p : resolved.products) header.push_back(p.id);
    rows.push_back(std::move(header));
    for (const auto& fid : resolved.feature_ids) {
        std::vector<std::string> row{fid};
        for (const auto& p : resolved.products)
            row.push_back(format_rational(weighted_score(resolved, fid, p.id)));
        rows.push_back(std::move(row));
    }
    std::vector<std::string> quality{"quality"};
    for (const auto& p : resolved.products)
        quality.push_back(format_rational(product_quality(resolved, p.id)));
    rows.push_back(std::move(quality));

    std::ostringstream out;
    out << detail::render_columns(rows);
    out << "adherence " << format_rational(adherence(resolved)) << " of "
        << format_rational(max_adherence(model, resolved.products.size())) << '\n';
    return out.str();
}

inline json gaps_to_json(const GapReport& report) {
    json features = json::array();
    for (const auto& [fid, stats] : report.features)
        features.push_back({{"id", fid},
                            {"weight", format_rational(stats.weight)},
                            {"mean", format_rational(stats.mean)},
                            {"stddev", stats.stddev},
                            {"gap", format_rational(stats.gap)}});

    json low = json::array();
    for (const auto& [fid, pid] : report.product_major_gaps)
        low.push_back({{"feature", fid}, {"product", pid}});
    json high = json::array();
    for (const auto& [fid, pid] : report.product_strengths)
        high.push_back({{"feature", fid}, {"product", pid}});

    return json{
        {"stddev_form", report.form == StddevForm::population ? "population" : "sample"},
        {"features", std::move(features)},
        {"gap_mean", report.gap_mean},
        {"gap_stddev", report.gap_stddev},
        {"flag_threshold", report.gap_mean + report.gap_stddev},
        {"high_impact_features", report.high_impact_features},
        {"product_major_gaps", std::move(low)},
        {"product_strengths", std::move(high)}};
}

inline std::string gaps_to_table(const GapReport& report) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"feature", "weight", "mean", "stddev", "gap", ""});
    for (const auto& [fid, stats] : report.features) {
        bool flagged = std::find(report.high_impact_features.begin(),
                                 report.high_impact_features.end(),
                                 fid) != report.high_impact_features.end();
        rows.push_back({fid, format_rational(stats.weight), format_rational(stats.mean),
                        format_double(stats.stddev), format_rational(stats.gap),
                        flagged ? "high-impact" : ""});
    }

    std::ostringstream out;
    out << detail::render_columns(rows);
    out << "gap mean " << format_double(report.gap_mean) << ", gap stddev "
        << format_double(report.gap_stddev) << ", flag threshold "
        << format_double(report.gap_mean + report.gap_stddev) << " ("
        << (report.form == StddevForm::population ? "population" : "sample") << ")\n";

    auto cells = [](const std::vector<std::pair<std::string, std::string>>& list) {
        std::string joined;
        for (const auto& [fid, pid] : list) {
            if (!joined.empty()) joined += ' ';
            joined += fid + "/" + pid;
        }
        return joined.empty() ? std::string("none") : joined;
    };
    out << "low cells: " << cells(report.product_major_gaps) << '\n';
    out << "high cells: " << cells(report.product_strengths) << '\n';
    return out.str();
}

inline std::string joined_subset(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += '+';
        out += id;
    }
    return out;
}

inline json plan_to_json(const Plan& plan) {
    return json{{"subset", plan.subset},
                {"total_cost", format_rational(plan.total_cost)},
                {"total_gain", format_rational(plan.total_gain)},
                {"adherence_after", format_rational(plan.adherence_after)},
                {"objective_value", plan.objective_value}};
}

inline std::string plan_to_table(const Plan& plan, const Rat& adherence_before) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"subset", plan.subset.empty() ? "(none)" : joined_subset(plan.subset)});
    rows.push_back({"total cost", format_rational(plan.total_cost)});
    rows.push_back({"total gain", format_rational(plan.total_gain)});
    rows.push_back({"adherence", format_rational(adherence_before) + " -> " +
                                     format_rational(plan.adherence_after)});
    rows.push_back({"objective value", format_double(plan.objective_value)});
    return detail::render_columns(rows);
}

// Full feasible lattice as CSV, one row per subset, ranked from the lowest
// gain (rank 1) to the highest (rank = row count). The objective column is
// the ratio objective when one was requested, otherwise the gain again.
inline std::string pareto_to_csv(const std::vector<ParetoRow>& rows, bool ratio_objective) {
    std::ostringstream out;
    out << "rank,subset,gain,cost,adherence,objective\n";
    for (const auto& row : rows) {
        out << row.rank << ',' << joined_subset(row.plan.subset) << ','
            << format_rational(row.plan.total_gain) << ','
            << format_rational(row.plan.total_cost) << ','
            << format_rational(row.plan.adherence_after) << ',';
        if (ratio_objective)
            out << format_double(row.plan.objective_value);
        else
            out << format_rational(row.plan.total_gain);
        out << '\n';
    }
    return out.str();
}

}  // namespace plopt
