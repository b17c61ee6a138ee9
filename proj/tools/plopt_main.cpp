// plopt: weighted quality scoring, statistical gap analysis, and exact
// conflict-aware selection of architecture modifications for software
// product lines.
//
// Commands: validate, score, gaps, count, optimize, pareto.
// Exit codes: 0 success, 1 validation or usage error, 2 ratio optimization
// without any candidate modification.

#include "plopt/assessment.hpp"
#include "plopt/gap_analysis.hpp"
#include "plopt/io.hpp"
#include "plopt/modification_catalog.hpp"
#include "plopt/optimizer.hpp"
#include "plopt/quality_model.hpp"
#include "plopt/rational.hpp"
#include "plopt/validation.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

namespace {

// Thrown after a validator reported errors; carries the rendered report.
struct ValidationFailure {
    std::string rendered;
};

struct LoadedInputs {
    plopt::QualityModel model;
    plopt::ScoreMatrix matrix;
    plopt::ResolvedAssessment resolved;
};

void print_warnings(const plopt::ValidationReport& report) {
    for (const auto& v : report.items)
        if (v.severity == plopt::Violation::Severity::warning)
            std::cerr << "warning  " << v.where << ": " << v.message << "\n";
}

plopt::IrrelevancePolicy parse_policy(const std::string& name) {
    if (name == "redistribute") return plopt::IrrelevancePolicy::redistribute;
    if (name == "empty") return plopt::IrrelevancePolicy::empty;
    return plopt::IrrelevancePolicy::perfect;
}

plopt::StddevForm parse_stddev(const std::string& name) {
    return name == "sample" ? plopt::StddevForm::sample : plopt::StddevForm::population;
}

// PLOPT_THREADS, when set, wins over --threads.
unsigned resolve_threads(unsigned flag_value) {
    const char* env = std::getenv("PLOPT_THREADS");
    if (!env || !*env) return flag_value;
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v > 4096)
        throw plopt::DataError("PLOPT_THREADS must be a non-negative integer");
    return static_cast<unsigned>(v);
}

// Loads model + assessment, fails on any validation error, resolves
// irrelevant cells under the chosen policy.
LoadedInputs load_inputs(const std::string& model_path, const std::string& assessment_path,
                         plopt::IrrelevancePolicy policy) {
    LoadedInputs in;
    in.model = plopt::load_model(model_path);
    plopt::ValidationReport report = plopt::validate_model(in.model);
    in.matrix = plopt::load_assessment(assessment_path);
    report.merge(plopt::validate_assessment(in.model, in.matrix));
    print_warnings(report);
    if (!report.ok()) throw ValidationFailure{plopt::validation_to_table(report)};
    in.resolved = plopt::resolve_irrelevance(in.model, in.matrix, policy);
    return in;
}

plopt::Catalog load_checked_catalog(const std::string& catalog_path,
                                    const LoadedInputs& in) {
    plopt::Catalog catalog = plopt::load_catalog(catalog_path);
    plopt::ValidationReport report = plopt::validate_catalog(catalog);
    report.merge(plopt::validate_catalog_refs(catalog, in.model, in.resolved));
    print_warnings(report);
    if (!report.ok()) throw ValidationFailure{plopt::validation_to_table(report)};
    return catalog;
}

int cmd_validate(const std::string& model_path, const std::string& assessment_path,
                 const std::string& catalog_path, plopt::IrrelevancePolicy policy,
                 const std::string& format) {
    plopt::QualityModel model = plopt::load_model(model_path);
    plopt::ScoreMatrix matrix = plopt::load_assessment(assessment_path);
    plopt::Catalog catalog = plopt::load_catalog(catalog_path);

    plopt::ValidationReport report = plopt::validate_model(model);
    report.merge(plopt::validate_assessment(model, matrix));
    report.merge(plopt::validate_catalog(catalog));

    // cross-reference checks need a resolved assessment, which itself can
    // fail (e.g. a fully irrelevant characteristic under redistribute)
    if (report.ok()) {
        try {
            plopt::ResolvedAssessment resolved =
                plopt::resolve_irrelevance(model, matrix, policy);
            report.merge(plopt::validate_catalog_refs(catalog, model, resolved));
        } catch (const plopt::DataError& e) {
            report.add_error("assessment", e.what());
        }
    }

    if (format == "json")
        std::cout << plopt::validation_to_json(report).dump(2) << "\n";
    else
        std::cout << plopt::validation_to_table(report);
    return report.ok() ? 0 : 1;
}

int cmd_score(const LoadedInputs& in, const std::string& format) {
    if (format == "json")
        std::cout << plopt::score_to_json(in.model, in.resolved).dump(2) << "\n";
    else
        std::cout << plopt::score_to_table(in.model, in.resolved);
    return 0;
}

int cmd_gaps(const LoadedInputs& in, plopt::StddevForm form, const std::string& format) {
    plopt::GapReport report = plopt::build_gap_report(in.resolved, form);
    if (format == "json")
        std::cout << plopt::gaps_to_json(report).dump(2) << "\n";
    else
        std::cout << plopt::gaps_to_table(report);
    return 0;
}

int cmd_count(const plopt::Catalog& catalog, const std::string& format) {
    std::uint64_t n = plopt::count_feasible(catalog);
    if (format == "json")
        std::cout << plopt::json{{"feasible_subsets", n}}.dump(2) << "\n";
    else
        std::cout << n << "\n";
    return 0;
}

int cmd_optimize(const LoadedInputs& in, const plopt::Catalog& catalog,
                 const std::optional<std::string>& budget_text,
                 const std::optional<double>& gamma, const std::string& ratio_quality,
                 unsigned threads, const std::string& format) {
    plopt::Rat baseline = plopt::adherence(in.resolved);
    plopt::RatioQuality quality = ratio_quality == "adherence"
                                      ? plopt::RatioQuality::adherence
                                      : plopt::RatioQuality::gain;

    plopt::Plan plan;
    plopt::json out;
    std::string mode_line;
    if (budget_text) {
        plopt::Rat xi = plopt::parse_rational(*budget_text);
        if (xi < 0) throw plopt::DataError("budget must be non-negative");
        plan = plopt::optimize_budget(catalog, in.resolved, xi, threads);
        out["mode"] = "budget";
        out["budget"] = plopt::format_rational(xi);
        mode_line = "mode: budget (xi = " + plopt::format_rational(xi) + ")\n";
    } else {
        plan = plopt::optimize_ratio(catalog, in.resolved, *gamma, quality, threads);
        out["mode"] = "ratio";
        out["gamma"] = *gamma;
        out["ratio_quality"] = ratio_quality;
        mode_line = "mode: ratio (gamma = " + plopt::format_double(*gamma) +
                    ", quality = " + ratio_quality + ")\n";
    }
    out["adherence_before"] = plopt::format_rational(baseline);
    const plopt::json plan_json = plopt::plan_to_json(plan);
    for (const auto& [key, value] : plan_json.items()) out[key] = value;

    if (format == "json")
        std::cout << out.dump(2) << "\n";
    else
        std::cout << mode_line << plopt::plan_to_table(plan, baseline);
    return 0;
}

int cmd_pareto(const LoadedInputs& in, const plopt::Catalog& catalog,
               const std::optional<double>& gamma, const std::string& ratio_quality,
               std::size_t limit, const std::string& out_path) {
    plopt::RatioQuality quality = ratio_quality == "adherence"
                                      ? plopt::RatioQuality::adherence
                                      : plopt::RatioQuality::gain;
    std::vector<plopt::ParetoRow> rows =
        plopt::pareto_export(catalog, in.resolved, limit, gamma.value_or(0), quality);
    std::string csv = plopt::pareto_to_csv(rows, gamma.has_value());
    if (out_path.empty())
        std::cout << csv;
    else
        plopt::write_text_file(out_path, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"product-line quality scoring, gap analysis, and exact "
                 "modification selection"};
    app.require_subcommand(1);

    std::string model_path, assessment_path, catalog_path;
    std::string policy_name = "perfect";
    std::string stddev_name = "population";
    std::string format = "table";
    std::string ratio_quality = "gain";
    std::string budget_text;
    std::string out_path;
    double gamma = 0;
    unsigned threads = 0;
    std::size_t limit = 20;

    auto add_data_options = [&](CLI::App* cmd, bool with_catalog) {
        cmd->add_option("--model", model_path, "quality model JSON file")->required();
        cmd->add_option("--assessment", assessment_path, "assessment JSON file")->required();
        if (with_catalog)
            cmd->add_option("--mods", catalog_path, "modification catalog JSON file")
                ->required();
        cmd->add_option("--policy", policy_name, "treatment of irrelevant scores")
            ->check(CLI::IsMember({"redistribute", "perfect", "empty"}))
            ->capture_default_str();
    };
    auto add_format_option = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"json", "table"}))
            ->capture_default_str();
    };

    CLI::App* validate = app.add_subcommand("validate", "check all three input files");
    add_data_options(validate, true);
    add_format_option(validate);

    CLI::App* score = app.add_subcommand("score", "weighted scores and adherence");
    add_data_options(score, false);
    add_format_option(score);

    CLI::App* gaps = app.add_subcommand("gaps", "per-feature statistics and gap flags");
    add_data_options(gaps, false);
    gaps->add_option("--stddev", stddev_name, "standard deviation form")
        ->check(CLI::IsMember({"population", "sample"}))
        ->capture_default_str();
    add_format_option(gaps);

    CLI::App* count = app.add_subcommand("count", "number of feasible subsets");
    add_data_options(count, true);
    add_format_option(count);

    CLI::App* optimize = app.add_subcommand("optimize", "best feasible subset");
    add_data_options(optimize, true);
    CLI::Option* budget_opt =
        optimize->add_option("--budget", budget_text, "cost ceiling (exact decimal)");
    CLI::Option* gamma_opt =
        optimize->add_option("--gamma", gamma, "quality emphasis for the ratio objective");
    optimize->add_option("--ratio-quality", ratio_quality,
                         "quality term of the ratio objective")
        ->check(CLI::IsMember({"gain", "adherence"}))
        ->capture_default_str();
    optimize->add_option("--threads", threads, "worker threads (0 = all cores)")
        ->capture_default_str();
    add_format_option(optimize);

    CLI::App* pareto = app.add_subcommand("pareto", "export the feasible lattice as CSV");
    add_data_options(pareto, true);
    CLI::Option* pareto_gamma_opt =
        pareto->add_option("--gamma", gamma, "fill the objective column with the ratio");
    pareto->add_option("--ratio-quality", ratio_quality,
                       "quality term of the ratio objective")
        ->check(CLI::IsMember({"gain", "adherence"}))
        ->capture_default_str();
    pareto->add_option("--limit", limit, "enumeration ceiling on catalog size")
        ->capture_default_str();
    pareto->add_option("--out", out_path, "write the CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        plopt::IrrelevancePolicy policy = parse_policy(policy_name);

        if (validate->parsed())
            return cmd_validate(model_path, assessment_path, catalog_path, policy, format);

        LoadedInputs in = load_inputs(model_path, assessment_path, policy);
        if (score->parsed()) return cmd_score(in, format);
        if (gaps->parsed()) return cmd_gaps(in, parse_stddev(stddev_name), format);

        plopt::Catalog catalog = load_checked_catalog(catalog_path, in);
        if (count->parsed()) return cmd_count(catalog, format);

        if (optimize->parsed()) {
            const bool has_budget = budget_opt->count() > 0;
            const bool has_gamma = gamma_opt->count() > 0;
            if (has_budget == has_gamma) {
                std::cerr << "error: optimize requires exactly one of --budget or --gamma\n";
                return 1;
            }
            return cmd_optimize(in, catalog,
                                has_budget ? std::optional<std::string>(budget_text)
                                           : std::nullopt,
                                has_gamma ? std::optional<double>(gamma) : std::nullopt,
                                ratio_quality, resolve_threads(threads), format);
        }
        if (pareto->parsed())
            return cmd_pareto(in, catalog,
                              pareto_gamma_opt->count() > 0 ? std::optional<double>(gamma)
                                                            : std::nullopt,
                              ratio_quality, limit, out_path);
    } catch (const ValidationFailure& failure) {
        std::cerr << failure.rendered;
        return 1;
    } catch (const plopt::NoCandidatesError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
