// classo: fit, infer and simulate from the command line.
//
// Exit status: 0 on success, 1 on a library or I/O error (a JSON error
// object is printed to stderr), 2 on invalid command-line usage.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "classo/cli.hpp"
#include "classo/error.hpp"
#include "classo/io.hpp"
#include "classo/simulate.hpp"

namespace {

using namespace classo;

std::optional<double> parse_lambda(const std::string& text) {
    if (text == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("--lambda must be 'auto' or a number, got '" + text + "'");
}

RegressionTable load(const std::string& path, std::size_t response_col, const cli::PrepOptions& prep) {
    if (response_col < 1) throw ConfigError("--response-col is 1-based");
    RegressionTable table = to_regression(read_csv(path), response_col - 1);
    cli::prepare(table, prep);
    return table;
}

void emit(const nlohmann::json& doc, const std::string& out) {
    const std::string text = doc.dump(2) + "\n";
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_file_atomic(out, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained Lasso estimation and inference"};
    app.require_subcommand(1);

    // fit
    std::string data_path;
    std::string targets_text;
    std::string lambda_text = "auto";
    std::string methods_text = "classo";
    std::string out_path;
    std::size_t response_col = 1;
    cli::PrepOptions prep;
    cli::FitOptions fit;

    auto* fit_cmd = app.add_subcommand("fit", "Estimate and build intervals for target columns");
    fit_cmd->add_option("--data", data_path, "Input CSV (response in --response-col)")->required();
    fit_cmd->add_option("--targets", targets_text, "1-based predictor columns, e.g. 3,7")->required();
    fit_cmd->add_option("--level", fit.level, "Confidence level")->capture_default_str();
    fit_cmd->add_option("--iters", fit.iterations, "Iterations T")->capture_default_str();
    fit_cmd->add_option("--lambda", lambda_text, "'auto' or a base penalty")->capture_default_str();
    fit_cmd->add_option("--schedule-c", fit.schedule_c, "c in the penalty schedule")->capture_default_str();
    fit_cmd->add_flag("--alpha-zero", fit.alpha_zero, "Use alpha = 0 (un-penalized Lasso)");
    fit_cmd->add_option("--methods", methods_text, "classo,up_lasso,ds_lasso")->capture_default_str();
    fit_cmd->add_flag("--center", prep.center, "Center response and predictors");
    fit_cmd->add_flag("--scale", prep.scale, "Scale predictors to unit sample sd");
    fit_cmd->add_option("--response-col", response_col, "1-based response column")->capture_default_str();
    fit_cmd->add_option("--threads", fit.threads, "Worker threads (0 = CLASSO_THREADS or all cores)");
    fit_cmd->add_option("--out", out_path, "Output JSON path (default stdout)");

    // infer
    cli::InferOptions infer;
    std::string csv_path;
    auto* infer_cmd = app.add_subcommand("infer", "p-values for every predictor with Holm's procedure");
    infer_cmd->add_option("--data", data_path, "Input CSV")->required();
    infer_cmd->add_option("--level", infer.level, "Family-wise error level")->capture_default_str();
    infer_cmd->add_option("--iters", infer.iterations, "Iterations T")->capture_default_str();
    infer_cmd->add_option("--lambda", lambda_text, "'auto' or a base penalty")->capture_default_str();
    infer_cmd->add_option("--schedule-c", infer.schedule_c, "c in the penalty schedule")->capture_default_str();
    infer_cmd->add_flag("--alpha-zero", infer.alpha_zero, "Use alpha = 0 (un-penalized Lasso)");
    infer_cmd->add_flag("--center", prep.center, "Center response and predictors");
    infer_cmd->add_flag("--scale", prep.scale, "Scale predictors to unit sample sd");
    infer_cmd->add_option("--response-col", response_col, "1-based response column")->capture_default_str();
    infer_cmd->add_option("--threads", infer.threads, "Worker threads");
    infer_cmd->add_option("--out", out_path, "Output JSON path (default stdout)");
    infer_cmd->add_option("--csv", csv_path, "Sorted p-value table as CSV");

    // simulate
    SimSpec sim;
    std::string design_text = "toeplitz";
    std::optional<double> rho;
    std::optional<std::uint64_t> seed;
    std::string sim_methods = "classo,up_lasso,ds_lasso";
    std::string sim_targets = "3,7";
    std::size_t p = 100;
    double ci_level = 0.95;
    bool no_mt = false;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo coverage, RMSE, power and FWER");
    sim_cmd->add_option("--design", design_text, "toeplitz, equicorr or identity")->capture_default_str();
    sim_cmd->add_option("--rho", rho, "Correlation (default 0.9 toeplitz, 0.8 equicorr)");
    sim_cmd->add_option("--n", sim.n, "Sample size")->capture_default_str();
    sim_cmd->add_option("--p", p, "Number of predictors")->capture_default_str();
    sim_cmd->add_option("--reps", sim.reps, "Replicates")->capture_default_str();
    sim_cmd->add_option("--seed", seed, "Base seed (required)")->required();
    sim_cmd->add_option("--methods", sim_methods, "Methods to compare")->capture_default_str();
    sim_cmd->add_option("--sigma", sim.sigma, "Noise standard deviation")->capture_default_str();
    sim_cmd->add_option("--targets", sim_targets, "1-based target coordinates")->capture_default_str();
    sim_cmd->add_option("--iters", sim.iterations, "Iterations T")->capture_default_str();
    sim_cmd->add_option("--schedule-c", sim.schedule_c, "c in the penalty schedule")->capture_default_str();
    sim_cmd->add_option("--level", ci_level, "Confidence level of the intervals")->capture_default_str();
    sim_cmd->add_option("--fwer-level", sim.fwer_alpha, "Holm family-wise level")->capture_default_str();
    sim_cmd->add_flag("--no-multiple-testing", no_mt, "Skip p-values for all coordinates");
    sim_cmd->add_option("--threads", sim.threads, "Worker threads");
    sim_cmd->add_option("--out", out_path, "Report JSON path (default stdout)");
    sim_cmd->add_option("--csv", csv_path, "Per-replicate CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*fit_cmd) {
            fit.targets = cli::parse_index_list(targets_text);
            fit.methods = cli::parse_method_list(methods_text);
            fit.lambda = parse_lambda(lambda_text);
            emit(cli::run_fit(load(data_path, response_col, prep), fit), out_path);
        } else if (*infer_cmd) {
            infer.lambda = parse_lambda(lambda_text);
            const auto doc = cli::run_infer(load(data_path, response_col, prep), infer);
            if (!csv_path.empty()) {
                std::string csv = "rank,index,name,estimate,p_value,rejected\n";
                for (const auto& t : doc["tests"])
                    csv += std::to_string(t["rank"].get<std::size_t>()) + ',' +
                           std::to_string(t["index"].get<std::size_t>()) + ',' + t["name"].get<std::string>() +
                           ',' + format_double(t["estimate"].get<double>()) + ',' +
                           format_double(t["p_value"].get<double>()) + ',' + (t["rejected"].get<bool>() ? "1" : "0") +
                           '\n';
                write_file_atomic(csv_path, csv);
            }
            emit(doc, out_path);
        } else if (*sim_cmd) {
            sim.design.kind = parse_design(design_text);
            sim.design.rho = rho ? *rho : (sim.design.kind == DesignKind::equicorr ? 0.8 : 0.9);
            if (sim.design.kind == DesignKind::identity) sim.design.rho = 0.0;
            sim.design.p = p;
            sim.base_seed = *seed;
            sim.methods = cli::parse_method_list(sim_methods);
            sim.targets = cli::parse_index_list(sim_targets);
            sim.ci_alpha = 1.0 - ci_level;
            sim.multiple_testing = !no_mt;
            const SimReport report = run_replicates(sim);
            if (!csv_path.empty()) write_file_atomic(csv_path, cli::replicates_csv(report));
            emit(cli::report_json(report), out_path);
            if (!out_path.empty() && out_path != "-") std::cout << cli::report_summary(report);
            if (!report.valid) std::cerr << "warning: more than 5% of replicates failed for some method\n";
        }
    } catch (const std::exception& e) {
        std::cerr << cli::error_json(e).dump() << "\n";
        return 1;
    }
    return 0;
}
