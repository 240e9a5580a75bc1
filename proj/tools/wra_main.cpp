// Command-line front end: dataset estimation, oracle values, variance and
// confidence intervals, and seeded simulation experiments. All subcommands
// read/write JSON so they compose with external tooling; exit codes are
// 0 ok, 2 config/parse, 3 data, 4 math/domain, 5 experiment abort.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wra/wra.hpp"

namespace {

using nlohmann::json;

json parse_json_arg(const std::string& arg, const std::string& what) {
    // Inline JSON if it looks like an object; otherwise a file path.
    std::string text;
    if (!arg.empty() && arg.front() == '{') {
        text = arg;
    } else {
        std::ifstream in(arg);
        if (!in) throw wra::ConfigError(what + ": cannot open \"" + arg + "\"");
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw wra::ConfigError(what + ": " + e.what());
    }
}

void print_report(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_estimate(const std::string& csv_path, const std::string& weight_arg,
                 const std::string& variant, std::optional<double> ci_level,
                 const std::string& method, std::uint64_t seed, std::size_t bootstrap_reps) {
    const wra::WeightSpec w = wra::weight_from_json(parse_json_arg(weight_arg, "weight spec"));
    const wra::EstimatorKind kind = wra::estimator_from_string(variant);
    const wra::PairedSample sample = wra::read_sample_csv(csv_path);

    wra::EstimateReport rep;
    if (ci_level) {
        if (kind != wra::EstimatorKind::Simple && kind != wra::EstimatorKind::Premium) {
            throw wra::ConfigError("confidence intervals are available for the simple/premium "
                                   "estimator only");
        }
        const auto vm = wra::variance_method_from_string(method);
        rep = wra::confidence_interval(sample, w, *ci_level, vm, seed, bootstrap_reps);
        if (kind == wra::EstimatorKind::Premium) rep.variant = kind;
    } else {
        switch (kind) {
            case wra::EstimatorKind::Ratio: rep = wra::estimate_ratio(sample, w); break;
            case wra::EstimatorKind::Simple: rep = wra::estimate_simple(sample, w); break;
            case wra::EstimatorKind::Premium: rep = wra::estimate_premium(sample.xs, w); break;
        }
    }
    print_report(wra::to_json(rep));
    return wra::exit_code::ok;
}

int cmd_true_value(const std::string& model_arg, const std::string& weight_arg,
                   std::size_t grid_size, double truncation) {
    const wra::ModelSpec model = wra::model_from_json(parse_json_arg(model_arg, "model spec"));
    const wra::WeightSpec w = wra::weight_from_json(parse_json_arg(weight_arg, "weight spec"));
    const double value = wra::true_allocation(model, w);
    const wra::VarianceReport var = wra::sigma_sq_oracle(model, w, grid_size, truncation);
    json out{{"value", value},
             {"sigma_sq", var.sigma_sq},
             {"sigma1_sq", var.sigma1_sq},
             {"sigma2_sq", var.sigma2_sq},
             {"w_integral", var.w_integral},
             {"grid_size", var.grid_size},
             {"truncation", var.truncation}};
    print_report(out);
    return wra::exit_code::ok;
}

int cmd_variance(const std::string& csv_path, const std::string& weight_arg,
                 const std::string& method, std::uint64_t seed, std::size_t bootstrap_reps) {
    const wra::WeightSpec w = wra::weight_from_json(parse_json_arg(weight_arg, "weight spec"));
    const wra::PairedSample sample = wra::read_sample_csv(csv_path);
    const auto vm = wra::variance_method_from_string(method);
    wra::VarianceReport rep;
    switch (vm) {
        case wra::VarianceMethod::PlugIn: rep = wra::sigma_sq_plugin(sample, w); break;
        case wra::VarianceMethod::Bootstrap:
            rep = wra::bootstrap_variance(sample, w, bootstrap_reps, seed);
            break;
        case wra::VarianceMethod::Oracle:
            throw wra::ConfigError("variance: oracle method needs a model; use true-value");
    }
    print_report(wra::to_json(rep));
    return wra::exit_code::ok;
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 std::optional<double> level, std::optional<std::string> method,
                 std::optional<unsigned> threads, std::optional<std::size_t> grid_size,
                 std::optional<double> truncation) {
    const json cj = parse_json_arg(config_path, "experiment config");
    wra::ExperimentConfig cfg = wra::experiment_config_from_json(cj);
    std::string mode = cj.value("mode", std::string("consistency"));
    if (seed) cfg.master_seed = *seed;
    if (level) cfg.ci_level = *level;
    if (method) cfg.variance_method = wra::variance_method_from_string(*method);
    if (threads) cfg.threads = *threads;
    if (grid_size) cfg.grid_size = *grid_size;
    if (truncation) cfg.truncation = *truncation;
    if (cfg.replications == 1) {
        std::cerr << "warning: statistics degenerate with a single replication\n";
    }

    wra::ExperimentResult result;
    if (mode == "consistency") {
        result = wra::run_consistency(cfg);
    } else if (mode == "normality") {
        result = wra::run_normality(cfg);
    } else if (mode == "coverage") {
        result = wra::run_coverage(cfg);
    } else {
        throw wra::ConfigError("experiment config: unknown mode \"" + mode +
                               "\" (expected consistency|normality|coverage)");
    }

    if (!cfg.output_path.empty()) {
        const std::filesystem::path dir(cfg.output_path);
        std::filesystem::create_directories(dir);
        std::ofstream js(dir / "result.json");
        js << wra::to_json(result).dump(2) << "\n";
        std::ofstream cs(dir / "result.csv");
        cs << wra::experiment_result_csv(result);
    }

    std::cout << "true_value=" << wra::format_double(result.true_value);
    if (result.oracle_sigma_sq) {
        std::cout << " oracle_sigma_sq=" << wra::format_double(*result.oracle_sigma_sq);
    }
    std::cout << "\n";
    for (const auto& row : result.rows) {
        std::cout << "n=" << row.n << " mean=" << wra::format_double(row.mean_estimate)
                  << " bias=" << wra::format_double(row.bias)
                  << " rmse=" << wra::format_double(row.rmse)
                  << " scaled_var=" << wra::format_double(row.scaled_variance);
        if (row.ks_statistic) std::cout << " ks=" << wra::format_double(*row.ks_statistic);
        if (row.coverage) std::cout << " coverage=" << wra::format_double(*row.coverage);
        if (row.failures > 0) std::cout << " failures=" << row.failures;
        std::cout << "\n";
    }
    return wra::exit_code::ok;
}

json error_json(const std::string& kind, const std::string& message, int code) {
    return json{{"error", message}, {"kind", kind}, {"exit_code", code}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted premiums and risk-capital allocations: estimators, "
                 "oracle values, asymptotic variances, and Monte Carlo experiments"};
    app.require_subcommand(1);

    std::string csv_path, weight_arg, model_arg, config_path;
    std::string variant = "simple";
    std::string method = "plugin";
    std::optional<double> ci_level;
    std::uint64_t seed = 0;
    std::size_t bootstrap_reps = 200;
    std::size_t grid_size = 4096;
    double truncation = 1e-8;
    std::optional<std::uint64_t> seed_override;
    std::optional<double> level_override;
    std::optional<std::string> method_override;
    std::optional<unsigned> threads_override;
    std::optional<std::size_t> grid_override;
    std::optional<double> trunc_override;

    auto* est = app.add_subcommand("estimate", "Estimate the weighted allocation from a CSV sample");
    est->add_option("--data", csv_path, "CSV file with header x,y (or single column x)")
        ->required();
    est->add_option("--weight", weight_arg, "Weight spec: inline JSON or a path")->required();
    est->add_option("--variant", variant, "Estimator: ratio|simple|premium")
        ->check(CLI::IsMember({"ratio", "simple", "premium"}));
    est->add_option("--ci-level", ci_level, "Attach a confidence interval at this level");
    est->add_option("--method", method, "Variance method for the interval: plugin|bootstrap");
    est->add_option("--seed", seed, "Seed for bootstrap resampling");
    est->add_option("--bootstrap-reps", bootstrap_reps, "Bootstrap replicates");

    auto* tv = app.add_subcommand("true-value", "Oracle allocation and asymptotic variance");
    tv->add_option("--model", model_arg, "Model spec: inline JSON or a path")->required();
    tv->add_option("--weight", weight_arg, "Weight spec: inline JSON or a path")->required();
    tv->add_option("--grid-size", grid_size, "Stieltjes grid cells");
    tv->add_option("--truncation", truncation, "Endpoint truncation in (0, 0.01]");

    auto* var = app.add_subcommand("variance", "Asymptotic variance estimate from a CSV sample");
    var->add_option("--data", csv_path, "CSV file with header x,y (or single column x)")
        ->required();
    var->add_option("--weight", weight_arg, "Weight spec: inline JSON or a path")->required();
    var->add_option("--method", method, "plugin|bootstrap");
    var->add_option("--seed", seed, "Seed for bootstrap resampling");
    var->add_option("--bootstrap-reps", bootstrap_reps, "Bootstrap replicates");

    auto* sim = app.add_subcommand("simulate", "Run a seeded experiment from a JSON config");
    sim->add_option("config", config_path, "Experiment config JSON path")->required();
    sim->add_option("--seed", seed_override, "Override master_seed");
    sim->add_option("--level", level_override, "Override ci_level");
    sim->add_option("--method", method_override, "Override variance_method");
    sim->add_option("--threads", threads_override, "Worker threads (0 = auto)");
    sim->add_option("--grid-size", grid_override, "Override oracle-variance grid cells");
    sim->add_option("--truncation", trunc_override, "Override oracle-variance truncation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        print_report(error_json("config", e.what(), wra::exit_code::config));
        return wra::exit_code::config;
    }

    try {
        if (est->parsed()) {
            return cmd_estimate(csv_path, weight_arg, variant, ci_level, method, seed,
                                bootstrap_reps);
        }
        if (tv->parsed()) return cmd_true_value(model_arg, weight_arg, grid_size, truncation);
        if (var->parsed()) return cmd_variance(csv_path, weight_arg, method, seed, bootstrap_reps);
        if (sim->parsed()) {
            return cmd_simulate(config_path, seed_override, level_override, method_override,
                                threads_override, grid_override, trunc_override);
        }
    } catch (const wra::ConfigError& e) {
        print_report(error_json("config", e.what(), wra::exit_code::config));
        return wra::exit_code::config;
    } catch (const wra::DataError& e) {
        print_report(error_json("data", e.what(), wra::exit_code::data));
        return wra::exit_code::data;
    } catch (const wra::MathError& e) {
        print_report(error_json("math", e.what(), wra::exit_code::math));
        return wra::exit_code::math;
    } catch (const wra::ExperimentError& e) {
        print_report(error_json("experiment", e.what(), wra::exit_code::experiment));
        return wra::exit_code::experiment;
    }
    return wra::exit_code::ok;
}
