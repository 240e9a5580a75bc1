#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wra/asymptotics.hpp"
#include "wra/distributions.hpp"
#include "wra/empirical.hpp"
#include "wra/montecarlo.hpp"
#include "wra/weights.hpp"

namespace wra {

using nlohmann::json;

// --- weights ---------------------------------------------------------------

inline json to_json(const WeightSpec& w) {
    json j;
    switch (w.kind) {
        case WeightKind::Indicator:
            j = {{"kind", "indicator"}, {"p", w.param}};
            break;
        case WeightKind::ProportionalHazards:
            j = {{"kind", "ph"}, {"nu", w.param}};
            break;
        case WeightKind::SGini:
            j = {{"kind", "sgini"}, {"nu", w.param}};
            break;
        case WeightKind::Constant:
            j = {{"kind", "constant"}, {"c", w.param}};
            break;
        case WeightKind::Tabulated: {
            json grid = json::array();
            for (std::size_t i = 0; i < w.table_t.size(); ++i) {
                grid.push_back({w.table_t[i], w.table_w[i]});
            }
            j = {{"kind", "tabulated"}, {"grid", std::move(grid)}};
            break;
        }
    }
    if (!w.breakpoints.empty() && w.kind != WeightKind::Indicator) {
        j["breakpoints"] = w.breakpoints;
    }
    if (w.tail_exponents) {
        j["tail_exponents"] = {(*w.tail_exponents)[0], (*w.tail_exponents)[1]};
    }
    return j;
}

inline WeightSpec weight_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("weight spec: expected an object with a \"kind\" field");
    }
    const std::string kind = j.at("kind").get<std::string>();
    WeightSpec w;
    if (kind == "indicator") {
        w = WeightSpec::indicator(j.at("p").get<double>());
    } else if (kind == "ph") {
        w = WeightSpec::proportional_hazards(j.at("nu").get<double>());
    } else if (kind == "sgini") {
        w = WeightSpec::sgini(j.at("nu").get<double>());
    } else if (kind == "constant") {
        w = WeightSpec::constant(j.at("c").get<double>());
    } else if (kind == "tabulated") {
        std::vector<std::pair<double, double>> grid;
        for (const auto& node : j.at("grid")) {
            if (!node.is_array() || node.size() != 2) {
                throw ConfigError("weight spec: tabulated grid nodes must be [t, w] pairs");
            }
            grid.emplace_back(node[0].get<double>(), node[1].get<double>());
        }
        std::vector<double> breakpoints;
        if (j.contains("breakpoints")) {
            breakpoints = j.at("breakpoints").get<std::vector<double>>();
        }
        w = WeightSpec::tabulated(std::move(grid), std::move(breakpoints));
    } else {
        throw ConfigError("weight spec: unknown kind \"" + kind + "\"");
    }
    if (j.contains("breakpoints") && w.kind != WeightKind::Tabulated &&
        w.kind != WeightKind::Indicator) {
        w.breakpoints = j.at("breakpoints").get<std::vector<double>>();
        w.validate_breakpoints();
    }
    if (j.contains("tail_exponents")) {
        const auto& te = j.at("tail_exponents");
        if (!te.is_array() || te.size() != 2) {
            throw ConfigError("weight spec: tail_exponents must be [kappa1, kappa2]");
        }
        const double k1 = te[0].get<double>(), k2 = te[1].get<double>();
        if (!(k1 >= 0.0 && k1 < 1.0 && k2 >= 0.0 && k2 < 1.0)) {
            throw ConfigError("weight spec: tail_exponents must lie in [0,1)");
        }
        w.tail_exponents = {{k1, k2}};
    }
    return w;
}

// --- models ----------------------------------------------------------------

inline json to_json(const MarginalSpec& m) {
    switch (m.kind) {
        case MarginalKind::Exponential: return {{"kind", "exponential"}, {"rate", m.a}};
        case MarginalKind::Pareto: return {{"kind", "pareto"}, {"shape", m.a}, {"scale", m.b}};
        case MarginalKind::LogNormal: return {{"kind", "lognormal"}, {"mu", m.a}, {"sigma", m.b}};
        case MarginalKind::Uniform01: return {{"kind", "uniform01"}};
        case MarginalKind::Normal: return {{"kind", "normal"}, {"mu", m.a}, {"sigma", m.b}};
    }
    throw ConfigError("marginal spec: unknown kind");
}

inline MarginalSpec marginal_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("marginal spec: expected an object with a \"kind\" field");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "exponential") return MarginalSpec::exponential(j.at("rate").get<double>());
    if (kind == "pareto") {
        return MarginalSpec::pareto(j.at("shape").get<double>(), j.at("scale").get<double>());
    }
    if (kind == "lognormal") {
        return MarginalSpec::lognormal(j.at("mu").get<double>(), j.at("sigma").get<double>());
    }
    if (kind == "uniform01") return MarginalSpec::uniform01();
    if (kind == "normal") {
        return MarginalSpec::normal(j.at("mu").get<double>(), j.at("sigma").get<double>());
    }
    throw ConfigError("marginal spec: unknown kind \"" + kind + "\"");
}

inline json to_json(const ModelSpec& m) {
    switch (m.kind) {
        case ModelKind::SelfRisk:
            return {{"kind", "selfrisk"}, {"marginal", to_json(m.marginal_x)}};
        case ModelKind::BivariateGaussian:
            return {{"kind", "bvn"},     {"muX", m.mu_x},       {"muY", m.mu_y},
                    {"sigmaX", m.sigma_x}, {"sigmaY", m.sigma_y}, {"rho", m.rho}};
        case ModelKind::GaussianCopula:
            return {{"kind", "copula"},
                    {"marginalX", to_json(m.marginal_x)},
                    {"marginalY", to_json(m.marginal_y)},
                    {"rho", m.rho}};
        case ModelKind::Independent:
            return {{"kind", "independent"},
                    {"marginalX", to_json(m.marginal_x)},
                    {"marginalY", to_json(m.marginal_y)}};
    }
    throw ConfigError("model spec: unknown kind");
}

inline ModelSpec model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("model spec: expected an object with a \"kind\" field");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "selfrisk") return ModelSpec::self_risk(marginal_from_json(j.at("marginal")));
    if (kind == "bvn") {
        return ModelSpec::bivariate_gaussian(j.at("muX").get<double>(), j.at("muY").get<double>(),
                                             j.at("sigmaX").get<double>(),
                                             j.at("sigmaY").get<double>(), j.at("rho").get<double>());
    }
    if (kind == "copula") {
        return ModelSpec::gaussian_copula(marginal_from_json(j.at("marginalX")),
                                          marginal_from_json(j.at("marginalY")),
                                          j.at("rho").get<double>());
    }
    if (kind == "independent") {
        return ModelSpec::independent(marginal_from_json(j.at("marginalX")),
                                      marginal_from_json(j.at("marginalY")));
    }
    throw ConfigError("model spec: unknown kind \"" + kind + "\"");
}

// --- reports ---------------------------------------------------------------

inline json to_json(const EstimateReport& r) {
    json j{{"estimate", r.estimate},
           {"variant", to_string(r.variant)},
           {"n", r.n},
           {"weight", to_json(r.weight)}};
    if (r.variance_estimate) j["variance_estimate"] = *r.variance_estimate;
    if (r.ci) {
        j["ci"] = {{"lower", r.ci->lower}, {"upper", r.ci->upper}, {"level", r.ci->level}};
    }
    if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
    return j;
}

inline json to_json(const VarianceReport& r) {
    json j{{"sigma1_sq", r.sigma1_sq}, {"sigma2_sq", r.sigma2_sq},
           {"sigma_sq", r.sigma_sq},   {"w_integral", r.w_integral},
           {"method", to_string(r.method)}, {"grid_size", r.grid_size},
           {"truncation", r.truncation}};
    if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
    return j;
}

inline json to_json(const ExperimentResult& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr{{"n", row.n},
                {"mean_estimate", row.mean_estimate},
                {"bias", row.bias},
                {"rmse", row.rmse},
                {"scaled_variance", row.scaled_variance},
                {"failures", row.failures}};
        if (row.ks_statistic) jr["ks_statistic"] = *row.ks_statistic;
        if (row.coverage) jr["coverage"] = *row.coverage;
        rows.push_back(std::move(jr));
    }
    json j{{"true_value", r.true_value}, {"rows", std::move(rows)}};
    if (r.oracle_sigma_sq) j["oracle_sigma_sq"] = *r.oracle_sigma_sq;
    return j;
}

// --- experiment config -----------------------------------------------------

inline EstimatorKind estimator_from_string(const std::string& s) {
    if (s == "ratio") return EstimatorKind::Ratio;
    if (s == "simple") return EstimatorKind::Simple;
    if (s == "premium") return EstimatorKind::Premium;
    throw ConfigError("unknown estimator \"" + s + "\" (expected ratio|simple|premium)");
}

inline VarianceMethod variance_method_from_string(const std::string& s) {
    if (s == "oracle") return VarianceMethod::Oracle;
    if (s == "plugin") return VarianceMethod::PlugIn;
    if (s == "bootstrap") return VarianceMethod::Bootstrap;
    throw ConfigError("unknown variance method \"" + s + "\" (expected oracle|plugin|bootstrap)");
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig cfg;
    try {
        cfg.model = model_from_json(j.at("model"));
        cfg.weight = weight_from_json(j.at("weight"));
        if (j.contains("estimator")) {
            cfg.estimator = estimator_from_string(j.at("estimator").get<std::string>());
        }
        cfg.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
        cfg.replications = j.at("replications").get<std::size_t>();
        cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("ci_level")) cfg.ci_level = j.at("ci_level").get<double>();
        if (j.contains("variance_method")) {
            cfg.variance_method =
                variance_method_from_string(j.at("variance_method").get<std::string>());
        }
        if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
        if (j.contains("grid_size")) cfg.grid_size = j.at("grid_size").get<std::size_t>();
        if (j.contains("truncation")) cfg.truncation = j.at("truncation").get<double>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
        if (j.contains("bootstrap_replicates")) {
            cfg.bootstrap_replicates = j.at("bootstrap_replicates").get<std::size_t>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("experiment config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline json to_json(const ExperimentConfig& cfg) {
    return json{{"model", to_json(cfg.model)},
                {"weight", to_json(cfg.weight)},
                {"estimator", to_string(cfg.estimator)},
                {"sample_sizes", cfg.sample_sizes},
                {"replications", cfg.replications},
                {"master_seed", cfg.master_seed},
                {"ci_level", cfg.ci_level},
                {"variance_method", to_string(cfg.variance_method)},
                {"output_path", cfg.output_path}};
}

}  // namespace wra
