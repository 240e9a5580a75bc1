#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wra/asymptotics.hpp"
#include "wra/distributions.hpp"
#include "wra/empirical.hpp"
#include "wra/errors.hpp"
#include "wra/rng.hpp"

namespace wra {

/// Exact sup-distance between the empirical CDF of zs and the standard normal
/// CDF, evaluated at the jump points.
inline double ks_statistic(const std::vector<double>& zs) {
    if (zs.empty()) throw DataError("ks_statistic: empty sample");
    std::vector<double> z(zs);
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = normal_cdf(z[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

struct ExperimentConfig {
    ModelSpec model;
    WeightSpec weight;
    EstimatorKind estimator = EstimatorKind::Simple;
    std::vector<std::size_t> sample_sizes;
    std::size_t replications = 1;
    std::uint64_t master_seed = 0;
    double ci_level = 0.95;
    VarianceMethod variance_method = VarianceMethod::Oracle;
    std::string output_path;
    std::size_t grid_size = 4096;  // oracle-variance quadrature
    double truncation = 1e-8;
    // runtime knobs, not part of the experiment identity
    unsigned threads = 0;  // 0 = hardware concurrency
    std::size_t bootstrap_replicates = 200;

    void validate() const {
        if (replications < 1) throw ConfigError("experiment: replications must be >= 1");
        if (sample_sizes.empty()) throw ConfigError("experiment: sample_sizes must be nonempty");
        for (std::size_t i = 1; i < sample_sizes.size(); ++i) {
            if (!(sample_sizes[i] > sample_sizes[i - 1])) {
                throw ConfigError("experiment: sample_sizes must be strictly increasing");
            }
        }
        if (!(ci_level > 0.0 && ci_level < 1.0)) {
            throw ConfigError("experiment: ci_level must lie in (0,1)");
        }
    }
};

struct ResultRow {
    std::size_t n = 0;
    double mean_estimate = 0.0;
    double bias = 0.0;
    double rmse = 0.0;
    double scaled_variance = 0.0;  // n * empirical variance
    std::optional<double> ks_statistic;
    std::optional<double> coverage;
    std::size_t failures = 0;
};

struct ExperimentResult {
    double true_value = 0.0;
    std::optional<double> oracle_sigma_sq;
    std::vector<ResultRow> rows;
};

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            const std::size_t lo = count * t / threads;
            const std::size_t hi = count * (t + 1) / threads;
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline double run_estimator(EstimatorKind kind, const PairedSample& s, const WeightSpec& w) {
    switch (kind) {
        case EstimatorKind::Ratio: return estimate_ratio(s, w).estimate;
        case EstimatorKind::Simple: return estimate_simple(s, w).estimate;
        case EstimatorKind::Premium: return estimate_premium(s.xs, w).estimate;
    }
    throw ConfigError("unknown estimator kind");
}

struct RepOutcome {
    bool ok = false;
    double estimate = 0.0;
    double sigma_sq = 0.0;
};

enum class RepExtra { None, PlugInSigma, BootstrapSigma };

/// One seeded replication batch at sample size n, run in parallel; slot order
/// is by replication index so aggregation does not depend on scheduling.
inline std::vector<RepOutcome> replicate(const ExperimentConfig& cfg, std::size_t n,
                                         RepExtra extra) {
    std::vector<RepOutcome> out(cfg.replications);
    parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, n, r);
        try {
            const PairedSample s = sample_pairs(cfg.model, n, seed);
            RepOutcome o;
            o.estimate = run_estimator(cfg.estimator, s, cfg.weight);
            if (extra == RepExtra::PlugInSigma) {
                o.sigma_sq = sigma_sq_plugin(s, cfg.weight).sigma_sq;
            } else if (extra == RepExtra::BootstrapSigma) {
                o.sigma_sq = bootstrap_variance(s, cfg.weight, cfg.bootstrap_replicates,
                                                derive_seed(seed, 0x626F6F74ULL))
                                 .sigma_sq;
            }
            o.ok = true;
            out[r] = o;
        } catch (const MathError&) {
            out[r] = RepOutcome{};
        } catch (const DataError&) {
            out[r] = RepOutcome{};
        }
    });
    return out;
}

inline ResultRow summarize(const std::vector<RepOutcome>& reps, std::size_t n, double true_value) {
    ResultRow row;
    row.n = n;
    std::size_t ok = 0;
    KahanSum mean_acc;
    for (const auto& r : reps) {
        if (!r.ok) continue;
        ++ok;
        mean_acc.add(r.estimate);
    }
    row.failures = reps.size() - ok;
    if (row.failures * 100 > reps.size()) {
        throw ExperimentError("experiment aborted: more than 1% of replications failed");
    }
    if (ok == 0) throw ExperimentError("experiment aborted: every replication failed");
    row.mean_estimate = mean_acc.value() / static_cast<double>(ok);
    row.bias = row.mean_estimate - true_value;
    KahanSum var_acc, mse_acc;
    for (const auto& r : reps) {
        if (!r.ok) continue;
        const double dm = r.estimate - row.mean_estimate;
        const double dt = r.estimate - true_value;
        var_acc.add(dm * dm);
        mse_acc.add(dt * dt);
    }
    const double variance = var_acc.value() / static_cast<double>(ok);
    row.rmse = std::sqrt(mse_acc.value() / static_cast<double>(ok));
    row.scaled_variance = static_cast<double>(n) * variance;
    return row;
}

}  // namespace detail

/// Bias/RMSE decay of the chosen estimator against the quadrature oracle.
inline ExperimentResult run_consistency(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    result.true_value = true_allocation(cfg.model, cfg.weight);
    for (std::size_t n : cfg.sample_sizes) {
        const auto reps = detail::replicate(cfg, n, detail::RepExtra::None);
        result.rows.push_back(detail::summarize(reps, n, result.true_value));
    }
    return result;
}

/// Kolmogorov-Smirnov distance of sqrt(n)(estimate - truth)/sigma against the
/// standard normal, with sigma from the oracle variance.
inline ExperimentResult run_normality(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    result.true_value = true_allocation(cfg.model, cfg.weight);
    const VarianceReport oracle =
        sigma_sq_oracle(cfg.model, cfg.weight, cfg.grid_size, cfg.truncation);
    result.oracle_sigma_sq = oracle.sigma_sq;
    if (!(oracle.sigma_sq > 1e-12)) {
        throw MathError("run_normality: oracle variance is zero (degenerate model)");
    }
    const double sigma = std::sqrt(oracle.sigma_sq);
    for (std::size_t n : cfg.sample_sizes) {
        const auto reps = detail::replicate(cfg, n, detail::RepExtra::None);
        ResultRow row = detail::summarize(reps, n, result.true_value);
        std::vector<double> zs;
        zs.reserve(reps.size());
        const double root_n = std::sqrt(static_cast<double>(n));
        for (const auto& r : reps) {
            if (r.ok) zs.push_back(root_n * (r.estimate - result.true_value) / sigma);
        }
        row.ks_statistic = ks_statistic(zs);
        result.rows.push_back(row);
    }
    return result;
}

/// Fraction of replications whose normal-theory interval covers the oracle
/// truth, with the variance supplied per cfg.variance_method.
inline ExperimentResult run_coverage(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    result.true_value = true_allocation(cfg.model, cfg.weight);
    double oracle_sigma_sq = 0.0;
    detail::RepExtra extra = detail::RepExtra::None;
    switch (cfg.variance_method) {
        case VarianceMethod::Oracle:
            oracle_sigma_sq =
                sigma_sq_oracle(cfg.model, cfg.weight, cfg.grid_size, cfg.truncation).sigma_sq;
            result.oracle_sigma_sq = oracle_sigma_sq;
            break;
        case VarianceMethod::PlugIn:
            extra = detail::RepExtra::PlugInSigma;
            break;
        case VarianceMethod::Bootstrap:
            extra = detail::RepExtra::BootstrapSigma;
            break;
    }
    const double z = normal_critical_value(cfg.ci_level);
    for (std::size_t n : cfg.sample_sizes) {
        const auto reps = detail::replicate(cfg, n, extra);
        ResultRow row = detail::summarize(reps, n, result.true_value);
        std::size_t covered = 0, ok = 0;
        const double root_n = std::sqrt(static_cast<double>(n));
        for (const auto& r : reps) {
            if (!r.ok) continue;
            ++ok;
            const double s2 = cfg.variance_method == VarianceMethod::Oracle ? oracle_sigma_sq
                                                                            : r.sigma_sq;
            const double half = z * std::sqrt(s2) / root_n;
            if (r.estimate - half <= result.true_value && result.true_value <= r.estimate + half) {
                ++covered;
            }
        }
        row.coverage = static_cast<double>(covered) / static_cast<double>(ok);
        result.rows.push_back(row);
    }
    return result;
}

}  // namespace wra
