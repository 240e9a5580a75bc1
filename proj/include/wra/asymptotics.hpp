#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wra/distributions.hpp"
#include "wra/empirical.hpp"
#include "wra/numeric.hpp"
#include "wra/rng.hpp"
#include "wra/sample.hpp"
#include "wra/weights.hpp"

namespace wra {

enum class VarianceMethod { Oracle, PlugIn, Bootstrap };

inline const char* to_string(VarianceMethod m) {
    switch (m) {
        case VarianceMethod::Oracle: return "oracle";
        case VarianceMethod::PlugIn: return "plugin";
        case VarianceMethod::Bootstrap: return "bootstrap";
    }
    return "?";
}

struct VarianceReport {
    double sigma1_sq = 0.0;
    double sigma2_sq = 0.0;
    double sigma_sq = 0.0;
    double w_integral = 0.0;
    VarianceMethod method = VarianceMethod::Oracle;
    std::size_t grid_size = 0;
    double truncation = 0.0;
    std::map<std::string, double> diagnostics;
};

namespace detail {

/// Cell mesh on (lo, hi): uniform interior with geometric refinement toward
/// whichever ends adjoin 0 or 1, where the integrators' curves may be
/// singular. Cell widths shrink down to roughly the truncation scale.
inline std::vector<double> graded_edges(double lo, double hi, std::size_t cells, double floor_width,
                                        bool refine_lo, bool refine_hi) {
    const std::size_t n_geo = std::max<std::size_t>(cells / 4, 8);
    // refinement needs room between the floor width and the segment
    const bool can_refine = std::min((hi - lo) * 0.1, 0.05) > 8.0 * floor_width;
    refine_lo = refine_lo && can_refine;
    refine_hi = refine_hi && can_refine;
    std::vector<double> edges;
    edges.reserve(cells + 2 * n_geo + 2);
    double inner_lo = lo, inner_hi = hi;
    std::vector<double> head, tail;
    if (refine_lo) {
        const double span = std::min((hi - lo) * 0.1, 0.05);
        const double q = std::pow(floor_width / span, 1.0 / static_cast<double>(n_geo));
        head.push_back(lo);
        for (std::size_t j = n_geo; j > 0; --j) {
            head.push_back(lo + span * std::pow(q, static_cast<double>(j - 1)));
        }
        inner_lo = lo + span;
    }
    if (refine_hi) {
        const double span = std::min((hi - lo) * 0.1, 0.05);
        const double q = std::pow(floor_width / span, 1.0 / static_cast<double>(n_geo));
        for (std::size_t j = 1; j <= n_geo; ++j) {
            tail.push_back(hi - span * std::pow(q, static_cast<double>(j - 1)));
        }
        tail.push_back(hi);
        inner_hi = hi - span;
    }
    std::size_t n_inner = cells;
    n_inner -= refine_lo ? n_geo : 0;
    n_inner -= refine_hi ? n_geo : 0;
    n_inner = std::max<std::size_t>(n_inner, 8);
    for (double e : head) edges.push_back(e);
    for (std::size_t i = edges.empty() ? 0 : 1; i <= n_inner; ++i) {
        edges.push_back(inner_lo + (inner_hi - inner_lo) * static_cast<double>(i) /
                                       static_cast<double>(n_inner));
    }
    if (edges.empty()) {
        edges.push_back(inner_lo);
        for (std::size_t i = 1; i <= n_inner; ++i) {
            edges.push_back(inner_lo + (inner_hi - inner_lo) * static_cast<double>(i) /
                                           static_cast<double>(n_inner));
        }
    }
    for (std::size_t i = tail.empty() ? 0 : 1; i < tail.size(); ++i) edges.push_back(tail[i]);
    if (!tail.empty()) edges.back() = hi;
    return edges;
}

/// Full mesh over (truncation, 1-truncation) split at the weight breakpoints,
/// cells shared roughly equally across segments.
inline std::vector<double> stieltjes_edges(const WeightSpec& w, std::size_t grid_size,
                                           double truncation) {
    const double lo = truncation, hi = 1.0 - truncation;
    std::vector<double> cuts{lo};
    for (double b : w.breakpoints) {
        if (b > lo && b < hi) cuts.push_back(b);
    }
    cuts.push_back(hi);
    const std::size_t segs = cuts.size() - 1;
    const std::size_t per = std::max<std::size_t>(grid_size / segs, 64);
    std::vector<double> edges;
    for (std::size_t s = 0; s < segs; ++s) {
        const bool refine_lo = (s == 0);
        const bool refine_hi = (s == segs - 1);
        auto part = graded_edges(cuts[s], cuts[s + 1], per, truncation, refine_lo, refine_hi);
        if (!edges.empty()) part.erase(part.begin());
        edges.insert(edges.end(), part.begin(), part.end());
    }
    return edges;
}

/// Quadratic form sum_ij a_i a_j (min(s_i,s_j) - s_i s_j) for point masses a_k
/// at sorted midpoints s_k, via suffix sums: the min-part is the integral of
/// the squared suffix-mass step function. O(m) and exact for the discrete sum.
inline double bridge_quadratic_form(const std::vector<double>& mids,
                                    const std::vector<double>& a) {
    KahanSum lin;
    double suffix = 0.0;
    std::vector<double> suffix_sq(mids.size());
    for (std::size_t k = mids.size(); k > 0; --k) {
        suffix += a[k - 1];
        suffix_sq[k - 1] = suffix * suffix;
    }
    KahanSum min_part;
    double prev = 0.0;
    for (std::size_t k = 0; k < mids.size(); ++k) {
        min_part.add(suffix_sq[k] * (mids[k] - prev));
        prev = mids[k];
        lin.add(a[k] * mids[k]);
    }
    const double l = lin.value();
    return min_part.value() - l * l;
}

}  // namespace detail

namespace detail {
inline double sigma1_sq_on_mesh(const std::function<double(double)>& v2_curve,
                                const WeightSpec& w, std::size_t grid_size, double truncation) {
    const auto edges = stieltjes_edges(w, grid_size, truncation);
    KahanSum acc;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double mid = 0.5 * (edges[k] + edges[k + 1]);
        const double wv = eval(w, mid);
        const double v = v2_curve(mid);
        if (!std::isfinite(v)) throw MathError("sigma1_sq: non-finite conditional variance");
        if (v < 0.0) throw MathError("sigma1_sq: negative conditional variance");
        acc.add(v * wv * wv * (edges[k + 1] - edges[k]));
    }
    return acc.value();
}
}  // namespace detail

/// sigma_1^2 = int v^2(t) w^2(t) dt over (truncation, 1-truncation), midpoint
/// rule on the breakpoint-split graded mesh. A probe at a 100x coarser
/// truncation flags integrands whose endpoint mass has not converged.
inline double sigma1_sq(const std::function<double(double)>& v2_curve, const WeightSpec& w,
                        std::size_t grid_size = 4096, double truncation = 1e-8) {
    if (grid_size < 100) throw ConfigError("sigma1_sq: grid_size must be >= 100");
    if (!(truncation > 0.0 && truncation <= 0.01)) {
        throw ConfigError("sigma1_sq: truncation must lie in (0, 0.01]");
    }
    const double out = detail::sigma1_sq_on_mesh(v2_curve, w, grid_size, truncation);
    if (!std::isfinite(out)) throw MathError("sigma1_sq: integral diverged");
    const double probe = detail::sigma1_sq_on_mesh(v2_curve, w, std::max<std::size_t>(grid_size / 4, 256),
                                                   std::min(truncation * 100.0, 0.01));
    if (std::abs(out - probe) > 0.10 * std::abs(out) + 1e-14) {
        throw MathError("sigma1_sq: endpoint refinement unstable (integral may diverge)");
    }
    return out;
}

namespace detail {
inline double sigma2_sq_on_mesh(const std::function<double(double)>& g_curve, const WeightSpec& w,
                                std::size_t grid_size, double truncation) {
    const auto edges = stieltjes_edges(w, grid_size, truncation);
    const std::size_t m = edges.size() - 1;
    std::vector<double> mids(m), a(m);
    double g_prev = g_curve(edges[0]);
    if (!std::isfinite(g_prev)) throw MathError("sigma2_sq: non-finite regression curve value");
    for (std::size_t k = 0; k < m; ++k) {
        const double g_next = g_curve(edges[k + 1]);
        if (!std::isfinite(g_next)) throw MathError("sigma2_sq: non-finite regression curve value");
        mids[k] = 0.5 * (edges[k] + edges[k + 1]);
        a[k] = eval(w, mids[k]) * (g_next - g_prev);
        g_prev = g_next;
    }
    return bridge_quadratic_form(mids, a);
}
}  // namespace detail

/// sigma_2^2 = intint w(s) w(t) (min(s,t) - st) dg(s) dg(t) as a discrete
/// Stieltjes sum: increments of g across mesh cells, weight at cell midpoints.
/// Nonnegative up to rounding (the kernel is positive semidefinite). A probe
/// at a 100x coarser truncation flags endpoint divergence.
inline double sigma2_sq(const std::function<double(double)>& g_curve, const WeightSpec& w,
                        std::size_t grid_size = 4096, double truncation = 1e-8) {
    if (grid_size < 100) throw ConfigError("sigma2_sq: grid_size must be >= 100");
    if (!(truncation > 0.0 && truncation <= 0.01)) {
        throw ConfigError("sigma2_sq: truncation must lie in (0, 0.01]");
    }
    const double out = detail::sigma2_sq_on_mesh(g_curve, w, grid_size, truncation);
    if (!std::isfinite(out)) throw MathError("sigma2_sq: integral diverged");
    const double probe = detail::sigma2_sq_on_mesh(g_curve, w, std::max<std::size_t>(grid_size / 4, 256),
                                                   std::min(truncation * 100.0, 0.01));
    if (std::abs(out - probe) > 0.10 * std::abs(out) + 1e-14) {
        throw MathError("sigma2_sq: endpoint refinement unstable (integral may diverge)");
    }
    return out;
}

/// sigma^2 = (sigma_1^2 + sigma_2^2) / (int w)^2 from the model's closed-form
/// curves.
inline VarianceReport sigma_sq_oracle(const ModelSpec& model, const WeightSpec& w,
                                      std::size_t grid_size = 4096, double truncation = 1e-8) {
    VarianceReport rep;
    rep.method = VarianceMethod::Oracle;
    rep.grid_size = grid_size;
    rep.truncation = truncation;
    rep.w_integral = integral(w);
    if (rep.w_integral == 0.0) throw MathError("sigma_sq_oracle: weight integrates to zero");
    rep.sigma1_sq =
        sigma1_sq([&](double t) { return conditional_variance_curve(model, t); }, w, grid_size,
                  truncation);
    rep.sigma2_sq = std::max(
        sigma2_sq([&](double t) { return regression_curve(model, t); }, w, grid_size, truncation),
        0.0);
    rep.sigma_sq = (rep.sigma1_sq + rep.sigma2_sq) / (rep.w_integral * rep.w_integral);
    return rep;
}

/// Rank-local estimates of the regression and conditional-variance curves:
/// after concomitant ordering, g_hat at t = k/(n+1) averages x over ranks
/// within [k-m, k+m] clipped to [1,n]; v2_hat is the matching local variance.
/// Default window m = ceil(sqrt(n)).
struct CurveEstimate {
    std::vector<double> grid;
    std::vector<double> g_hat;
    std::vector<double> v2_hat;
    std::size_t window = 0;
};

inline CurveEstimate plugin_curves(const PairedSample& s,
                                   std::optional<std::size_t> window = std::nullopt) {
    const std::size_t n = s.n();
    if (n < 5) throw DataError("plugin_curves: need at least 5 observations");
    const std::size_t m =
        window.value_or(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))));
    const auto view = concomitant_order(s);
    std::vector<double> cum(n + 1, 0.0), cum2(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        cum[k + 1] = cum[k] + view.x_concomitant[k];
        cum2[k + 1] = cum2[k] + view.x_concomitant[k] * view.x_concomitant[k];
    }
    CurveEstimate est;
    est.window = m;
    est.grid.resize(n);
    est.g_hat.resize(n);
    est.v2_hat.resize(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t lo = k > m ? k - m : 1;
        const std::size_t hi = std::min(k + m, n);
        const double cnt = static_cast<double>(hi - lo + 1);
        const double s1 = cum[hi] - cum[lo - 1];
        const double s2 = cum2[hi] - cum2[lo - 1];
        const double mean = s1 / cnt;
        est.grid[k - 1] = static_cast<double>(k) / static_cast<double>(n + 1);
        est.g_hat[k - 1] = mean;
        est.v2_hat[k - 1] = std::max((s2 - cnt * mean * mean) / std::max(cnt - 1.0, 1.0), 0.0);
    }
    return est;
}

/// Plug-in sigma^2: the two integrals evaluated with the estimated curves on
/// the rank grid, dropping the outer ceil(n^(1/4)) ranks on each side.
inline VarianceReport sigma_sq_plugin(const PairedSample& s, const WeightSpec& w) {
    const std::size_t n = s.n();
    const auto curves = plugin_curves(s);
    const std::size_t drop =
        static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 0.25)));
    if (n <= 2 * drop + 2) throw DataError("sigma_sq_plugin: sample too small after truncation");
    const std::size_t k_lo = drop + 1, k_hi = n - drop;  // 1-based ranks kept

    VarianceReport rep;
    rep.method = VarianceMethod::PlugIn;
    rep.grid_size = k_hi - k_lo + 1;
    rep.truncation = static_cast<double>(drop) / static_cast<double>(n + 1);
    rep.w_integral = integral(w);
    if (rep.w_integral == 0.0) throw MathError("sigma_sq_plugin: weight integrates to zero");

    KahanSum s1;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const double t = curves.grid[k - 1];
        const double wv = eval(w, t);
        s1.add(curves.v2_hat[k - 1] * wv * wv);
    }
    rep.sigma1_sq = s1.value() / static_cast<double>(n + 1);

    const std::size_t cells = k_hi - k_lo;
    std::vector<double> mids(cells), a(cells);
    for (std::size_t k = 0; k < cells; ++k) {
        const double t0 = curves.grid[k_lo - 1 + k];
        const double t1 = curves.grid[k_lo + k];
        mids[k] = 0.5 * (t0 + t1);
        a[k] = eval(w, mids[k]) * (curves.g_hat[k_lo + k] - curves.g_hat[k_lo - 1 + k]);
    }
    rep.sigma2_sq = std::max(detail::bridge_quadratic_form(mids, a), 0.0);
    rep.sigma_sq = (rep.sigma1_sq + rep.sigma2_sq) / (rep.w_integral * rep.w_integral);
    rep.diagnostics["window"] = static_cast<double>(curves.window);
    return rep;
}

/// Pair-resampling bootstrap of the simple estimator: the reported sigma_sq
/// is the variance of sqrt(n) * estimate across B resamples. Deterministic
/// given the seed; the component fields stay zero (no decomposition).
inline VarianceReport bootstrap_variance(const PairedSample& s, const WeightSpec& w,
                                         std::size_t B, std::uint64_t seed) {
    if (B < 1) throw ConfigError("bootstrap_variance: B must be >= 1");
    const std::size_t n = s.n();
    std::vector<double> estimates(B);
    std::vector<double> xs(n), ys(n);
    for (std::size_t b = 0; b < B; ++b) {
        CounterRng rng(derive_seed(seed, b));
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t j = static_cast<std::size_t>(rng.next_u64() % n);
            xs[k] = s.xs[j];
            ys[k] = s.ys[j];
        }
        estimates[b] = estimate_simple(PairedSample(xs, ys), w).estimate;
    }
    KahanSum mean_acc;
    for (double e : estimates) mean_acc.add(e);
    const double mean = mean_acc.value() / static_cast<double>(B);
    KahanSum var_acc;
    for (double e : estimates) var_acc.add((e - mean) * (e - mean));
    const double var = B > 1 ? var_acc.value() / static_cast<double>(B - 1) : 0.0;

    VarianceReport rep;
    rep.method = VarianceMethod::Bootstrap;
    rep.grid_size = B;
    rep.truncation = 0.0;
    rep.w_integral = integral(w);
    rep.sigma_sq = static_cast<double>(n) * var;
    rep.diagnostics["replicates"] = static_cast<double>(B);
    if (B == 1) rep.diagnostics["degenerate"] = 1.0;
    return rep;
}

/// Normal-theory interval around the simple estimator,
/// estimate +- z_{(1+level)/2} sigma_hat / sqrt(n).
inline EstimateReport confidence_interval(const PairedSample& s, const WeightSpec& w, double level,
                                          VarianceMethod method, std::uint64_t seed = 0,
                                          std::size_t bootstrap_replicates = 200) {
    if (!(level > 0.0 && level < 1.0)) {
        throw ConfigError("confidence_interval: level must lie in (0,1)");
    }
    if (s.n() < 30) {
        throw DataError("confidence_interval: need at least 30 observations");
    }
    EstimateReport rep = estimate_simple(s, w);
    VarianceReport var;
    switch (method) {
        case VarianceMethod::PlugIn:
            var = sigma_sq_plugin(s, w);
            break;
        case VarianceMethod::Bootstrap:
            var = bootstrap_variance(s, w, bootstrap_replicates, seed);
            break;
        case VarianceMethod::Oracle:
            throw ConfigError("confidence_interval: oracle variance needs a model, not data");
    }
    const double z = normal_critical_value(level);
    const double half = z * std::sqrt(var.sigma_sq / static_cast<double>(s.n()));
    rep.variance_estimate = var.sigma_sq;
    rep.ci = ConfidenceInterval{rep.estimate - half, rep.estimate + half, level};
    rep.diagnostics["sigma1_sq"] = var.sigma1_sq;
    rep.diagnostics["sigma2_sq"] = var.sigma2_sq;
    return rep;
}

}  // namespace wra
