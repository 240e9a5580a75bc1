#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "wra/errors.hpp"

namespace wra {

/// Shared quadrature tolerances. The endpoint truncation ladder handles
/// integrable singularities at 0 and 1; divergence is declared when the
/// truncated values keep growing past the 1e-6 rung.
struct QuadratureConfig {
    double abs_tol = 1e-10;
    double trunc_start = 1e-3;
    double trunc_stop = 1e-8;
    double divergence_growth = 0.01;  // relative growth allowed after 1e-6
    int max_depth = 48;
    std::size_t max_evals = 4'000'000;
};

struct IntegralResult {
    double value = 0.0;
    bool converged = true;
    double last_change = 0.0;  // relative change over the final truncation step
};

namespace detail {

// QUADPACK 15-point Kronrod rule with embedded 7-point Gauss.
inline const double kXgk[8] = {0.991455371120812639206854697526329,
                               0.949107912342758524526189684047851,
                               0.864864423359769072789712788640926,
                               0.741531185599394439863864773280788,
                               0.586087235467691130294144838258730,
                               0.405845151377397166906606412076961,
                               0.207784955007898467600689403773245,
                               0.0};
inline const double kWgk[8] = {0.022935322010529224963732008058970,
                               0.063092092629978553290700663189204,
                               0.104790010322250183839876322541518,
                               0.140653259715525918745189590510238,
                               0.169004726639267902826583426598550,
                               0.190350578064785409913256402421014,
                               0.204432940075298892414161999234649,
                               0.209482141084727828012999174891714};
inline const double kWg[4] = {0.129484966168869693270611432679082,
                              0.279705391489276667901467771423780,
                              0.381830050505118944950369775488975,
                              0.417959183673469387755102040816327};

template <typename F>
void gk15(const F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    result = resk * h;
    err = std::abs((resk - resg) * h);
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double tol, int depth,
                   const QuadratureConfig& cfg, std::size_t& evals) {
    evals += 15;
    if (evals > cfg.max_evals) {
        throw MathError("quadrature: evaluation budget exhausted (integral may diverge)");
    }
    double result = 0.0, err = 0.0;
    gk15(f, a, b, result, err);
    if (!std::isfinite(result)) {
        throw MathError("quadrature: non-finite integrand value");
    }
    if (err <= std::max(tol, 1e-16 * std::abs(result)) || depth >= cfg.max_depth) {
        return result;
    }
    const double c = 0.5 * (a + b);
    return adaptive_gk(f, a, c, 0.5 * tol, depth + 1, cfg, evals) +
           adaptive_gk(f, c, b, 0.5 * tol, depth + 1, cfg, evals);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integral of f over [a, b].
template <typename F>
double integrate(const F& f, double a, double b,
                 const QuadratureConfig& cfg = QuadratureConfig{}) {
    if (!(a < b)) return 0.0;
    std::size_t evals = 0;
    return detail::adaptive_gk(f, a, b, cfg.abs_tol, 0, cfg, evals);
}

/// Integral of f over the open interval (0,1) with splits at the given
/// interior points and the shrinking-truncation ladder at both endpoints.
template <typename F>
IntegralResult integrate_open01(const F& f, const std::vector<double>& split_points,
                                const QuadratureConfig& cfg = QuadratureConfig{}) {
    std::vector<double> splits;
    for (double s : split_points) {
        if (s > 0.0 && s < 1.0) splits.push_back(s);
    }
    std::sort(splits.begin(), splits.end());

    IntegralResult out;
    double prev = 0.0;
    bool have_prev = false;
    // Interior part between the outermost truncation bounds is integrated
    // once; subsequent rungs only add the newly uncovered endpoint slivers.
    double lo = cfg.trunc_start, hi = 1.0 - cfg.trunc_start;
    {
        std::vector<double> pts;
        pts.push_back(lo);
        for (double s : splits) {
            if (s > lo && s < hi) pts.push_back(s);
        }
        pts.push_back(hi);
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            acc += integrate(f, pts[i], pts[i + 1], cfg);
        }
        out.value = acc;
        prev = acc;
        have_prev = true;
    }
    for (double eps = cfg.trunc_start * 0.1; eps >= cfg.trunc_stop * 0.999; eps *= 0.1) {
        out.value += integrate(f, eps, eps * 10.0, cfg);
        out.value += integrate(f, 1.0 - eps * 10.0, 1.0 - eps, cfg);
        const double denom = std::max(std::abs(prev), 1e-300);
        out.last_change = std::abs(out.value - prev) / denom;
        if (eps < 1e-6 * 1.001 && have_prev && out.last_change > cfg.divergence_growth) {
            out.converged = false;
        }
        prev = out.value;
    }
    return out;
}

}  // namespace wra
