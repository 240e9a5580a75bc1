#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wra/errors.hpp"
#include "wra/quadrature.hpp"

namespace wra {

enum class WeightKind { Indicator, ProportionalHazards, SGini, Constant, Tabulated };

/// A weight function w on (0,1). Catalog kinds carry one parameter; tabulated
/// weights interpolate linearly between nodes and extrapolate as constants
/// beyond the outermost nodes. At a breakpoint the kind's own formula governs
/// (the indicator uses the strict inequality t > p).
struct WeightSpec {
    WeightKind kind = WeightKind::Constant;
    double param = 1.0;  // p for Indicator, nu for ProportionalHazards/SGini, c for Constant
    std::vector<double> table_t;
    std::vector<double> table_w;
    std::vector<double> breakpoints;
    std::optional<std::array<double, 2>> tail_exponents;

    static WeightSpec indicator(double p) {
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("indicator weight: p must lie in (0,1)");
        WeightSpec w;
        w.kind = WeightKind::Indicator;
        w.param = p;
        w.breakpoints = {p};
        return w;
    }

    static WeightSpec proportional_hazards(double nu) {
        if (!(nu > 0.0)) throw ConfigError("proportional hazards weight: nu must be > 0");
        WeightSpec w;
        w.kind = WeightKind::ProportionalHazards;
        w.param = nu;
        return w;
    }

    static WeightSpec sgini(double nu) {
        if (!(nu >= 1.0)) throw ConfigError("S-Gini weight: nu must be >= 1");
        WeightSpec w;
        w.kind = WeightKind::SGini;
        w.param = nu;
        return w;
    }

    static WeightSpec constant(double c) {
        if (!std::isfinite(c)) throw ConfigError("constant weight: c must be finite");
        WeightSpec w;
        w.kind = WeightKind::Constant;
        w.param = c;
        return w;
    }

    static WeightSpec tabulated(std::vector<std::pair<double, double>> grid,
                                std::vector<double> breakpoints = {}) {
        if (grid.size() < 2) throw ConfigError("tabulated weight: need at least two grid nodes");
        WeightSpec w;
        w.kind = WeightKind::Tabulated;
        w.table_t.reserve(grid.size());
        w.table_w.reserve(grid.size());
        for (const auto& [t, v] : grid) {
            if (!(t > 0.0 && t < 1.0)) {
                throw ConfigError("tabulated weight: grid nodes must lie strictly inside (0,1)");
            }
            if (!std::isfinite(v)) throw ConfigError("tabulated weight: non-finite value");
            if (!w.table_t.empty() && !(t > w.table_t.back())) {
                throw ConfigError("tabulated weight: grid must be strictly increasing in t");
            }
            w.table_t.push_back(t);
            w.table_w.push_back(v);
        }
        w.breakpoints = std::move(breakpoints);
        w.validate_breakpoints();
        return w;
    }

    void validate_breakpoints() const {
        double prev = 0.0;
        for (double b : breakpoints) {
            if (!(b > 0.0 && b < 1.0)) {
                throw ConfigError("weight breakpoints must lie strictly inside (0,1)");
            }
            if (!(b > prev)) throw ConfigError("weight breakpoints must be strictly increasing");
            prev = b;
        }
    }
};

/// w(t) for t in the open interval (0,1).
inline double eval(const WeightSpec& w, double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw MathError("weight eval: argument must lie strictly inside (0,1)");
    }
    switch (w.kind) {
        case WeightKind::Indicator:
            return t > w.param ? 1.0 : 0.0;
        case WeightKind::ProportionalHazards:
        case WeightKind::SGini:
            return w.param * std::pow(1.0 - t, w.param - 1.0);
        case WeightKind::Constant:
            return w.param;
        case WeightKind::Tabulated: {
            if (t <= w.table_t.front()) return w.table_w.front();
            if (t >= w.table_t.back()) return w.table_w.back();
            const auto it = std::upper_bound(w.table_t.begin(), w.table_t.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - w.table_t.begin());
            const double t0 = w.table_t[i - 1], t1 = w.table_t[i];
            const double lam = (t - t0) / (t1 - t0);
            return w.table_w[i - 1] + lam * (w.table_w[i] - w.table_w[i - 1]);
        }
    }
    throw MathError("weight eval: unknown kind");
}

/// The normalizer int_0^1 w(u) du. Closed form for catalog kinds; truncated
/// adaptive quadrature for tabulated weights.
inline double integral(const WeightSpec& w) {
    switch (w.kind) {
        case WeightKind::Indicator:
            return 1.0 - w.param;
        case WeightKind::ProportionalHazards:
        case WeightKind::SGini:
            return 1.0;  // nu (1-t)^(nu-1) is a density on (0,1)
        case WeightKind::Constant:
            return w.param;
        case WeightKind::Tabulated: {
            const auto r = integrate_open01([&](double t) { return eval(w, t); }, w.breakpoints);
            if (!r.converged) throw MathError("weight integral: quadrature did not converge");
            return r.value;
        }
    }
    throw MathError("weight integral: unknown kind");
}

/// w_{k,n} = w(k/(n+1)) for k = 1..n; arguments stay inside (0,1).
inline std::vector<double> grid_weights(const WeightSpec& w, std::size_t n) {
    if (n == 0) throw MathError("grid_weights: n must be positive");
    std::vector<double> out(n);
    for (std::size_t k = 1; k <= n; ++k) {
        out[k - 1] = eval(w, static_cast<double>(k) / static_cast<double>(n + 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Numeric checkers for the regularity hypotheses. These produce evidence, not
// proofs: each report carries a grid-stability flag rather than a verdict.
// ---------------------------------------------------------------------------

struct NormReport {
    bool finite = false;
    double estimate = std::numeric_limits<double>::quiet_NaN();  // ||w^power||_q when finite
    bool grid_stable = false;
};

/// Estimates whether w^power lies in L_q, q in [1, inf]. Pass
/// q = std::numeric_limits<double>::infinity() for the essential supremum.
/// Finite q: integrates |w|^{power*q} on a shrinking-truncation ladder and
/// classifies by the decay ratio of successive endpoint increments.
inline NormReport check_lq(const WeightSpec& w, double q, double power = 1.0) {
    if (!(q >= 1.0)) throw ConfigError("check_lq: q must lie in [1, inf]");
    if (!(power >= 1.0)) throw ConfigError("check_lq: power must be >= 1");
    NormReport rep;
    if (std::isinf(q)) {
        // sup over grids pushed toward the endpoints; unbounded growth => not in L_inf.
        double prev_sup = 0.0;
        bool stable = false;
        double sup = 0.0;
        for (double tmin : {1e-3, 1e-5, 1e-7, 1e-9}) {
            sup = prev_sup;
            for (int i = 0; i <= 400; ++i) {
                const double u = std::pow(10.0, std::log10(tmin) * (1.0 - i / 400.0) +
                                                    std::log10(0.5) * (i / 400.0));
                sup = std::max({sup, std::abs(eval(w, u)), std::abs(eval(w, 1.0 - u))});
            }
            stable = prev_sup > 0.0 && sup <= prev_sup * 1.05;
            prev_sup = sup;
        }
        rep.finite = stable || sup == 0.0;
        rep.estimate = std::pow(sup, power);
        rep.grid_stable = stable;
        return rep;
    }
    const double expo = power * q;
    const auto f = [&](double t) { return std::pow(std::abs(eval(w, t)), expo); };
    QuadratureConfig cfg;
    std::vector<double> incs;
    double total = 0.0;
    {
        std::vector<double> pts{1e-3};
        for (double b : w.breakpoints) {
            if (b > 1e-3 && b < 1.0 - 1e-3) pts.push_back(b);
        }
        pts.push_back(1.0 - 1e-3);
        std::sort(pts.begin(), pts.end());
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) total += integrate(f, pts[i], pts[i + 1], cfg);
    }
    for (double eps = 1e-4; eps >= 1e-9 * 1.001; eps *= 0.1) {
        double inc = integrate(f, eps, eps * 10.0, cfg) +
                     integrate(f, 1.0 - eps * 10.0, 1.0 - eps, cfg);
        incs.push_back(inc);
        total += inc;
    }
    // Geometric decay of endpoint increments signals an integrable tail.
    const double d1 = incs[incs.size() - 2];
    const double d2 = incs[incs.size() - 1];
    const double floor_inc = std::max(1e-14, 1e-12 * std::abs(total));
    if (d2 <= floor_inc) {
        rep.finite = true;
        rep.grid_stable = true;
        rep.estimate = std::pow(total, 1.0 / q);
        return rep;
    }
    const double ratio = d2 / std::max(d1, 1e-300);
    rep.finite = ratio < 0.97;
    rep.grid_stable = incs.size() >= 3 && (d1 / std::max(incs[incs.size() - 3], 1e-300) < 0.97) == rep.finite;
    if (rep.finite) {
        const double tail = d2 * ratio / (1.0 - ratio);
        rep.estimate = std::pow(total + tail, 1.0 / q);
    } else {
        rep.estimate = std::numeric_limits<double>::infinity();
    }
    return rep;
}

struct ConditionReport {
    bool pass = false;
    double constant = std::numeric_limits<double>::quiet_NaN();
    bool grid_stable = false;
    std::optional<double> failure_location;
    std::string detail;
};

namespace detail {
inline double weight_derivative(const WeightSpec& w, double t) {
    const double h = std::max(1e-12, std::min(t, 1.0 - t) * 1e-3);
    return (eval(w, t + h) - eval(w, t - h)) / (2.0 * h);
}
}  // namespace detail

/// Endpoint growth check: on (0,eps) u (1-eps,1) both
/// t(1-t)|w'(t)| and |w(t)| must be bounded by c t^{-kappa1/2}(1-t)^{-kappa2/2}.
/// Samples log-spaced grids pushed toward the endpoints; pass requires the
/// fitted constant to stay stable as the grid reaches further out.
inline ConditionReport check_tail_growth(const WeightSpec& w, double kappa1, double kappa2,
                                         double epsilon) {
    if (!(kappa1 >= 0.0 && kappa1 < 1.0 && kappa2 >= 0.0 && kappa2 < 1.0)) {
        throw ConfigError("check_tail_growth: kappa exponents must lie in [0,1)");
    }
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw ConfigError("check_tail_growth: epsilon must lie in (0, 1/2)");
    }
    ConditionReport rep;
    for (double b : w.breakpoints) {
        if (b < epsilon || b > 1.0 - epsilon) {
            rep.pass = false;
            rep.failure_location = b;
            rep.detail = "declared breakpoint inside the tail region";
            return rep;
        }
    }
    const auto bound = [&](double t) {
        return std::pow(t, -0.5 * kappa1) * std::pow(1.0 - t, -0.5 * kappa2);
    };
    const auto ratio_at = [&](double t) {
        const double d = detail::weight_derivative(w, t);
        const double lhs = std::max(t * (1.0 - t) * std::abs(d), std::abs(eval(w, t)));
        return lhs / bound(t);
    };
    double prev_c = -1.0;
    double c = 0.0;
    bool stable = false;
    for (double level_umin : {1e-4, 1e-6, 1e-8, 1e-10}) {
        const double umin = std::min(level_umin, epsilon * 0.5);
        const int pts = 200;
        for (int i = 0; i <= pts; ++i) {
            const double lu = std::log10(umin) + (std::log10(epsilon * 0.999) - std::log10(umin)) *
                                                     (static_cast<double>(i) / pts);
            const double u = std::pow(10.0, lu);
            c = std::max({c, ratio_at(u), ratio_at(1.0 - u)});
        }
        if (prev_c > 0.0) stable = c <= prev_c * 1.10;
        prev_c = c;
    }
    rep.constant = c;
    rep.grid_stable = stable || c == 0.0;
    rep.pass = rep.grid_stable && std::isfinite(c);
    if (!rep.pass) rep.detail = "fitted constant keeps growing under grid refinement";
    return rep;
}

/// Hoelder bound |w(u)-w(v)| <= c|u-v|^r, r > 1/2, estimated on each
/// open segment between declared breakpoints intersected with (eps, 1-eps).
inline ConditionReport check_hoelder(const WeightSpec& w, double r, double epsilon) {
    if (!(r > 0.5)) throw ConfigError("check_hoelder: exponent r must exceed 1/2");
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw ConfigError("check_hoelder: epsilon must lie in (0, 1/2)");
    }
    std::vector<double> edges{epsilon};
    for (double b : w.breakpoints) {
        if (b > epsilon && b < 1.0 - epsilon) edges.push_back(b);
    }
    edges.push_back(1.0 - epsilon);

    const auto sup_on_grids = [&](int pts) {
        double c = 0.0;
        for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
            const double lo = edges[s], hi = edges[s + 1];
            const double pad = (hi - lo) * 1e-9;  // keep strictly inside the open segment
            std::vector<double> ts(static_cast<std::size_t>(pts));
            std::vector<double> ws(static_cast<std::size_t>(pts));
            for (int i = 0; i < pts; ++i) {
                ts[static_cast<std::size_t>(i)] =
                    lo + pad + (hi - lo - 2 * pad) * i / (pts - 1.0);
                ws[static_cast<std::size_t>(i)] = eval(w, ts[static_cast<std::size_t>(i)]);
            }
            for (int i = 0; i < pts; ++i) {
                for (int j = i + 1; j < pts; ++j) {
                    const auto si = static_cast<std::size_t>(i);
                    const auto sj = static_cast<std::size_t>(j);
                    c = std::max(c, std::abs(ws[sj] - ws[si]) /
                                        std::pow(ts[sj] - ts[si], r));
                }
            }
        }
        return c;
    };
    ConditionReport rep;
    const double c1 = sup_on_grids(48);
    const double c2 = sup_on_grids(96);
    rep.constant = c2;
    rep.grid_stable = c2 <= std::max(c1, 1e-12) * 1.10 + 1e-12;
    rep.pass = rep.grid_stable && std::isfinite(c2);
    if (!rep.pass) rep.detail = "Hoelder quotient keeps growing under grid refinement";
    return rep;
}

/// Interval partition 0 = a_0 < a_1 < ... < a_j = 1 with the epsilon-enlarged
/// neighbourhoods used by the segmented consistency conditions.
struct PartitionSpec {
    std::vector<double> points;  // includes both endpoints 0 and 1
    double epsilon = 0.0;

    static PartitionSpec make(std::vector<double> pts, double eps) {
        if (pts.size() < 2 || pts.front() != 0.0 || pts.back() != 1.0) {
            throw ConfigError("partition: points must run from 0 to 1");
        }
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (!(pts[i] > pts[i - 1])) throw ConfigError("partition: points must increase");
        }
        if (!(eps > 0.0)) throw ConfigError("partition: epsilon must be positive");
        PartitionSpec p;
        p.points = std::move(pts);
        p.epsilon = eps;
        return p;
    }

    std::size_t segments() const { return points.size() - 1; }

    /// A_i = (a_{i-1}, a_i), 1-based i.
    std::pair<double, double> open_segment(std::size_t i) const {
        return {points[i - 1], points[i]};
    }

    /// B_{i,eps} = (a_{i-1}-eps, a_i+eps) intersected with (0,1).
    std::pair<double, double> enlarged_segment(std::size_t i) const {
        return {std::max(points[i - 1] - epsilon, 0.0), std::min(points[i] + epsilon, 1.0)};
    }
};

}  // namespace wra
