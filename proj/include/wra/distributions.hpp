#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wra/errors.hpp"
#include "wra/numeric.hpp"
#include "wra/quadrature.hpp"
#include "wra/rng.hpp"
#include "wra/sample.hpp"
#include "wra/weights.hpp"

namespace wra {

enum class MarginalKind { Exponential, Pareto, LogNormal, Uniform01, Normal };

/// One-dimensional marginal with a strictly increasing continuous quantile
/// function on (0,1). Pareto is the single-parameter American form
/// F(x) = 1 - (scale/x)^shape on x >= scale; shape <= 2 is constructible for
/// consistency experiments but flagged inference-unsafe (infinite variance).
struct MarginalSpec {
    MarginalKind kind = MarginalKind::Uniform01;
    double a = 0.0;  // rate / shape / mu
    double b = 0.0;  // scale / sigma

    static MarginalSpec exponential(double rate) {
        if (!(rate > 0.0)) throw ConfigError("exponential marginal: rate must be > 0");
        return {MarginalKind::Exponential, rate, 0.0};
    }
    static MarginalSpec pareto(double shape, double scale) {
        if (!(shape > 0.0 && scale > 0.0)) {
            throw ConfigError("pareto marginal: shape and scale must be > 0");
        }
        return {MarginalKind::Pareto, shape, scale};
    }
    static MarginalSpec lognormal(double mu, double sigma) {
        if (!(sigma > 0.0)) throw ConfigError("lognormal marginal: sigma must be > 0");
        return {MarginalKind::LogNormal, mu, sigma};
    }
    static MarginalSpec uniform01() { return {MarginalKind::Uniform01, 0.0, 0.0}; }
    static MarginalSpec normal(double mu, double sigma) {
        if (!(sigma > 0.0)) throw ConfigError("normal marginal: sigma must be > 0");
        return {MarginalKind::Normal, mu, sigma};
    }

    bool inference_safe() const {
        return kind != MarginalKind::Pareto || a > 2.0;
    }

    double mean() const {
        switch (kind) {
            case MarginalKind::Exponential: return 1.0 / a;
            case MarginalKind::Pareto:
                if (a <= 1.0) throw MathError("pareto marginal: mean infinite for shape <= 1");
                return a * b / (a - 1.0);
            case MarginalKind::LogNormal: return std::exp(a + 0.5 * b * b);
            case MarginalKind::Uniform01: return 0.5;
            case MarginalKind::Normal: return a;
        }
        throw MathError("marginal mean: unknown kind");
    }

    double variance() const {
        switch (kind) {
            case MarginalKind::Exponential: return 1.0 / (a * a);
            case MarginalKind::Pareto: {
                if (a <= 2.0) throw MathError("pareto marginal: variance infinite for shape <= 2");
                return b * b * a / ((a - 1.0) * (a - 1.0) * (a - 2.0));
            }
            case MarginalKind::LogNormal: {
                const double s2 = b * b;
                return (std::exp(s2) - 1.0) * std::exp(2.0 * a + s2);
            }
            case MarginalKind::Uniform01: return 1.0 / 12.0;
            case MarginalKind::Normal: return b * b;
        }
        throw MathError("marginal variance: unknown kind");
    }
};

inline double quantile(const MarginalSpec& m, double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw MathError("marginal quantile: argument must lie strictly inside (0,1)");
    }
    switch (m.kind) {
        case MarginalKind::Exponential: return -std::log1p(-t) / m.a;
        case MarginalKind::Pareto: return m.b * std::pow(1.0 - t, -1.0 / m.a);
        case MarginalKind::LogNormal: return std::exp(m.a + m.b * normal_quantile(t));
        case MarginalKind::Uniform01: return t;
        case MarginalKind::Normal: return m.a + m.b * normal_quantile(t);
    }
    throw MathError("marginal quantile: unknown kind");
}

enum class ModelKind { SelfRisk, BivariateGaussian, GaussianCopula, Independent };

/// Joint parametric model for the pair (X, Y). F_Y is continuous for every
/// catalog kind, as the inference theory requires.
struct ModelSpec {
    ModelKind kind = ModelKind::SelfRisk;
    MarginalSpec marginal_x;  // SelfRisk uses only this one
    MarginalSpec marginal_y;
    double mu_x = 0.0, mu_y = 0.0;
    double sigma_x = 1.0, sigma_y = 1.0;
    double rho = 0.0;

    static ModelSpec self_risk(MarginalSpec m) {
        ModelSpec s;
        s.kind = ModelKind::SelfRisk;
        s.marginal_x = m;
        s.marginal_y = m;
        return s;
    }
    static ModelSpec bivariate_gaussian(double muX, double muY, double sigmaX, double sigmaY,
                                        double rho) {
        if (!(sigmaX > 0.0 && sigmaY > 0.0)) {
            throw ConfigError("bivariate gaussian: sigmas must be > 0");
        }
        if (!(rho > -1.0 && rho < 1.0)) {
            throw ConfigError("bivariate gaussian: rho must lie strictly inside (-1,1)");
        }
        ModelSpec s;
        s.kind = ModelKind::BivariateGaussian;
        s.mu_x = muX;
        s.mu_y = muY;
        s.sigma_x = sigmaX;
        s.sigma_y = sigmaY;
        s.rho = rho;
        s.marginal_x = MarginalSpec::normal(muX, sigmaX);
        s.marginal_y = MarginalSpec::normal(muY, sigmaY);
        return s;
    }
    static ModelSpec gaussian_copula(MarginalSpec mx, MarginalSpec my, double rho) {
        if (!(rho > -1.0 && rho < 1.0)) {
            throw ConfigError("gaussian copula: rho must lie strictly inside (-1,1)");
        }
        ModelSpec s;
        s.kind = ModelKind::GaussianCopula;
        s.marginal_x = mx;
        s.marginal_y = my;
        s.rho = rho;
        return s;
    }
    static ModelSpec independent(MarginalSpec mx, MarginalSpec my) {
        ModelSpec s;
        s.kind = ModelKind::Independent;
        s.marginal_x = mx;
        s.marginal_y = my;
        return s;
    }
};

/// n i.i.d. pairs, bit-reproducible given (model, n, seed). The copula and
/// Gaussian kinds consume two uniforms per pair in a fixed order.
inline PairedSample sample_pairs(const ModelSpec& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DataError("sample_pairs: n must be positive");
    CounterRng rng(seed);
    std::vector<double> xs(n), ys(n);
    switch (model.kind) {
        case ModelKind::SelfRisk:
            for (std::size_t k = 0; k < n; ++k) {
                xs[k] = ys[k] = quantile(model.marginal_x, rng.next_uniform());
            }
            break;
        case ModelKind::BivariateGaussian: {
            const double root = std::sqrt(1.0 - model.rho * model.rho);
            for (std::size_t k = 0; k < n; ++k) {
                const double z2 = rng.next_normal();
                const double z1 = model.rho * z2 + root * rng.next_normal();
                ys[k] = model.mu_y + model.sigma_y * z2;
                xs[k] = model.mu_x + model.sigma_x * z1;
            }
            break;
        }
        case ModelKind::GaussianCopula: {
            const double root = std::sqrt(1.0 - model.rho * model.rho);
            for (std::size_t k = 0; k < n; ++k) {
                const double z2 = rng.next_normal();
                const double z1 = model.rho * z2 + root * rng.next_normal();
                ys[k] = quantile(model.marginal_y, normal_cdf(z2));
                xs[k] = quantile(model.marginal_x, normal_cdf(z1));
            }
            break;
        }
        case ModelKind::Independent:
            for (std::size_t k = 0; k < n; ++k) {
                xs[k] = quantile(model.marginal_x, rng.next_uniform());
                ys[k] = quantile(model.marginal_y, rng.next_uniform());
            }
            break;
    }
    return PairedSample(std::move(xs), std::move(ys));
}

namespace detail {
inline const std::vector<std::pair<double, double>>& gh64() {
    static const auto nodes = gauss_hermite(64);
    return nodes;
}

/// E[f(X) | copula normal score = z] for the Gaussian copula:
/// X = F_X^{-1}(Phi(rho z + sqrt(1-rho^2) W)), W standard normal.
template <typename F>
double copula_conditional(const ModelSpec& model, double z, const F& f) {
    const double root = std::sqrt(1.0 - model.rho * model.rho);
    const double inv_sqrt_pi = 0.5641895835477562869;
    KahanSum acc;
    for (const auto& [node, weight] : gh64()) {
        const double z1 = model.rho * z + root * M_SQRT2 * node;
        double u = normal_cdf(z1);
        u = std::min(std::max(u, 1e-300), 1.0 - 1e-16);
        acc.add(weight * f(quantile(model.marginal_x, u)));
    }
    return acc.value() * inv_sqrt_pi;
}
}  // namespace detail

/// Quantile regression curve t -> E[X | Y = F_Y^{-1}(t)].
inline double regression_curve(const ModelSpec& model, double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw MathError("regression_curve: argument must lie strictly inside (0,1)");
    }
    switch (model.kind) {
        case ModelKind::SelfRisk:
            return quantile(model.marginal_x, t);
        case ModelKind::BivariateGaussian:
            return model.mu_x + model.rho * model.sigma_x * normal_quantile(t);
        case ModelKind::GaussianCopula:
            return detail::copula_conditional(model, normal_quantile(t),
                                              [](double x) { return x; });
        case ModelKind::Independent:
            return model.marginal_x.mean();
    }
    throw MathError("regression_curve: unknown kind");
}

/// Conditional variance curve t -> Var[X | Y = F_Y^{-1}(t)].
inline double conditional_variance_curve(const ModelSpec& model, double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw MathError("conditional_variance_curve: argument must lie strictly inside (0,1)");
    }
    switch (model.kind) {
        case ModelKind::SelfRisk:
            return 0.0;
        case ModelKind::BivariateGaussian:
            return model.sigma_x * model.sigma_x * (1.0 - model.rho * model.rho);
        case ModelKind::GaussianCopula: {
            const double z = normal_quantile(t);
            const double m1 =
                detail::copula_conditional(model, z, [](double x) { return x; });
            const double m2 =
                detail::copula_conditional(model, z, [](double x) { return x * x; });
            return std::max(m2 - m1 * m1, 0.0);
        }
        case ModelKind::Independent:
            return model.marginal_x.variance();
    }
    throw MathError("conditional_variance_curve: unknown kind");
}

namespace detail {
/// int_0^1 f(t) w(t) dt. Proportional-hazards kinds are integrated after the
/// substitution u = (1-t)^nu, which absorbs the endpoint singularity exactly:
/// int f(t) nu (1-t)^(nu-1) dt = int_0^1 f(1 - u^(1/nu)) du.
template <typename F>
double integrate_against_weight(const F& f, const WeightSpec& w) {
    if (w.kind == WeightKind::ProportionalHazards || w.kind == WeightKind::SGini) {
        const double inv_nu = 1.0 / w.param;
        const auto transformed = [&](double u) { return f(1.0 - std::pow(u, inv_nu)); };
        const auto r = integrate_open01(transformed, {});
        if (!r.converged) throw MathError("true-value quadrature did not converge");
        return r.value;
    }
    const auto r = integrate_open01([&](double t) { return f(t) * eval(w, t); }, w.breakpoints);
    if (!r.converged) throw MathError("true-value quadrature did not converge");
    return r.value;
}
}  // namespace detail

/// Pi_w = int g(t) w(t) dt / int w(t) dt (F_Y continuous makes F_Y(Y) uniform).
inline double true_allocation(const ModelSpec& model, const WeightSpec& w) {
    const double wint = integral(w);
    if (wint == 0.0) throw MathError("true allocation: weight integrates to zero");
    const double num = detail::integrate_against_weight(
        [&](double t) { return regression_curve(model, t); }, w);
    return num / wint;
}

/// pi_w = int F_X^{-1}(t) w(t) dt / int w(t) dt.
inline double true_premium(const MarginalSpec& m, const WeightSpec& w) {
    const double wint = integral(w);
    if (wint == 0.0) throw MathError("true premium: weight integrates to zero");
    const double num =
        detail::integrate_against_weight([&](double t) { return quantile(m, t); }, w);
    return num / wint;
}

/// Tail-growth checker for the conditional variance curve: evidence for the
/// bound v^2(F_Y^{-1}(t)) <= c t^(-1+kappa1+delta) (1-t)^(-1+kappa2+delta)
/// on (0,eps) u (1-eps,1).
inline ConditionReport check_conditional_variance_growth(const ModelSpec& model, double kappa1,
                                                         double kappa2, double delta,
                                                         double epsilon) {
    if (!(delta > 0.0)) throw ConfigError("variance growth check: delta must be > 0");
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw ConfigError("variance growth check: epsilon must lie in (0, 1/2)");
    }
    const auto ratio_at = [&](double t) {
        const double bound = std::pow(t, -1.0 + kappa1 + delta) *
                             std::pow(1.0 - t, -1.0 + kappa2 + delta);
        return conditional_variance_curve(model, t) / bound;
    };
    ConditionReport rep;
    double prev_c = -1.0;
    double c = 0.0;
    bool stable = false;
    for (double level_umin : {1e-4, 1e-6, 1e-8}) {
        const double umin = std::min(level_umin, epsilon * 0.5);
        const int pts = 120;
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
    if (!rep.pass) rep.detail = "conditional variance outruns the permitted boundary growth";
    return rep;
}

}  // namespace wra
