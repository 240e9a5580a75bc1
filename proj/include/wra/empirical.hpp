#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wra/numeric.hpp"
#include "wra/sample.hpp"
#include "wra/weights.hpp"

namespace wra {

enum class EstimatorKind { Ratio, Simple, Premium };

inline const char* to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::Ratio: return "ratio";
        case EstimatorKind::Simple: return "simple";
        case EstimatorKind::Premium: return "premium";
    }
    return "?";
}

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;
};

struct EstimateReport {
    double estimate = 0.0;
    EstimatorKind variant = EstimatorKind::Simple;
    std::size_t n = 0;
    WeightSpec weight;
    std::optional<double> variance_estimate;
    std::optional<ConfidenceInterval> ci;
    std::map<std::string, double> diagnostics;
};

/// Rank-based empirical CDF values F_hat(y_k) = #{y_j <= y_k} / (n+1),
/// returned in the input order. The n+1 denominator keeps every value
/// strictly inside (0,1); ties share their maximal rank.
inline std::vector<double> empirical_cdf_values(const std::vector<double>& ys) {
    const std::size_t n = ys.size();
    if (n == 0) throw DataError("empirical_cdf_values: empty sample");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return ys[a] < ys[b]; });
    std::vector<double> out(n);
    std::size_t k = 0;
    while (k < n) {
        std::size_t j = k;
        while (j + 1 < n && ys[idx[j + 1]] == ys[idx[k]]) ++j;
        const double value = static_cast<double>(j + 1) / static_cast<double>(n + 1);
        for (std::size_t i = k; i <= j; ++i) out[idx[i]] = value;
        k = j + 1;
    }
    return out;
}

namespace detail {
/// sum_k x[k] * w[k] and sum_k w[k] over the given order, compensated.
inline std::pair<double, double> weighted_sums(const std::vector<double>& x,
                                               const std::vector<double>& w) {
    KahanSum num, den;
    for (std::size_t k = 0; k < x.size(); ++k) {
        num.add(x[k] * w[k]);
        den.add(w[k]);
    }
    return {num.value(), den.value()};
}
}  // namespace detail

/// Ratio estimator sum x_k w(F_hat(y_k)) / sum w(F_hat(y_k)). Sums run in
/// concomitant order so the result depends on y only through ranks.
inline EstimateReport estimate_ratio(const PairedSample& s, const WeightSpec& w) {
    const auto view = concomitant_order(s);
    const auto fhat = empirical_cdf_values(view.y_sorted);  // already sorted: max ranks
    const std::size_t n = s.n();
    std::vector<double> wv(n);
    for (std::size_t k = 0; k < n; ++k) wv[k] = eval(w, fhat[k]);
    const auto [num, den] = detail::weighted_sums(view.x_concomitant, wv);
    if (den == 0.0) {
        throw MathError("ratio estimator: weight sum vanishes on the realized ranks");
    }
    EstimateReport rep;
    rep.estimate = num / den;
    rep.variant = EstimatorKind::Ratio;
    rep.n = n;
    rep.weight = w;
    rep.diagnostics["numerator"] = num;
    rep.diagnostics["denominator"] = den;
    return rep;
}

/// (1/n) sum_k X_[k:n] w(k/(n+1)), the concomitant representation.
inline double delta_hat(const PairedSample& s, const WeightSpec& w) {
    const auto view = concomitant_order(s);
    const auto wv = grid_weights(w, s.n());
    KahanSum acc;
    for (std::size_t k = 0; k < wv.size(); ++k) acc.add(view.x_concomitant[k] * wv[k]);
    return acc.value() / static_cast<double>(s.n());
}

/// delta_hat normalized by int w; defined even when every grid weight is zero.
inline EstimateReport estimate_simple(const PairedSample& s, const WeightSpec& w) {
    const double wint = integral(w);
    if (wint == 0.0) throw MathError("simple estimator: weight integrates to zero");
    const double dh = delta_hat(s, w);
    EstimateReport rep;
    rep.estimate = dh / wint;
    rep.variant = EstimatorKind::Simple;
    rep.n = s.n();
    rep.weight = w;
    rep.diagnostics["delta_hat"] = dh;
    rep.diagnostics["w_integral"] = wint;
    return rep;
}

/// L-statistic (1/n) sum_k X_{k:n} w(k/(n+1)) / int w for a single risk.
inline EstimateReport estimate_premium(const std::vector<double>& xs, const WeightSpec& w) {
    PairedSample s(xs, xs);
    EstimateReport rep = estimate_simple(s, w);
    rep.variant = EstimatorKind::Premium;
    return rep;
}

}  // namespace wra
