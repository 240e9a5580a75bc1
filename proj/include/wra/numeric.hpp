#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "wra/errors.hpp"

namespace wra {

/// Neumaier-compensated accumulator. Weighted sums over large samples are
/// accumulated through this so results do not depend on how the optimizer
/// reassociates a plain loop.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double normal_pdf(double z) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

/// Inverse standard normal CDF: Acklam's rational approximation followed by
/// one Halley step against erfc-based normal_cdf. |error| < 1e-12 on (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw MathError("normal_quantile: probability must lie in (0,1)");
    }
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley refinement.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

/// Two-sided critical value z with P(|Z| <= z) = level.
inline double normal_critical_value(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw MathError("normal_critical_value: level must lie in (0,1)");
    }
    return normal_quantile(0.5 * (1.0 + level));
}

/// Gauss-Hermite nodes/weights for \int e^{-x^2} f(x) dx ~= sum w_i f(x_i).
/// Newton iteration on the Hermite recurrence; nodes returned ascending.
inline std::vector<std::pair<double, double>> gauss_hermite(int n) {
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const int m = (n + 1) / 2;
    std::vector<std::pair<double, double>> upper;  // nonnegative roots, descending
    upper.reserve(static_cast<std::size_t>(m));
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * upper[0].first;
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * upper[1].first;
        } else {
            z = 2.0 * z - upper[static_cast<std::size_t>(i - 2)].first;
        }
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        upper.emplace_back(z, 2.0 / (pp * pp));
    }
    const bool odd = (2 * m > n);
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) {
        out.emplace_back(-upper[static_cast<std::size_t>(i)].first,
                         upper[static_cast<std::size_t>(i)].second);
    }
    if (odd) out.back().first = 0.0;
    for (int i = odd ? m - 2 : m - 1; i >= 0; --i) {
        out.emplace_back(upper[static_cast<std::size_t>(i)].first,
                         upper[static_cast<std::size_t>(i)].second);
    }
    return out;
}

}  // namespace wra
