#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "wra/errors.hpp"

namespace wra {

/// n observations of the risk pair (X, Y), kept in arrival order.
struct PairedSample {
    std::vector<double> xs;
    std::vector<double> ys;

    PairedSample() = default;
    PairedSample(std::vector<double> x, std::vector<double> y)
        : xs(std::move(x)), ys(std::move(y)) {
        if (xs.empty()) throw DataError("paired sample: empty sample");
        if (xs.size() != ys.size()) throw DataError("paired sample: x/y length mismatch");
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
                throw DataError("paired sample: non-finite value");
            }
        }
    }

    std::size_t n() const { return xs.size(); }
};

/// The sample reordered by ascending y. x_concomitant[k] is the x that arrived
/// with y_sorted[k]; ties in y keep arrival order (stable sort).
struct ConcomitantView {
    std::vector<double> y_sorted;
    std::vector<double> x_concomitant;
    std::vector<std::size_t> permutation;  // original index of each sorted slot
};

inline ConcomitantView concomitant_order(const PairedSample& s) {
    const std::size_t n = s.n();
    ConcomitantView v;
    v.permutation.resize(n);
    std::iota(v.permutation.begin(), v.permutation.end(), std::size_t{0});
    std::stable_sort(v.permutation.begin(), v.permutation.end(),
                     [&](std::size_t a, std::size_t b) { return s.ys[a] < s.ys[b]; });
    v.y_sorted.resize(n);
    v.x_concomitant.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        v.y_sorted[k] = s.ys[v.permutation[k]];
        v.x_concomitant[k] = s.xs[v.permutation[k]];
    }
    return v;
}

}  // namespace wra
