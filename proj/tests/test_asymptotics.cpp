#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "wra/asymptotics.hpp"
#include "wra/distributions.hpp"
#include "wra/rng.hpp"

using Catch::Approx;
using namespace wra;

namespace {
const auto kExpSelf = ModelSpec::self_risk(MarginalSpec::exponential(1.0));
std::function<double(double)> exp_quantile_curve() {
    return [](double t) { return -std::log1p(-t); };
}
}  // namespace

TEST_CASE("sigma1_sq: closed-form cases", "[asymptotics]") {
    const auto zero = [](double) { return 0.0; };
    CHECK(sigma1_sq(zero, WeightSpec::indicator(0.9)) == 0.0);

    const auto c075 = [](double) { return 0.75; };
    CHECK(sigma1_sq(c075, WeightSpec::constant(1.0)) == Approx(0.75).epsilon(1e-6));
    CHECK(sigma1_sq(c075, WeightSpec::indicator(0.95)) == Approx(0.0375).epsilon(1e-6));
}

TEST_CASE("sigma1_sq is linear in the variance curve", "[asymptotics][property]") {
    const auto v2 = [](double t) { return 1.0 + t * t; };
    const auto v2_scaled = [](double t) { return 3.5 * (1.0 + t * t); };
    const auto w = WeightSpec::proportional_hazards(0.8);
    CHECK(sigma1_sq(v2_scaled, w) == Approx(3.5 * sigma1_sq(v2, w)).epsilon(1e-12));
}

TEST_CASE("sigma2_sq: constant regression curve gives zero", "[asymptotics]") {
    const auto flat = [](double) { return 7.0; };
    CHECK(sigma2_sq(flat, WeightSpec::indicator(0.5)) == Approx(0.0).margin(1e-15));
    CHECK(sigma2_sq(flat, WeightSpec::proportional_hazards(0.8)) == Approx(0.0).margin(1e-15));
}

TEST_CASE("sigma2_sq: closed forms against the brute-force double sum",
          "[asymptotics][oracle]") {
    // uniform self risk with unit weight: intint (min - st) ds dt = 1/12
    const auto ident = [](double t) { return t; };
    const double v = sigma2_sq(ident, WeightSpec::constant(1.0));
    CHECK(v == Approx(1.0 / 12.0).epsilon(1e-3));
    const double brute = oracles::brute_sigma2(ident, [](double) { return 1.0; }, 1e-6,
                                               1.0 - 1e-6, 3000);
    CHECK(v == Approx(brute).epsilon(1e-3));

    // exponential quantile with indicator(0.9): (1-p)(1+p) = 0.19
    const double v19 = sigma2_sq(exp_quantile_curve(), WeightSpec::indicator(0.9));
    CHECK(v19 == Approx(0.19).epsilon(1e-3));
    const double brute19 = oracles::brute_sigma2(exp_quantile_curve(),
                                                 [](double t) { return t > 0.9 ? 1.0 : 0.0; },
                                                 0.9, 1.0 - 1e-5, 4000);
    CHECK(v19 == Approx(brute19).epsilon(2e-3));
}

TEST_CASE("sigma2_sq is nonnegative on random bounded-variation curves",
          "[asymptotics][property]") {
    CounterRng rng(2718);
    for (int rep = 0; rep < 25; ++rep) {
        // random piecewise-linear curve, not necessarily monotone
        const int knots = 5 + static_cast<int>(rng.next_u64() % 5);
        std::vector<std::pair<double, double>> nodes;
        double t = 0.05;
        for (int k = 0; k < knots; ++k) {
            nodes.emplace_back(t, 2.0 * rng.next_uniform() - 1.0);
            t += 0.8 * rng.next_uniform() / knots;
        }
        const auto g = [&nodes](double u) {
            if (u <= nodes.front().first) return nodes.front().second;
            if (u >= nodes.back().first) return nodes.back().second;
            for (std::size_t i = 1; i < nodes.size(); ++i) {
                if (u <= nodes[i].first) {
                    const double lam =
                        (u - nodes[i - 1].first) / (nodes[i].first - nodes[i - 1].first);
                    return nodes[i - 1].second + lam * (nodes[i].second - nodes[i - 1].second);
                }
            }
            return nodes.back().second;
        };
        const auto w = (rep % 2 == 0) ? WeightSpec::indicator(0.5)
                                      : WeightSpec::proportional_hazards(0.9);
        CHECK(sigma2_sq(g, w, 512, 1e-6) >= -1e-12);
    }
}

TEST_CASE("sigma2_sq ignores constant shifts of the curve", "[asymptotics][property]") {
    const auto g = exp_quantile_curve();
    const auto g_shifted = [](double t) { return -std::log1p(-t) + 42.0; };
    const auto w = WeightSpec::indicator(0.9);
    // increments of g+c differ from those of g by rounding in (a+c)-(b+c)
    CHECK(sigma2_sq(g_shifted, w) == Approx(sigma2_sq(g, w)).epsilon(1e-9));
}

TEST_CASE("grid doubling moves the sigma integrals by less than 0.1%",
          "[asymptotics][property]") {
    struct Case {
        ModelSpec model;
        WeightSpec weight;
    };
    const std::vector<Case> cases = {
        {kExpSelf, WeightSpec::indicator(0.9)},
        {kExpSelf, WeightSpec::proportional_hazards(0.8)},
        {ModelSpec::bivariate_gaussian(0, 0, 1, 1, 0.5), WeightSpec::indicator(0.95)},
        {ModelSpec::self_risk(MarginalSpec::uniform01()), WeightSpec::constant(1.0)},
    };
    for (const auto& c : cases) {
        const auto r1 = sigma_sq_oracle(c.model, c.weight, 4096);
        const auto r2 = sigma_sq_oracle(c.model, c.weight, 8192);
        CHECK(r2.sigma_sq == Approx(r1.sigma_sq).epsilon(1e-3));
        if (r1.sigma2_sq > 1e-12) {
            CHECK(r2.sigma2_sq == Approx(r1.sigma2_sq).epsilon(1e-3));
        }
    }
}

TEST_CASE("sigma_sq_oracle: tail expectation variance matches (1+p)/(1-p)",
          "[asymptotics][oracle]") {
    for (double p : {0.5, 0.75, 0.9, 0.95}) {
        const auto rep = sigma_sq_oracle(kExpSelf, WeightSpec::indicator(p));
        CHECK(rep.sigma1_sq == 0.0);
        CHECK(rep.sigma_sq == Approx((1.0 + p) / (1.0 - p)).epsilon(1e-3));
        CHECK(rep.sigma_sq ==
              Approx((rep.sigma1_sq + rep.sigma2_sq) / (rep.w_integral * rep.w_integral))
                  .epsilon(1e-12));
    }
}

TEST_CASE("sigma_sq_oracle: endpoint divergence is refused", "[asymptotics]") {
    // infinite-variance pareto: the variance integrals cannot stabilize
    CHECK_THROWS_AS(sigma_sq_oracle(ModelSpec::self_risk(MarginalSpec::pareto(1.5, 1.0)),
                                    WeightSpec::indicator(0.9)),
                    MathError);
    // finite-variance pareto far enough from the boundary is certified
    CHECK(sigma_sq_oracle(ModelSpec::self_risk(MarginalSpec::pareto(3.0, 1.0)),
                          WeightSpec::indicator(0.9))
              .sigma_sq > 0.0);
}

TEST_CASE("sigma_sq_oracle: independent model with unit weight gives Var[X]",
          "[asymptotics][oracle]") {
    const auto model =
        ModelSpec::independent(MarginalSpec::exponential(2.0), MarginalSpec::uniform01());
    const auto rep = sigma_sq_oracle(model, WeightSpec::constant(1.0));
    CHECK(rep.sigma2_sq == Approx(0.0).margin(1e-12));
    CHECK(rep.sigma_sq == Approx(0.25).epsilon(1e-6));

    const auto bvn = sigma_sq_oracle(ModelSpec::bivariate_gaussian(0, 0, 1, 1, 0.0),
                                     WeightSpec::constant(1.0));
    CHECK(bvn.sigma_sq == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("plugin_curves: shapes and degenerate cases", "[asymptotics]") {
    // selfrisk: conditional variance shrinks with n
    double prev_mean_v2 = 1e9;
    for (std::size_t n : {1000u, 10000u, 100000u}) {
        const auto s = sample_pairs(kExpSelf, n, 505);
        const auto est = plugin_curves(s);
        double mean_v2 = 0.0;
        std::size_t cnt = 0;
        for (std::size_t k = n / 10; k < n - n / 10; ++k) {
            mean_v2 += est.v2_hat[k];
            ++cnt;
        }
        mean_v2 /= static_cast<double>(cnt);
        CHECK(mean_v2 < prev_mean_v2);
        prev_mean_v2 = mean_v2;
    }
    CHECK(prev_mean_v2 < 0.01);

    CHECK_THROWS_AS(plugin_curves(PairedSample({1, 2}, {1, 2})), DataError);
}

TEST_CASE("plugin_curves: independent data has a flat regression curve", "[asymptotics]") {
    const auto model =
        ModelSpec::independent(MarginalSpec::exponential(1.0), MarginalSpec::uniform01());
    const std::size_t n = 100000;
    const auto s = sample_pairs(model, n, 99);
    const auto est = plugin_curves(s);
    const double m = static_cast<double>(est.window);
    const double bound = 4.0 / std::sqrt(2.0 * m);  // 4 sd(x)/sqrt(window size)
    double mean_x = 0.0;
    for (double x : s.xs) mean_x += x;
    mean_x /= static_cast<double>(n);
    double worst = 0.0;
    for (std::size_t k = n / 20; k < n - n / 20; ++k) {
        worst = std::max(worst, std::abs(est.g_hat[k] - mean_x));
    }
    CHECK(worst < bound);
}

TEST_CASE("plugin_curves: Gaussian regression curve at t = 0.975", "[asymptotics]") {
    const auto bvn = ModelSpec::bivariate_gaussian(0, 0, 1, 1, 0.5);
    const auto s = sample_pairs(bvn, 100000, 7);
    const auto est = plugin_curves(s);
    const std::size_t k = static_cast<std::size_t>(0.975 * 100001) - 1;
    CHECK(est.g_hat[k] == Approx(0.98).margin(0.1));
}

TEST_CASE("sigma_sq_plugin: recovers the oracle at n = 1e5", "[asymptotics]") {
    const auto w = WeightSpec::indicator(0.9);
    const auto s = sample_pairs(kExpSelf, 100000, 31337);
    const auto rep = sigma_sq_plugin(s, w);
    CHECK(rep.sigma_sq == Approx(19.0).margin(2.0));
    CHECK(rep.sigma_sq ==
          Approx((rep.sigma1_sq + rep.sigma2_sq) / (rep.w_integral * rep.w_integral))
              .epsilon(1e-12));
}

TEST_CASE("sigma_sq_plugin: degenerate and moment cases", "[asymptotics]") {
    // constant x: both curves vanish
    std::vector<double> xs(300, 2.5), ys(300);
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = static_cast<double>(i);
    const auto rep = sigma_sq_plugin(PairedSample(xs, ys), WeightSpec::constant(1.0));
    CHECK(rep.sigma_sq == Approx(0.0).margin(1e-12));

    // independent model with unit weight: sigma^2 ~ Var[X]
    const auto ind =
        ModelSpec::independent(MarginalSpec::exponential(1.0), MarginalSpec::uniform01());
    const auto s = sample_pairs(ind, 100000, 2121);
    double mean = 0.0, var = 0.0;
    for (double x : s.xs) mean += x;
    mean /= static_cast<double>(s.n());
    for (double x : s.xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(s.n() - 1);
    const auto rep2 = sigma_sq_plugin(s, WeightSpec::constant(1.0));
    CHECK(rep2.sigma_sq == Approx(var).epsilon(0.10));
}

TEST_CASE("bootstrap_variance: degenerate inputs", "[asymptotics]") {
    std::vector<double> xs(64, 3.0), ys(64);
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = static_cast<double>(i);
    const auto rep = bootstrap_variance(PairedSample(xs, ys), WeightSpec::constant(1.0), 200, 9);
    CHECK(rep.sigma_sq == 0.0);

    const auto one = bootstrap_variance(PairedSample({1, 2, 3}, {1, 2, 3}),
                                        WeightSpec::constant(1.0), 1, 9);
    CHECK(one.sigma_sq == 0.0);
    CHECK(one.diagnostics.count("degenerate") == 1);
}

TEST_CASE("bootstrap_variance: tail expectation at n = 1e4", "[asymptotics][slow]") {
    // average over a few samples: a single draw of this tail functional can
    // sit 3 sigma off on its own
    double acc = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto s = sample_pairs(kExpSelf, 10000, seed);
        const auto rep = bootstrap_variance(s, WeightSpec::indicator(0.9), 400, 77);
        CHECK(rep.method == VarianceMethod::Bootstrap);
        acc += rep.sigma_sq;
    }
    CHECK(acc / 3.0 == Approx(19.0).margin(3.0));
}

TEST_CASE("bootstrap_variance is deterministic given the seed", "[asymptotics]") {
    const auto s = sample_pairs(kExpSelf, 500, 123);
    const auto a = bootstrap_variance(s, WeightSpec::indicator(0.8), 150, 42);
    const auto b = bootstrap_variance(s, WeightSpec::indicator(0.8), 150, 42);
    CHECK(a.sigma_sq == b.sigma_sq);
    const auto c = bootstrap_variance(s, WeightSpec::indicator(0.8), 150, 43);
    CHECK(a.sigma_sq != c.sigma_sq);
}

TEST_CASE("confidence_interval: constant sample gives a zero-width interval",
          "[asymptotics]") {
    std::vector<double> xs(64, 3.0), ys(64);
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = static_cast<double>(i);
    const auto rep = confidence_interval(PairedSample(xs, ys), WeightSpec::constant(1.0), 0.95,
                                         VarianceMethod::PlugIn);
    REQUIRE(rep.ci.has_value());
    CHECK(rep.ci->lower == Approx(3.0).margin(1e-9));
    CHECK(rep.ci->upper == Approx(3.0).margin(1e-9));
    CHECK(rep.ci->level == 0.95);
}

TEST_CASE("confidence_interval: levels nest on the same sample", "[asymptotics]") {
    const auto s = sample_pairs(kExpSelf, 2000, 88);
    const auto w = WeightSpec::indicator(0.8);
    const auto lo = confidence_interval(s, w, 0.5, VarianceMethod::PlugIn);
    const auto hi = confidence_interval(s, w, 0.99, VarianceMethod::PlugIn);
    REQUIRE(lo.ci.has_value());
    REQUIRE(hi.ci.has_value());
    CHECK(hi.ci->lower < lo.ci->lower);
    CHECK(hi.ci->upper > lo.ci->upper);
    CHECK(lo.ci->lower <= lo.estimate);
    CHECK(lo.estimate <= lo.ci->upper);
}

TEST_CASE("confidence_interval: level validation and small-sample guard", "[asymptotics]") {
    const auto s = sample_pairs(kExpSelf, 100, 5);
    CHECK_THROWS_AS(confidence_interval(s, WeightSpec::constant(1.0), 1.5, VarianceMethod::PlugIn),
                    ConfigError);
    CHECK_THROWS_AS(confidence_interval(s, WeightSpec::constant(1.0), 0.95,
                                        VarianceMethod::Oracle),
                    ConfigError);
    const auto tiny = sample_pairs(kExpSelf, 20, 5);
    CHECK_THROWS_AS(confidence_interval(tiny, WeightSpec::constant(1.0), 0.95,
                                        VarianceMethod::PlugIn),
                    DataError);
}
