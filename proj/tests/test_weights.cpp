#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "wra/quadrature.hpp"
#include "wra/weights.hpp"

using Catch::Approx;
using namespace wra;

static const double kInf = std::numeric_limits<double>::infinity();

TEST_CASE("eval: catalog formulas", "[weights]") {
    CHECK(eval(WeightSpec::indicator(0.9), 0.95) == 1.0);
    CHECK(eval(WeightSpec::indicator(0.9), 0.9) == 0.0);  // strict inequality
    CHECK(eval(WeightSpec::indicator(0.9), 0.1) == 0.0);
    CHECK(eval(WeightSpec::proportional_hazards(2.0), 0.5) == Approx(1.0));
    // 0.5 * (0.25)^(-1/2) = 1
    CHECK(eval(WeightSpec::proportional_hazards(0.5), 0.75) == Approx(1.0));
    CHECK(eval(WeightSpec::constant(3.5), 0.42) == 3.5);
    CHECK(eval(WeightSpec::sgini(2.0), 0.5) == Approx(1.0));
}

TEST_CASE("eval: domain errors and invalid specs", "[weights]") {
    const auto w = WeightSpec::constant(1.0);
    CHECK_THROWS_AS(eval(w, 0.0), MathError);
    CHECK_THROWS_AS(eval(w, 1.0), MathError);
    CHECK_THROWS_AS(eval(w, -0.2), MathError);
    CHECK_THROWS_AS(WeightSpec::indicator(0.0), ConfigError);
    CHECK_THROWS_AS(WeightSpec::indicator(1.0), ConfigError);
    CHECK_THROWS_AS(WeightSpec::proportional_hazards(0.0), ConfigError);
    CHECK_THROWS_AS(WeightSpec::sgini(0.9), ConfigError);
    CHECK_THROWS_AS(WeightSpec::tabulated({{0.5, 1.0}}), ConfigError);
    CHECK_THROWS_AS(WeightSpec::tabulated({{0.5, 1.0}, {0.5, 2.0}}), ConfigError);
    CHECK_THROWS_AS(WeightSpec::tabulated({{0.0, 1.0}, {0.5, 2.0}}), ConfigError);
}

TEST_CASE("eval: tabulated interpolation and extrapolation", "[weights]") {
    const auto w = WeightSpec::tabulated({{0.2, 1.0}, {0.4, 2.0}, {0.8, 2.0}});
    CHECK(eval(w, 0.3) == Approx(1.5));
    CHECK(eval(w, 0.6) == Approx(2.0));
    CHECK(eval(w, 0.05) == 1.0);   // constant below the first node
    CHECK(eval(w, 0.95) == 2.0);   // constant above the last node
    CHECK(eval(w, 0.2) == Approx(1.0));
}

TEST_CASE("integral: closed forms", "[weights]") {
    CHECK(integral(WeightSpec::indicator(0.9)) == Approx(0.1).margin(1e-15));
    CHECK(integral(WeightSpec::proportional_hazards(0.7)) == 1.0);
    CHECK(integral(WeightSpec::constant(3.0)) == 3.0);
    for (double p : {0.05, 0.25, 0.5, 0.77, 0.99}) {
        CHECK(integral(WeightSpec::indicator(p)) == Approx(1.0 - p).epsilon(1e-12));
    }
}

TEST_CASE("integral: tabulated vs trapezoid value", "[weights]") {
    const auto w = WeightSpec::tabulated({{0.2, 1.0}, {0.4, 2.0}, {0.8, 2.0}});
    // piecewise linear: 0.2*1 + 0.3 (trapezoid 0.2..0.4) + 0.8 (flat) + 0.2*2
    const double expected = 0.2 * 1.0 + 0.5 * (1.0 + 2.0) * 0.2 + 2.0 * 0.4 + 0.2 * 2.0;
    // endpoint truncation at 1e-8 leaves a couple of 1e-8 of mass outside
    CHECK(integral(w) == Approx(expected).epsilon(1e-7));
}

TEST_CASE("grid_weights matches eval on the rank grid exactly", "[weights]") {
    const auto specs = {WeightSpec::indicator(0.5), WeightSpec::proportional_hazards(0.8),
                        WeightSpec::constant(2.0)};
    for (const auto& w : specs) {
        for (std::size_t n : {1u, 2u, 7u, 100u}) {
            const auto g = grid_weights(w, n);
            REQUIRE(g.size() == n);
            for (std::size_t k = 1; k <= n; ++k) {
                CHECK(g[k - 1] == eval(w, static_cast<double>(k) / static_cast<double>(n + 1)));
            }
        }
    }
}

TEST_CASE("grid_weights: strict indicator on the rank grid", "[weights]") {
    // ranks 1/4, 2/4, 3/4 against p = 0.5: the middle rank equals p and the
    // strict inequality zeroes it
    const auto g1 = grid_weights(WeightSpec::indicator(0.5), 3);
    CHECK(g1 == std::vector<double>{0.0, 0.0, 1.0});
    const auto g2 = grid_weights(WeightSpec::constant(1.0), 4);
    CHECK(g2 == std::vector<double>{1.0, 1.0, 1.0, 1.0});
    const auto g3 = grid_weights(WeightSpec::proportional_hazards(2.0), 1);
    CHECK(g3[0] == Approx(1.0));
}

TEST_CASE("normalized weight integrates to one", "[weights]") {
    for (const auto& w : {WeightSpec::indicator(0.8), WeightSpec::proportional_hazards(1.5),
                          WeightSpec::constant(4.0)}) {
        const double wint = integral(w);
        const auto r =
            integrate_open01([&](double t) { return eval(w, t) / wint; }, w.breakpoints);
        CHECK(r.converged);
        CHECK(r.value == Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("check_lq: essential supremum", "[weights][checkers]") {
    const auto rep = check_lq(WeightSpec::indicator(0.9), kInf);
    CHECK(rep.finite);
    CHECK(rep.estimate == Approx(1.0));

    // nu < 1 blows up at t -> 1; nu > 1 stays bounded by nu
    CHECK_FALSE(check_lq(WeightSpec::proportional_hazards(0.6), kInf).finite);
    const auto ph15 = check_lq(WeightSpec::proportional_hazards(1.5), kInf);
    CHECK(ph15.finite);
    CHECK(ph15.estimate == Approx(1.5).epsilon(1e-6));
}

TEST_CASE("check_lq: L2 membership of the proportional-hazards family flips at nu = 1/2",
          "[weights][checkers]") {
    // int nu^2 (1-t)^(2nu-2) dt converges iff nu > 1/2
    for (double nu : {0.55, 0.6, 0.8, 1.5}) {
        CHECK(check_lq(WeightSpec::proportional_hazards(nu), 2.0).finite);
    }
    for (double nu : {0.3, 0.4, 0.45, 0.5}) {
        CHECK_FALSE(check_lq(WeightSpec::proportional_hazards(nu), 2.0).finite);
    }
    // known norm at nu = 0.6: sqrt(nu^2/(2nu-1)) = sqrt(1.8)
    const auto rep = check_lq(WeightSpec::proportional_hazards(0.6), 2.0);
    CHECK(rep.estimate == Approx(std::sqrt(1.8)).epsilon(1e-3));
}

TEST_CASE("check_lq: power argument (squared weight)", "[weights][checkers]") {
    // w^2 in L_q with q=1 is the same integral as w in L_2 up to the root
    CHECK(check_lq(WeightSpec::proportional_hazards(0.6), 1.0, 2.0).finite);
    CHECK_FALSE(check_lq(WeightSpec::proportional_hazards(0.4), 1.0, 2.0).finite);
}

TEST_CASE("check_tail_growth: catalog cases", "[weights][checkers]") {
    const auto r1 = check_tail_growth(WeightSpec::indicator(0.5), 0.0, 0.0, 0.1);
    CHECK(r1.pass);
    CHECK(r1.constant == Approx(1.0));

    const auto r2 = check_tail_growth(WeightSpec::proportional_hazards(0.8), 0.0, 0.4, 0.05);
    CHECK(r2.pass);

    const auto r3 = check_tail_growth(WeightSpec::proportional_hazards(0.3), 0.0, 0.4, 0.05);
    CHECK_FALSE(r3.pass);
}

TEST_CASE("check_tail_growth: breakpoint inside the tail region fails with location",
          "[weights][checkers]") {
    auto w = WeightSpec::tabulated({{0.01, 0.0}, {0.03, 1.0}, {0.9, 1.0}});
    w.breakpoints = {0.02};
    const auto rep = check_tail_growth(w, 0.0, 0.0, 0.05);
    CHECK_FALSE(rep.pass);
    REQUIRE(rep.failure_location.has_value());
    CHECK(*rep.failure_location == Approx(0.02));
}

TEST_CASE("check_hoelder: catalog cases", "[weights][checkers]") {
    const auto r1 = check_hoelder(WeightSpec::constant(1.0), 1.0, 0.1);
    CHECK(r1.pass);
    CHECK(r1.constant == Approx(0.0).margin(1e-12));

    const auto r2 = check_hoelder(WeightSpec::indicator(0.5), 1.0, 0.1);
    CHECK(r2.pass);
    CHECK(r2.constant == Approx(0.0).margin(1e-12));

    const auto r3 = check_hoelder(WeightSpec::proportional_hazards(2.0), 1.0, 0.1);
    CHECK(r3.pass);
    CHECK(r3.constant == Approx(2.0).epsilon(1e-6));
}

TEST_CASE("partition: validation and segment accessors", "[weights]") {
    const auto p = PartitionSpec::make({0.0, 0.3, 0.7, 1.0}, 0.05);
    CHECK(p.segments() == 3);
    CHECK(p.open_segment(2) == std::pair<double, double>{0.3, 0.7});
    CHECK(p.enlarged_segment(1).first == 0.0);
    CHECK(p.enlarged_segment(1).second == Approx(0.35));
    CHECK(p.enlarged_segment(3).first == Approx(0.65));
    CHECK(p.enlarged_segment(3).second == 1.0);
    CHECK_THROWS_AS(PartitionSpec::make({0.0, 0.5}, 0.0), ConfigError);
    CHECK_THROWS_AS(PartitionSpec::make({0.0, 0.5, 0.5, 1.0}, 0.1), ConfigError);
    CHECK_THROWS_AS(PartitionSpec::make({0.1, 0.5, 1.0}, 0.1), ConfigError);
}

TEST_CASE("quadrature ladder flags divergent integrands", "[quadrature]") {
    // (1-t)^(-1.2) is not integrable on (0,1)
    const auto r = integrate_open01([](double t) { return std::pow(1.0 - t, -1.2); }, {});
    CHECK_FALSE(r.converged);
    // the integrable cousin converges; the truncated tail is 2*sqrt(1e-8)
    const auto r2 = integrate_open01([](double t) { return std::pow(1.0 - t, -0.5); }, {});
    CHECK(r2.converged);
    CHECK(r2.value == Approx(2.0).margin(3e-4));
}
