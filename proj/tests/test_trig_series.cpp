#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "billiards/trig_series.hpp"
#include "oracles.hpp"

using billiards::TrigSeries;
using billiards::TrigTerm;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("term-wise evaluation and exact derivatives") {
    TrigSeries s({{0, 1.0, 0.0}, {2, 0.1, 0.0}});
    CHECK(s.eval(0.0, 0) == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(s.eval(0.0, 2) == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(s.eval(0.7, 1) == doctest::Approx(-0.2 * std::sin(1.4)).epsilon(1e-14));

    TrigSeries c = TrigSeries::constant(1.0);
    CHECK(c.eval(0.7, 2) == 0.0);
}

TEST_CASE("derivative() agrees with eval(order)") {
    TrigSeries s({{0, 0.3, 0.0}, {1, -0.2, 0.5}, {4, 0.05, -0.03}});
    TrigSeries d = s.derivative();
    for (double psi : {0.0, 0.3, 1.7, 4.4})
        CHECK(d.eval(psi, 0) == doctest::Approx(s.eval(psi, 1)).epsilon(1e-14));
}

TEST_CASE("derivatives match finite differences") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> coeff(-0.05, 0.05);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<TrigTerm> terms{{0, 1.0, 0.0}};
        for (int n = 1; n <= 5; ++n) terms.push_back({n, coeff(rng), coeff(rng)});
        TrigSeries s(terms);
        const double psi = rng() % 1000 / 1000.0 * 2.0 * kPi;
        auto f = [&s](double x) { return s.eval(x, 0); };
        CHECK(s.eval(psi, 1) ==
              doctest::Approx(oracles::diff1(f, psi)).epsilon(1e-6));
        CHECK(s.eval(psi, 2) ==
              doctest::Approx(oracles::diff2(f, psi)).epsilon(1e-6));
    }
}

TEST_CASE("exact antiderivative") {
    TrigSeries s({{0, 1.5, 0.0}, {3, 0.2, -0.4}});
    CHECK(s.integral0(2.0 * kPi) == doctest::Approx(3.0 * kPi).epsilon(1e-15));
    auto f = [&s](double x) { return s.eval(x, 0); };
    const double quad = oracles::integrate(f, 0.0, 1.3);
    CHECK(s.integral0(1.3) == doctest::Approx(quad).epsilon(1e-11));
}

TEST_CASE("fit recovers trig polynomials exactly") {
    TrigSeries s({{0, 0.9, 0.0}, {2, 0.07, 0.02}, {5, -0.01, 0.03}});
    auto f = [&s](double x) { return s.eval(x, 0); };
    TrigSeries fit = TrigSeries::fit(f, 8, 64);
    for (double psi : {0.1, 1.1, 2.9, 5.5})
        CHECK(fit.eval(psi) == doctest::Approx(s.eval(psi)).epsilon(1e-13));
}

TEST_CASE("fit of the ellipse support function converges geometrically") {
    auto h = [](double psi) {
        const double c = std::cos(psi), s = std::sin(psi);
        return std::sqrt(4.0 * c * c + s * s);
    };
    TrigSeries fit = TrigSeries::fit(h, 48, 1024);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double psi = 2.0 * kPi * i / 500 + 0.001;
        worst = std::max(worst, std::abs(fit.eval(psi) - h(psi)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("product expands correctly") {
    // (1 + 0.2 cos)^2 = 1.02 + 0.4 cos + 0.02 cos 2psi
    TrigSeries s({{0, 1.0, 0.0}, {1, 0.2, 0.0}});
    TrigSeries sq = s.product(s);
    for (double psi : {0.0, 0.4, 2.2}) {
        const double expect =
            1.02 + 0.4 * std::cos(psi) + 0.02 * std::cos(2.0 * psi);
        CHECK(sq.eval(psi) == doctest::Approx(expect).epsilon(1e-15));
    }
    CHECK(sq.max_degree() == 2);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(TrigSeries({{1, 0.1, 0.0}, {1, 0.2, 0.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TrigSeries({{-2, 0.1, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(TrigSeries({{0, std::nan(""), 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(TrigSeries::fit([](double) { return 1.0; }, 8, 16),
                    std::invalid_argument);
}
