#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "billiards/billiard.hpp"
#include "oracles.hpp"

using namespace billiards;

namespace {

constexpr double kPi = std::numbers::pi;

SupportCurve circle() { return SupportCurve::from_h(TrigSeries::constant(1.0)); }

SupportCurve cos2_curve() {
    return SupportCurve::from_h(TrigSeries({{0, 1.0, 0.0}, {2, 0.1, 0.0}}));
}

SupportCurve ellipse_h2() {
    return SupportCurve::from_h2(TrigSeries({{0, 2.5, 0.0}, {2, 1.5, 0.0}}));
}

// A random valid phase point in the phi chart with delta in (lo, hi).
PhasePoint random_point(const SupportCurve& curve, std::mt19937_64& rng,
                        double lo = 0.2, double hi = kPi - 0.2) {
    std::uniform_real_distribution<double> upsi(0.0, 2.0 * kPi), ud(lo, hi);
    const double psi = upsi(rng), delta = ud(rng);
    return {Chart::PhiP, psi + delta,
            curve.h(psi, 0) * std::cos(delta) + curve.h(psi, 1) * std::sin(delta)};
}

}  // namespace

TEST_CASE("generating function S on the circle") {
    const SupportCurve c = circle();
    CHECK(gen_S(c, 0.0, kPi) == doctest::Approx(2.0));
    CHECK(gen_S(c, 0.0, 0.5 * kPi) == doctest::Approx(std::sqrt(2.0)));
    // circle: S equals the geometric chord length
    const PhasePoint z{Chart::PhiP, 0.3, 0.41};
    const auto next = map_phi(c, z);
    const PhasePoint zs = to_sCos(c, z);
    const double psi0 = c.psi_from_arclength(zs.q);
    const double psi1 = 0.5 * (z.q + next.point.q);
    CHECK(gen_S(c, z.q, next.point.q) ==
          doctest::Approx(norm(c.point(psi1) - c.point(psi0))).epsilon(1e-12));
}

TEST_CASE("generating function S on h = 1 + 0.1 cos 2psi") {
    CHECK(gen_S(cos2_curve(), -0.25 * kPi, 0.25 * kPi) ==
          doctest::Approx(2.0 * 1.1 * std::sin(0.25 * kPi)).epsilon(1e-14));
}

TEST_CASE("second derivatives of S: closed values and FD gate") {
    const SupportCurve c = circle();
    const auto d = gen_S_derivs(c, 0.0, kPi);
    CHECK(d.s11 == doctest::Approx(-0.5));
    CHECK(d.s22 == doctest::Approx(-0.5));
    CHECK(d.s12 == doctest::Approx(0.5));

    const auto d2 = gen_S_derivs(cos2_curve(), -0.25 * kPi, 0.25 * kPi);
    CHECK(d2.s12 == doctest::Approx(0.5 * 0.7 * std::sin(0.25 * kPi)).epsilon(1e-14));

    std::mt19937_64 rng(7);
    for (const SupportCurve& curve : {circle(), cos2_curve(), ellipse_h2()}) {
        for (int t = 0; t < 25; ++t) {
            const PhasePoint z = random_point(curve, rng);
            const auto step = map_phi(curve, z);
            REQUIRE(step.status == StepStatus::Ok);
            const double q0 = z.q, q1 = step.point.q;
            auto S = [&curve](double a, double b) { return gen_S(curve, a, b); };
            const auto sd = gen_S_derivs(curve, q0, q1);
            CHECK(sd.s11 == doctest::Approx(oracles::dxx(S, q0, q1)).epsilon(1e-5));
            CHECK(sd.s22 == doctest::Approx(oracles::dyy(S, q0, q1)).epsilon(1e-5));
            CHECK(sd.s12 == doctest::Approx(oracles::dxy(S, q0, q1)).epsilon(1e-5));
            CHECK(sd.s1 == doctest::Approx(oracles::dx(S, q0, q1)).epsilon(1e-7));
            CHECK(sd.s2 == doctest::Approx(oracles::dy(S, q0, q1)).epsilon(1e-7));
        }
    }
}

TEST_CASE("chord-length generating function and FD gate") {
    const SupportCurve c = circle();
    // quarter-arc chord on the unit circle
    const double s0 = 0.0, s1 = 0.5 * kPi;
    CHECK(gen_L(c, s0, s1) == doctest::Approx(std::sqrt(2.0)));
    const auto ld = gen_L_derivs(c, s0, s1);
    CHECK(-ld.l11 ==
          doctest::Approx(std::sin(0.25 * kPi) -
                          std::pow(std::sin(0.25 * kPi), 2) / std::sqrt(2.0))
              .epsilon(1e-13));
    CHECK(ld.delta0 == doctest::Approx(0.25 * kPi));
    CHECK(ld.delta1 == doctest::Approx(0.25 * kPi));
    // diameter chord
    const auto ldd = gen_L_derivs(c, 0.0, kPi);
    CHECK(-ldd.l11 == doctest::Approx(0.5));

    // the implementer-derived closed forms must pass the FD gate before use
    std::mt19937_64 rng(8);
    for (const SupportCurve& curve : {circle(), cos2_curve(), ellipse_h2()}) {
        for (int t = 0; t < 25; ++t) {
            const PhasePoint z = random_point(curve, rng);
            const PhasePoint zs = to_sCos(curve, z);
            const auto step = map_s(curve, zs);
            REQUIRE(step.status == StepStatus::Ok);
            const double q0 = zs.q, q1 = step.point.q;
            auto L = [&curve](double a, double b) { return gen_L(curve, a, b); };
            const auto ld2 = gen_L_derivs(curve, q0, q1);
            CHECK(ld2.l11 == doctest::Approx(oracles::dxx(L, q0, q1)).epsilon(1e-5));
            CHECK(ld2.l22 == doctest::Approx(oracles::dyy(L, q0, q1)).epsilon(1e-5));
            CHECK(ld2.l12 == doctest::Approx(oracles::dxy(L, q0, q1)).epsilon(1e-5));
            // first derivatives: -L1 = cos(delta0), L2 = cos(delta1)
            CHECK(-oracles::dx(L, q0, q1) ==
                  doctest::Approx(std::cos(ld2.delta0)).epsilon(1e-7));
            CHECK(oracles::dy(L, q0, q1) ==
                  doctest::Approx(std::cos(ld2.delta1)).epsilon(1e-7));
        }
    }
}

TEST_CASE("twist positivity on random chords") {
    std::mt19937_64 rng(9);
    for (const SupportCurve& curve : {circle(), cos2_curve(), ellipse_h2()}) {
        for (int t = 0; t < 10000; ++t) {
            const PhasePoint z = random_point(curve, rng, 0.05, kPi - 0.05);
            const auto step = map_phi(curve, z);
            REQUIRE(step.status == StepStatus::Ok);
            CHECK(gen_S_derivs(curve, z.q, step.point.q).s12 > 0.0);
        }
        for (int t = 0; t < 100; ++t) {
            const PhasePoint zs = to_sCos(curve, random_point(curve, rng));
            const auto step = map_s(curve, zs);
            REQUIRE(step.status == StepStatus::Ok);
            CHECK(gen_L_derivs(curve, zs.q, step.point.q).l12 > 0.0);
        }
    }
}

TEST_CASE("map in the phi chart: circle examples") {
    const SupportCurve c = circle();
    const auto r1 = map_phi(c, {Chart::PhiP, 0.0, 0.5});
    REQUIRE(r1.status == StepStatus::Ok);
    CHECK(r1.point.q == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-12));
    CHECK(r1.point.r == doctest::Approx(0.5).epsilon(1e-12));

    const auto r2 = map_phi(c, {Chart::PhiP, 0.0, 0.0});
    CHECK(r2.point.q == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(r2.point.r == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("momentum exactness and reversibility") {
    std::mt19937_64 rng(10);
    for (const SupportCurve& curve : {circle(), cos2_curve(), ellipse_h2()}) {
        for (int t = 0; t < 200; ++t) {
            const PhasePoint z = random_point(curve, rng);
            const auto step = map_phi(curve, z);
            REQUIRE(step.status == StepStatus::Ok);
            const auto sd = gen_S_derivs(curve, z.q, step.point.q);
            CHECK(std::abs(z.r + sd.s1) < 1e-10);
            CHECK(std::abs(step.point.r - sd.s2) < 1e-10);

            const auto back = map_phi_inverse(curve, step.point);
            REQUIRE(back.status == StepStatus::Ok);
            CHECK(std::abs(back.point.q - z.q) < 1e-10);
            CHECK(std::abs(back.point.r - z.r) < 1e-10);
        }
    }
}

TEST_CASE("circle conserves p to machine precision") {
    const SupportCurve c = circle();
    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
        const PhasePoint z = random_point(c, rng, 0.01, kPi - 0.01);
        const auto step = map_phi(c, z);
        REQUIRE(step.status == StepStatus::Ok);
        CHECK(std::abs(step.point.r - z.r) < 1e-12);
    }
}

TEST_CASE("chart transforms invert each other") {
    std::mt19937_64 rng(12);
    for (const SupportCurve& curve : {circle(), cos2_curve(), ellipse_h2()}) {
        for (int t = 0; t < 100; ++t) {
            const PhasePoint z = random_point(curve, rng, 0.05, kPi - 0.05);
            const PhasePoint round = to_phiP(curve, to_sCos(curve, z));
            CHECK(std::abs(round.q - z.q) < 1e-12);
            CHECK(std::abs(round.r - z.r) < 1e-12);
        }
    }
    CHECK_THROWS_AS(to_sCos(circle(), PhasePoint{Chart::PhiP, 0.0, 1.5}),
                    CurveValidationError);
}

TEST_CASE("map in the s chart and chart conjugation") {
    const SupportCurve c = circle();
    const auto r = map_s(c, {Chart::SCos, 0.0, 0.0});
    REQUIRE(r.status == StepStatus::Ok);
    CHECK(r.point.q == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(r.point.r == doctest::Approx(0.0).epsilon(1e-12));

    std::mt19937_64 rng(13);
    for (const SupportCurve& curve : {circle(), cos2_curve(), ellipse_h2()}) {
        for (int t = 0; t < 150; ++t) {
            const PhasePoint zs = to_sCos(curve, random_point(curve, rng));
            const auto native = map_s(curve, zs);
            REQUIRE(native.status == StepStatus::Ok);
            const PhasePoint conj =
                to_sCos(curve, map_phi(curve, to_phiP(curve, zs)).point);
            CHECK(std::abs(native.point.q - conj.q) < 1e-10);
            CHECK(std::abs(native.point.r - conj.r) < 1e-10);

            const auto back = map_s_inverse(curve, native.point);
            REQUIRE(back.status == StepStatus::Ok);
            CHECK(std::abs(back.point.q - zs.q) < 1e-10);
            CHECK(std::abs(back.point.r - zs.r) < 1e-10);
        }
    }
}

TEST_CASE("one-step solvers agree with a brute-force ray march") {
    // third route: walk the boundary, bracket the sign change of the cross
    // product with the ray direction, bisect. No generating function, no
    // incidence identity.
    std::mt19937_64 rng(16);
    for (const SupportCurve& curve : {circle(), cos2_curve(), ellipse_h2()}) {
        for (int t = 0; t < 40; ++t) {
            const PhasePoint z = random_point(curve, rng);
            const PhasePoint zs = to_sCos(curve, z);
            const double psi0 = curve.psi_from_arclength(zs.q);
            const double delta0 = std::acos(std::clamp(zs.r, -1.0, 1.0));
            const Vec2 p0 = curve.point(psi0);
            const Vec2 tangent = curve.tangent(psi0), normal = curve.normal(psi0);
            const Vec2 u{std::cos(delta0) * tangent.x - std::sin(delta0) * normal.x,
                         std::cos(delta0) * tangent.y - std::sin(delta0) * normal.y};
            auto g = [&](double tau) { return cross(u, curve.point(tau) - p0); };
            // fine march from just past the start until the sign flips
            const int steps = 4000;
            double lo = psi0 + 1e-3, hi = 0.0;
            bool found = false;
            double glo = g(lo);
            for (int k = 1; k <= steps; ++k) {
                const double tau = psi0 + 1e-3 + (2.0 * kPi - 2e-3) * k / steps;
                const double gv = g(tau);
                if (glo < 0.0 && gv >= 0.0) {
                    hi = tau;
                    found = true;
                    break;
                }
                lo = tau;
                glo = gv;
            }
            REQUIRE(found);
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                (g(mid) < 0.0 ? lo : hi) = mid;
            }
            const double tau_oracle = 0.5 * (lo + hi);

            // the chord endpoint from map_phi is the midpoint angle of the
            // consecutive line pair
            const auto stepped = map_phi(curve, to_phiP(curve, zs));
            REQUIRE(stepped.status == StepStatus::Ok);
            const double tau_map = 0.5 * (to_phiP(curve, zs).q + stepped.point.q);
            CHECK(std::abs(tau_map - tau_oracle) < 1e-9);

            // and map_s lands on the same bounce
            const auto stepped_s = map_s(curve, zs);
            REQUIRE(stepped_s.status == StepStatus::Ok);
            CHECK(std::abs(curve.psi_from_arclength(stepped_s.point.q) -
                           tau_oracle) < 1e-9);
        }
    }
}

TEST_CASE("4-periodic orbit of the class-C ellipse closes") {
    const SupportCurve e = ellipse_h2();
    const double d0 = std::asin(2.0 / std::sqrt(5.0));
    PhasePoint z{Chart::PhiP, d0, e.h(0.0, 0) * std::cos(d0)};
    const PhasePoint z0 = z;
    for (int k = 0; k < 4; ++k) {
        const auto r = map_phi(e, z);
        REQUIRE(r.status == StepStatus::Ok);
        z = r.point;
    }
    CHECK(std::abs(z.q - (z0.q + 2.0 * kPi)) < 1e-9);
    CHECK(std::abs(z.r - z0.r) < 1e-9);
}

TEST_CASE("differential of the chart change") {
    const SupportCurve c = circle();
    const Mat2 m = dF_matrix(c, {Chart::SCos, 0.0, std::cos(0.5 * kPi)});
    CHECK(m.a11 == doctest::Approx(1.0));
    CHECK(m.a12 == doctest::Approx(-1.0));
    CHECK(m.a21 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(m.a22 == doctest::Approx(1.0));

    // unimodular and orientation preserving at random points
    std::mt19937_64 rng(14);
    const SupportCurve c2 = cos2_curve();
    for (int t = 0; t < 1000; ++t) {
        const PhasePoint zs = to_sCos(c2, random_point(c2, rng));
        const double det = dF_matrix(c2, zs).det();
        CHECK(det > 0.0);
        CHECK(det == doctest::Approx(1.0).epsilon(1e-12));
    }

    // finite-difference Jacobian of F
    for (const SupportCurve& curve : {circle(), cos2_curve(), ellipse_h2()}) {
        const PhasePoint zs = to_sCos(curve, random_point(curve, rng));
        auto Fq = [&curve](double s, double y) {
            return to_phiP(curve, {Chart::SCos, s, y}).q;
        };
        auto Fr = [&curve](double s, double y) {
            return to_phiP(curve, {Chart::SCos, s, y}).r;
        };
        const Mat2 m2 = dF_matrix(curve, zs);
        CHECK(m2.a11 == doctest::Approx(oracles::dx(Fq, zs.q, zs.r)).epsilon(1e-6));
        CHECK(m2.a12 == doctest::Approx(oracles::dy(Fq, zs.q, zs.r)).epsilon(1e-6));
        CHECK(m2.a21 == doctest::Approx(oracles::dx(Fr, zs.q, zs.r)).epsilon(1e-6));
        CHECK(m2.a22 == doctest::Approx(oracles::dy(Fr, zs.q, zs.r)).epsilon(1e-6));
    }
}

TEST_CASE("cone frame on the circle") {
    const SupportCurve c = circle();
    // diameter orbit: slopes -1/2 and +1/2
    const ConeFrame f = cone_frame(c, GenFun::S, -kPi, 0.0, kPi);
    CHECK(f.valid);
    CHECK(f.slope_low == doctest::Approx(-0.5));
    CHECK(f.slope_high == doctest::Approx(0.5));
    CHECK(cone_sector(f, {0.0, 1.0}) == ConeSector::N);
    CHECK(cone_sector(f, {1.0, 0.0}) == ConeSector::E);
    CHECK(cone_sector(f, {0.0, -1.0}) == ConeSector::S);
    CHECK(cone_sector(f, {-1.0, 0.0}) == ConeSector::W);
}

TEST_CASE("geometric assumption holds with the predicted margins") {
    const SupportCurve c = circle();
    std::mt19937_64 rng(15);
    for (int t = 0; t < 50; ++t) {
        const PhasePoint z = random_point(c, rng);
        const auto rep = check_geometric_assumption(c, z);
        REQUIRE(rep.status == StepStatus::Ok);
        CHECK(rep.ok);
        // on the circle both margins are sin(delta)/2
        const PhasePoint zs = to_sCos(c, z);
        const double delta = std::acos(zs.r);
        CHECK(rep.margin_s == doctest::Approx(0.5 * std::sin(delta)).epsilon(1e-10));
        CHECK(rep.margin_l == doctest::Approx(0.5 * std::sin(delta)).epsilon(1e-10));
    }

    // margin_s equals rho sin(delta)/2 evaluated at the outgoing bounce
    const SupportCurve c2 = cos2_curve();
    for (int t = 0; t < 200; ++t) {
        const PhasePoint z = random_point(c2, rng);
        const auto rep = check_geometric_assumption(c2, z);
        REQUIRE(rep.status == StepStatus::Ok);
        CHECK(rep.ok);
        CHECK(rep.sector_s == ConeSector::N);
        CHECK(rep.sector_l == ConeSector::N);
        const PhasePoint zs = to_sCos(c2, z);
        const double psi = c2.psi_from_arclength(zs.q);
        const double delta = std::acos(zs.r);
        CHECK(rep.margin_s ==
              doctest::Approx(0.5 * c2.rho(psi) * std::sin(delta)).epsilon(1e-9));
        CHECK(rep.margin_l > 0.0);
    }
}
