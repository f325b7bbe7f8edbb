#include "billiards/billiard.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace billiards {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ChordVars {
    double psi, delta, h, hp, hpp;
};

ChordVars chord_vars(const SupportCurve& curve, double phi0, double phi1) {
    ChordVars c;
    c.psi = 0.5 * (phi0 + phi1);
    c.delta = 0.5 * (phi1 - phi0);
    c.h = curve.h(c.psi, 0);
    c.hp = curve.h(c.psi, 1);
    c.hpp = curve.h(c.psi, 2);
    return c;
}

// Support-line incidence: the boundary point gamma(theta) lies on the line
// (phi, p) iff F(theta) = h cos(theta-phi) - h' sin(theta-phi) - p = 0.
// F' = -rho(theta) sin(theta-phi), so F is strictly monotone on each side of
// phi; the two roots in (phi-pi, phi+pi) are the endpoints of the chord.
double incidence(const SupportCurve& curve, double phi, double p, double theta) {
    const double xi = theta - phi;
    return curve.h(theta, 0) * std::cos(xi) - curve.h(theta, 1) * std::sin(xi) - p;
}

// Monotone Newton + bisection solve of g on [lo, hi]; g(lo) and g(hi) must
// straddle zero. dir = sign of g' on the bracket.
template <typename G, typename DG>
double solve_monotone(const G& g, const DG& dg, double lo, double hi) {
    double a = lo, b = hi;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        const double gv = g(x);
        if (std::abs(gv) < kRootTol) return x;
        if (gv < 0.0) a = x; else b = x;
        const double d = dg(x);
        double next = d != 0.0 ? x - gv / d : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::abs(next - x) < 1e-16 * (1.0 + std::abs(x))) return next;
        x = next;
    }
    return x;
}

}  // namespace

double gen_S(const SupportCurve& curve, double phi0, double phi1) {
    const auto c = chord_vars(curve, phi0, phi1);
    if (!(c.delta > 0.0 && c.delta < kPi))
        throw std::domain_error("gen_S: chord angle outside (0, pi)");
    return 2.0 * c.h * std::sin(c.delta);
}

SDerivs gen_S_derivs(const SupportCurve& curve, double phi0, double phi1) {
    const auto c = chord_vars(curve, phi0, phi1);
    if (!(c.delta > 0.0 && c.delta < kPi))
        throw std::domain_error("gen_S_derivs: chord angle outside (0, pi)");
    const double sd = std::sin(c.delta), cd = std::cos(c.delta);
    SDerivs d;
    d.value = 2.0 * c.h * sd;
    d.s1 = -(c.h * cd - c.hp * sd);
    d.s2 = c.h * cd + c.hp * sd;
    d.s11 = 0.5 * (c.hpp - c.h) * sd - c.hp * cd;
    d.s22 = 0.5 * (c.hpp - c.h) * sd + c.hp * cd;
    d.s12 = 0.5 * (c.hpp + c.h) * sd;
    return d;
}

double gen_L(const SupportCurve& curve, double s0, double s1) {
    const Vec2 p0 = curve.point(curve.psi_from_arclength(s0));
    const Vec2 p1 = curve.point(curve.psi_from_arclength(s1));
    return norm(p1 - p0);
}

LDerivs gen_L_derivs(const SupportCurve& curve, double s0, double s1) {
    const double psi0 = curve.psi_from_arclength(s0);
    const double psi1 = curve.psi_from_arclength(s1);
    const Vec2 p0 = curve.point(psi0), p1 = curve.point(psi1);
    LDerivs d;
    d.value = norm(p1 - p0);
    if (d.value <= 0.0)
        throw std::domain_error("gen_L_derivs: coincident chord endpoints");
    const Vec2 u = (1.0 / d.value) * (p1 - p0);
    const Vec2 t0 = curve.tangent(psi0), t1 = curve.tangent(psi1);
    const double sd0 = cross(t0, u), cd0 = dot(t0, u);
    const double sd1 = cross(u, t1), cd1 = dot(u, t1);
    if (sd0 <= 0.0 || sd1 <= 0.0)
        throw std::domain_error("gen_L_derivs: degenerate (tangent) chord");
    d.delta0 = std::atan2(sd0, cd0);
    d.delta1 = std::atan2(sd1, cd1);
    const double k0 = curve.curvature(psi0), k1 = curve.curvature(psi1);
    d.l11 = sd0 * sd0 / d.value - k0 * sd0;
    d.l22 = sd1 * sd1 / d.value - k1 * sd1;
    d.l12 = sd0 * sd1 / d.value;
    return d;
}

GenDerivs gen_derivs(const SupportCurve& curve, GenFun genfun, double q0, double q1) {
    if (genfun == GenFun::S) {
        const auto d = gen_S_derivs(curve, q0, q1);
        return {d.s11, d.s12, d.s22};
    }
    const auto d = gen_L_derivs(curve, q0, q1);
    return {d.l11, d.l12, d.l22};
}

MapResult map_phi(const SupportCurve& curve, const PhasePoint& z, double delta_min) {
    const double phi0 = z.q, p0 = z.r;
    // Valid lines satisfy -h(phi0+pi) < p0 < h(phi0).
    if (p0 >= curve.h(phi0, 0) || p0 <= -curve.h(phi0 + kPi, 0))
        return {{Chart::PhiP, 0.0, 0.0}, StepStatus::NoIntersection};
    const double lo = phi0 + 2.0 * delta_min;
    const double hi = phi0 + kTwoPi - 2.0 * delta_min;
    auto g = [&](double phi1) {
        const auto c = chord_vars(curve, phi0, phi1);
        return p0 - (c.h * std::cos(c.delta) - c.hp * std::sin(c.delta));
    };
    auto dg = [&](double phi1) {  // = S12 > 0
        const auto c = chord_vars(curve, phi0, phi1);
        return 0.5 * (c.hpp + c.h) * std::sin(c.delta);
    };
    if (!(g(lo) < 0.0 && g(hi) > 0.0))
        return {{Chart::PhiP, 0.0, 0.0}, StepStatus::Collar};
    const double phi1 = solve_monotone(g, dg, lo, hi);
    const double p1 = gen_S_derivs(curve, phi0, phi1).s2;
    return {{Chart::PhiP, phi1, p1}, StepStatus::Ok};
}

MapResult map_phi_inverse(const SupportCurve& curve, const PhasePoint& z,
                          double delta_min) {
    const double phi1 = z.q, p1 = z.r;
    if (p1 >= curve.h(phi1, 0) || p1 <= -curve.h(phi1 + kPi, 0))
        return {{Chart::PhiP, 0.0, 0.0}, StepStatus::NoIntersection};
    const double lo = phi1 - kTwoPi + 2.0 * delta_min;
    const double hi = phi1 - 2.0 * delta_min;
    // g = -(p1 - S2(phi0, phi1)) is increasing in phi0.
    auto g = [&](double phi0) {
        const auto c = chord_vars(curve, phi0, phi1);
        return (c.h * std::cos(c.delta) + c.hp * std::sin(c.delta)) - p1;
    };
    auto dg = [&](double phi0) {  // = S12 > 0
        const auto c = chord_vars(curve, phi0, phi1);
        return 0.5 * (c.hpp + c.h) * std::sin(c.delta);
    };
    if (!(g(lo) < 0.0 && g(hi) > 0.0))
        return {{Chart::PhiP, 0.0, 0.0}, StepStatus::Collar};
    const double phi0 = solve_monotone(g, dg, lo, hi);
    const double p0 = -gen_S_derivs(curve, phi0, phi1).s1;
    return {{Chart::PhiP, phi0, p0}, StepStatus::Ok};
}

PhasePoint to_phiP(const SupportCurve& curve, const PhasePoint& z) {
    if (z.chart == Chart::PhiP) return z;
    const double psi = curve.psi_from_arclength(z.q);
    const double delta = std::acos(std::clamp(z.r, -1.0, 1.0));
    return {Chart::PhiP, psi + delta,
            curve.h(psi, 0) * std::cos(delta) + curve.h(psi, 1) * std::sin(delta)};
}

PhasePoint to_sCos(const SupportCurve& curve, const PhasePoint& z) {
    if (z.chart == Chart::SCos) return z;
    const double phi = z.q, p = z.r;
    if (p >= curve.h(phi, 0) || p <= -curve.h(phi + kPi, 0))
        throw CurveValidationError("to_sCos: line misses the table");
    // Outgoing bounce point: root of the incidence equation in (phi - pi, phi),
    // where F is strictly increasing.
    auto g = [&](double th) { return incidence(curve, phi, p, th); };
    auto dg = [&](double th) { return -curve.rho(th) * std::sin(th - phi); };
    const double theta = solve_monotone(g, dg, phi - kPi + 1e-15, phi - 1e-15);
    const double delta = phi - theta;
    return {Chart::SCos, curve.arclength_from_psi(theta), std::cos(delta)};
}

MapResult map_s(const SupportCurve& curve, const PhasePoint& z, double delta_min) {
    const double psi0 = curve.psi_from_arclength(z.q);
    const double delta0 = std::acos(std::clamp(z.r, -1.0, 1.0));
    if (delta0 < delta_min || delta0 > kPi - delta_min)
        return {{Chart::SCos, 0.0, 0.0}, StepStatus::Collar};
    const double phi = psi0 + delta0;
    const double p = curve.h(psi0, 0) * std::cos(delta0) +
                     curve.h(psi0, 1) * std::sin(delta0);
    // Incoming bounce point: root in (phi, phi + pi), F strictly decreasing
    // there; negate to reuse the increasing-solve.
    auto g = [&](double th) { return -incidence(curve, phi, p, th); };
    auto dg = [&](double th) { return curve.rho(th) * std::sin(th - phi); };
    const double lo = phi + delta_min, hi = phi + kPi - delta_min;
    if (!(g(lo) < 0.0 && g(hi) > 0.0))
        return {{Chart::SCos, 0.0, 0.0}, StepStatus::Collar};
    const double theta1 = solve_monotone(g, dg, lo, hi);
    const double delta1 = theta1 - phi;
    return {{Chart::SCos, curve.arclength_from_psi(theta1), std::cos(delta1)},
            StepStatus::Ok};
}

MapResult map_s_inverse(const SupportCurve& curve, const PhasePoint& z,
                        double delta_min) {
    const double psi1 = curve.psi_from_arclength(z.q);
    const double delta1 = std::acos(std::clamp(z.r, -1.0, 1.0));
    if (delta1 < delta_min || delta1 > kPi - delta_min)
        return {{Chart::SCos, 0.0, 0.0}, StepStatus::Collar};
    // The incoming line of the bounce at psi1.
    const double phi = psi1 - delta1;
    const double p = curve.h(psi1, 0) * std::cos(delta1) -
                     curve.h(psi1, 1) * std::sin(delta1);
    auto g = [&](double th) { return incidence(curve, phi, p, th); };
    auto dg = [&](double th) { return -curve.rho(th) * std::sin(th - phi); };
    const double lo = phi - kPi + delta_min, hi = phi - delta_min;
    if (!(g(lo) < 0.0 && g(hi) > 0.0))
        return {{Chart::SCos, 0.0, 0.0}, StepStatus::Collar};
    const double theta0 = solve_monotone(g, dg, lo, hi);
    const double delta0 = phi - theta0;
    return {{Chart::SCos, curve.arclength_from_psi(theta0), std::cos(delta0)},
            StepStatus::Ok};
}

Mat2 dF_matrix(const SupportCurve& curve, const PhasePoint& z_scos) {
    if (z_scos.chart != Chart::SCos)
        throw std::invalid_argument("dF_matrix expects an SCos-chart point");
    const double psi = curve.psi_from_arclength(z_scos.q);
    const double delta = std::acos(std::clamp(z_scos.r, -1.0, 1.0));
    const double sd = std::sin(delta), cd = std::cos(delta);
    if (sd <= 0.0)
        throw std::domain_error("dF_matrix: degenerate at sin(delta) = 0");
    const double h = curve.h(psi, 0), hp = curve.h(psi, 1), hpp = curve.h(psi, 2);
    const double k = curve.curvature(psi);
    return {k, -1.0 / sd, k * (hp * cd + hpp * sd), (h * sd - hp * cd) / sd};
}

ConeFrame cone_frame(const SupportCurve& curve, GenFun genfun, double q_prev,
                     double q0, double q_next) {
    const auto back = gen_derivs(curve, genfun, q_prev, q0);
    const auto fwd = gen_derivs(curve, genfun, q0, q_next);
    ConeFrame f{back.h22, -fwd.h11, false};
    f.valid = f.slope_low < f.slope_high;
    return f;
}

ConeSector cone_sector(const ConeFrame& frame, const Vec2& v) {
    const double w_lo = v.y - frame.slope_low * v.x;
    const double w_hi = v.y - frame.slope_high * v.x;
    if (w_lo == 0.0 || w_hi == 0.0) return ConeSector::Boundary;
    if (w_lo > 0.0) return w_hi > 0.0 ? ConeSector::N : ConeSector::E;
    return w_hi < 0.0 ? ConeSector::S : ConeSector::W;
}

AssumptionReport check_geometric_assumption(const SupportCurve& curve,
                                            const PhasePoint& z) {
    AssumptionReport rep;
    const PhasePoint z0 = to_phiP(curve, z);
    const auto fwd = map_phi(curve, z0);
    const auto bwd = map_phi_inverse(curve, z0);
    if (fwd.status != StepStatus::Ok || bwd.status != StepStatus::Ok) {
        rep.status = fwd.status != StepStatus::Ok ? fwd.status : bwd.status;
        return rep;
    }
    const auto bwd2 = map_phi_inverse(curve, bwd.point);
    if (bwd2.status != StepStatus::Ok) {
        rep.status = bwd2.status;
        return rep;
    }
    const double phi_m2 = bwd2.point.q, phi_m1 = bwd.point.q;
    const double phi_0 = z0.q, phi_1 = fwd.point.q;

    // S side: cones from line-angle configuration, test vector dF(d/d cos delta)
    // evaluated at the outgoing bounce of z, which is the chord (phi_m1, phi_0).
    const auto cone_s = cone_frame(curve, GenFun::S, phi_m1, phi_0, phi_1);
    const double psi_b = 0.5 * (phi_m1 + phi_0);
    const double delta_b = 0.5 * (phi_0 - phi_m1);
    const double sd = std::sin(delta_b), cd = std::cos(delta_b);
    const double h = curve.h(psi_b, 0), hp = curve.h(psi_b, 1);
    const Vec2 vs{-1.0 / sd, (h * sd - hp * cd) / sd};
    rep.cone_s_valid = cone_s.valid;
    rep.sector_s = cone_sector(cone_s, vs);
    rep.margin_s = cone_s.slope_low - vs.y / vs.x;  // = rho sin(delta) / 2

    // L side: bounce-point configuration, test vector dF^{-1}(d/dp) = (1/sin, k).
    const double th_m1 = 0.5 * (phi_m2 + phi_m1);
    const double th_0 = psi_b;
    const double th_1 = 0.5 * (phi_0 + phi_1);
    const double s_m1 = curve.arclength_from_psi(th_m1);
    const double s_0 = curve.arclength_from_psi(th_0);
    const double s_1 = curve.arclength_from_psi(th_1);
    const auto cone_l = cone_frame(curve, GenFun::L, s_m1, s_0, s_1);
    const Vec2 vl{1.0 / sd, curve.curvature(th_0)};
    rep.cone_l_valid = cone_l.valid;
    rep.sector_l = cone_sector(cone_l, vl);
    rep.margin_l = vl.y / vl.x - cone_l.slope_high;  // = sin(delta)^2 / L

    rep.ok = rep.cone_s_valid && rep.cone_l_valid &&
             rep.sector_s == ConeSector::N && rep.sector_l == ConeSector::N;
    return rep;
}

}  // namespace billiards
