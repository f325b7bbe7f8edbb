#ifndef BILLIARDS_BILLIARD_HPP
#define BILLIARDS_BILLIARD_HPP

#include "billiards/support_curve.hpp"

namespace billiards {

/// Symplectic charts on the space of oriented lines meeting the table.
///  PhiP: (phi, p)      phi = angle of the right normal of the line,
///                      p = signed distance from the origin.
///  SCos: (s, cos delta) s = arclength of the bounce point the line leaves,
///                      delta = angle between the line and the tangent there.
/// Angle-like coordinates are kept as real lifts (not reduced mod 2*pi / length).
enum class Chart { PhiP, SCos };

struct PhasePoint {
    Chart chart = Chart::PhiP;
    double q = 0.0;  // phi or s
    double r = 0.0;  // p or cos(delta)
};

/// Which generating function drives a variational computation:
///  S(phi0, phi1) = 2 h(psi) sin(delta), psi = (phi0+phi1)/2, delta = (phi1-phi0)/2
///  L(s0, s1)     = |gamma(s1) - gamma(s0)|
/// Both satisfy the negative twist condition H12 > 0.
enum class GenFun { S, L };

/// Angle below which a chord counts as grazing; such steps are rejected
/// rather than resolved, since the map differential blows up like 1/sin(delta).
inline constexpr double kDeltaMin = 1e-4;

/// Residual tolerance of the implicit one-step solves.
inline constexpr double kRootTol = 1e-12;

enum class StepStatus {
    Ok,
    Collar,          ///< chord angle fell inside the grazing collar
    NoIntersection,  ///< line does not meet the table
};

struct MapResult {
    PhasePoint point;
    StepStatus status = StepStatus::Ok;
};

struct SDerivs {
    double value;           // S
    double s1, s2;          // first partials
    double s11, s12, s22;   // second partials
};

struct LDerivs {
    double value;           // chord length
    double l11, l12, l22;
    double delta0, delta1;  // chord angle at outgoing / incoming endpoint
};

double gen_S(const SupportCurve& curve, double phi0, double phi1);
SDerivs gen_S_derivs(const SupportCurve& curve, double phi0, double phi1);

double gen_L(const SupportCurve& curve, double s0, double s1);
LDerivs gen_L_derivs(const SupportCurve& curve, double s0, double s1);

/// Uniform access to the second partials of the selected generating function.
struct GenDerivs {
    double h11, h12, h22;
};
GenDerivs gen_derivs(const SupportCurve& curve, GenFun genfun, double q0, double q1);

/// One billiard step in the (phi, p) chart: phi1 is the unique root of
/// p0 + S1(phi0, phi1) = 0 in (phi0, phi0 + 2 pi); p1 = S2(phi0, phi1).
MapResult map_phi(const SupportCurve& curve, const PhasePoint& z,
                  double delta_min = kDeltaMin);
MapResult map_phi_inverse(const SupportCurve& curve, const PhasePoint& z,
                          double delta_min = kDeltaMin);

/// One billiard step in the (s, cos delta) chart, solved natively through the
/// support-line incidence equation (not by conjugating map_phi), so the chart
/// conjugation identity is a genuine cross-check between two solvers.
MapResult map_s(const SupportCurve& curve, const PhasePoint& z,
                double delta_min = kDeltaMin);
MapResult map_s_inverse(const SupportCurve& curve, const PhasePoint& z,
                        double delta_min = kDeltaMin);

/// Chart transforms F : (s, cos delta) -> (phi, p) and its inverse.
/// Throw CurveValidationError on points outside the phase cylinder.
PhasePoint to_phiP(const SupportCurve& curve, const PhasePoint& z);
PhasePoint to_sCos(const SupportCurve& curve, const PhasePoint& z);

struct Mat2 {
    double a11, a12, a21, a22;
    Vec2 apply(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }
    double det() const { return a11 * a22 - a12 * a21; }
};

/// Differential of F at a point in the SCos chart (delta away from 0, pi):
///   [ k(s)                          -1/sin(delta)                        ]
///   [ k(s)(h' cos(delta) + h'' sin(delta))  (h sin(delta) - h' cos(delta))/sin(delta) ]
/// Unimodular: det = k * rho = 1.
Mat2 dF_matrix(const SupportCurve& curve, const PhasePoint& z_scos);

/// Cone frame at a phase point of a configuration q_{-1}, q_0, q_1:
/// the lines with slopes H22(q_{-1}, q_0) < -H11(q_0, q_1) split the tangent
/// plane into four sectors N, E, S, W (clockwise, vertical vector in N).
struct ConeFrame {
    double slope_low;   // H22(q_prev, q0)
    double slope_high;  // -H11(q0, q_next)
    bool valid;         // slope_low < slope_high (else: certified not-m point)
};

enum class ConeSector { N, E, S, W, Boundary };

ConeFrame cone_frame(const SupportCurve& curve, GenFun genfun, double q_prev,
                     double q0, double q_next);
ConeSector cone_sector(const ConeFrame& frame, const Vec2& v);

/// Numerical check of the geometric assumption at one phase point:
/// dF(d/d cos delta) must lie in the S-cone frame's N sector and
/// dF^{-1}(d/dp) in the L-cone frame's N sector.
struct AssumptionReport {
    bool ok = false;              // both memberships hold, both cones valid
    bool cone_s_valid = false, cone_l_valid = false;
    ConeSector sector_s = ConeSector::Boundary;
    ConeSector sector_l = ConeSector::Boundary;
    double margin_s = 0.0;  // slope_low_S - b/a  (= rho sin(delta) / 2)
    double margin_l = 0.0;  // b/a - slope_high_L (= sin(delta)^2 / L)
    StepStatus status = StepStatus::Ok;  // propagation failures surface here
};

AssumptionReport check_geometric_assumption(const SupportCurve& curve,
                                            const PhasePoint& z);

}  // namespace billiards

#endif
