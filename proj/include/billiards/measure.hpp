#ifndef BILLIARDS_MEASURE_HPP
#define BILLIARDS_MEASURE_HPP

#include <string>
#include <vector>

#include "billiards/maxorbit.hpp"
#include "billiards/support_curve.hpp"

namespace billiards {

/// Scan domain. AboveAlpha is the invariant band between the 4-periodic
/// curve alpha and the p-upper boundary of the cylinder; in (psi, delta)
/// coordinates that is 0 < delta < d(psi) (p decreases as delta grows).
enum class Region { Full, AboveAlpha };

/// Squared L^2[0, 2 pi] distance of h to span{1, cos, sin}; by Parseval this
/// is pi * sum_{n >= 2} (a_n^2 + b_n^2) over the real Fourier terms of h.
double d2_h_W(const SupportCurve& curve);

/// Same value by direct quadrature of the projection residual (cross-check).
double d2_h_W_quadrature(const SupportCurve& curve);

/// Squared L^2[0, pi] distance of h^2 to span{1, cos 2psi, sin 2psi}:
/// (pi/2) * sum_{n >= 6} (a_n^2 + b_n^2) over the real terms of h^2.
double d2_h2_U(const ClassCCurve& classc);
double d2_h2_U_quadrature(const ClassCCurve& classc);

/// Phase point of the 4-periodic invariant curve over the bounce angle psi:
/// the line through gamma(psi) making angle d(psi) with the tangent.
PhasePoint alpha_point(const ClassCCurve& classc, double psi,
                       Chart chart = Chart::PhiP);

/// Membership in the region between alpha and the p-upper boundary.
bool in_region_above_alpha(const ClassCCurve& classc, const PhasePoint& z);

/// Max phase-space closure defect of the 4-step orbit from alpha(psi) over
/// uniformly sampled psi; also re-checks d(psi + pi/2) = pi/2 - d(psi).
struct FourPeriodicReport {
    double max_defect = 0.0;
    double max_d_identity_error = 0.0;
    int samples = 0;
};
FourPeriodicReport verify_4periodic(const ClassCCurve& classc, int samples = 256);

/// Invariant measure d mu = (1/4) rho(psi) sin(delta) dpsi ddelta.
/// Full cylinder mass is length/2.
double total_measure(const SupportCurve& curve);
double total_measure_above_alpha(const ClassCCurve& classc);

enum class CellVerdict {
    MCandidate,
    NotM,
    Undetermined,
    BoundaryDegenerate,
    PropagationFailure,
    Collar,        // cell touches the grazing collar at delta = 0 or pi
    AlphaStraddle, // cell straddles the alpha boundary of the region
    Outside,       // cell mass entirely outside the region
};

struct ScanCell {
    double psi = 0.0, delta = 0.0;  // cell center
    CellVerdict verdict = CellVerdict::Outside;
    double margin = 0.0;
    int witness_len = 0;
    double weight = 0.0;  // measure of cell intersected with the region
};

struct ScanParams {
    int grid_w = 64, grid_h = 64;
    int horizon = 24;
    GenFun genfun = GenFun::S;
    Region region = Region::Full;
    double collar = 1e-3;        // excluded delta band at the cylinder ends
    double alpha_collar = 1e-3;  // excluded delta band around alpha
    double tol = 1e-9;           // definiteness margin tolerance
};

/// Phase-space scan: classifies each fully-interior cell at its center and
/// integrates measure weights exactly per cell. estimate() is a certified
/// lower bound for mu(Delta) up to cell-center approximation; everything
/// that could not be certified lands in the error band.
struct ScanResult {
    ScanParams params;
    std::vector<ScanCell> cells;  // row-major: i * grid_h + j
    double total = 0.0;           // measure of the scanned region
    double mass_mcand = 0.0;
    double mass_not_m = 0.0;
    double mass_undetermined = 0.0;
    double mass_degenerate = 0.0;
    double mass_propfail = 0.0;
    double mass_collar = 0.0;
    double mass_straddle = 0.0;

    double estimate() const { return mass_not_m; }
    double band() const {
        return mass_undetermined + mass_degenerate + mass_propfail +
               mass_collar + mass_straddle;
    }
};

ScanResult estimate_delta_measure(const SupportCurve& curve,
                                  const ClassCCurve* classc,
                                  const ScanParams& params);

struct BoundReport {
    std::string theorem;  // "1.3" or "1.4"
    double beta = 0.0;
    double d2 = 0.0;
    double rhs = 0.0;
    double estimate = 0.0;
    double band = 0.0;
    double total = 0.0;
    bool consistent = false;
    bool sharp = false;
    ScanParams params;
    ScanResult scan;
};

/// mu(Delta) >= pi^2 beta d^2(h, W) over the full cylinder.
BoundReport bound_report_thm13(const SupportCurve& curve, ScanParams params);

/// mu(Delta) >= (25 pi^2 / 32) beta^3 d^2(h^2, U) over the alpha band.
BoundReport bound_report_thm14(const ClassCCurve& classc, ScanParams params);

/// Both sides of the band-integral identity
///   int_A (A - B) dmu = (pi R^4 / 1024) int_0^pi (mu'')^2 - 4 (mu')^2 dpsi,
/// A = cos^2(delta) sin(delta) (h'' h^2 + 3 h h'^2), B = h h'^2 sin(delta),
/// mu(psi) = cos(2 d(psi)), quadratured independently, plus the Parseval
/// lower bound (4000 / R^4) d^2(h^2, U) for the right-hand integral.
struct Thm14Functional {
    double lhs = 0.0;           // int_A (A - B) dmu
    double rhs = 0.0;           // (pi R^4/1024) int (mu'')^2 - 4 (mu')^2
    double rel_discrepancy = 0.0;
    double rhs_integral = 0.0;  // int_0^pi (mu'')^2 - 4 (mu')^2 dpsi
    double parseval_lower = 0.0;  // (4000 / R^4) d2_h2_U
    bool parseval_ok = false;     // rhs_integral >= parseval_lower - tol
};

Thm14Functional thm14_functional(const ClassCCurve& classc);

const char* to_string(CellVerdict v);
const char* to_string(Verdict v);

}  // namespace billiards

#endif
