#ifndef BILLIARDS_MAXORBIT_HPP
#define BILLIARDS_MAXORBIT_HPP

#include <stdexcept>
#include <vector>

#include "billiards/billiard.hpp"

namespace billiards {

/// One chord of an orbit segment with the second partials of the active
/// generating function, plus chart-independent chord geometry.
struct OrbitStep {
    double h11 = 0.0, h12 = 0.0, h22 = 0.0;
    double psi = 0.0;        // bounce normal angle (S) / start normal angle (L)
    double delta_out = 0.0;  // chord angle at the outgoing endpoint
    double delta_in = 0.0;   // chord angle at the incoming endpoint
    double chord_len = 0.0;  // |gamma(end) - gamma(start)|
    double gen_value = 0.0;  // value of the generating function on the chord
};

/// Configuration lift q_lo .. q_hi with momenta and per-chord data.
/// For GenFun::S the configuration variables are line angles phi_n; for
/// GenFun::L they are bounce arclengths s_n. Both are strictly increasing
/// real lifts. steps[i] is the chord (q_{lo+i}, q_{lo+i+1}).
struct OrbitSegment {
    GenFun genfun = GenFun::S;
    int lo = 0;
    std::vector<double> q;
    std::vector<double> mom;
    std::vector<OrbitStep> steps;

    int hi() const { return lo + static_cast<int>(q.size()) - 1; }
    const double& at(int node) const { return q[node - lo]; }
    const OrbitStep& step(int node) const { return steps[node - lo]; }
};

struct SegmentBuild {
    OrbitSegment segment;
    StepStatus status = StepStatus::Ok;
    int fail_at = 0;  // node index at which propagation stopped
};

/// Extends the orbit of z (given in any chart) `back` steps backwards and
/// `fwd` steps forwards; node 0 is z itself.
SegmentBuild build_orbit_segment(const SupportCurve& curve, const PhasePoint& z,
                                 GenFun genfun, int back, int fwd,
                                 double delta_min = kDeltaMin);

/// Tridiagonal second variation of the action on the interior nodes of a
/// segment: diagonal a_n = H22(q_{n-1}, q_n) + H11(q_n, q_{n+1}), off-diagonal
/// b_n = H12(q_n, q_{n+1}). first_node is the configuration index of a[0].
struct SecondVariation {
    int first_node = 0;
    std::vector<double> a;
    std::vector<double> b;  // size a.size() - 1

    int size() const { return static_cast<int>(a.size()); }
};

SecondVariation build_second_variation(const OrbitSegment& segment);

/// Leading principal minors M_k of the second variation, kept in scaled form
/// M_k = mantissa_k * 2^exponent_k so that long segments cannot overflow.
/// ratio[k] = M_{k+1}/M_k is the LDL^T pivot sequence; min_rel_margin is the
/// smallest -ratio relative to the local entry scale (positive on strictly
/// negative definite input).
struct MinorSequence {
    std::vector<double> mantissa;
    std::vector<long> exponent;
    std::vector<int> sign;
    std::vector<double> ratio;
    double min_rel_margin = 0.0;
    int first_non_alternating = -1;  // 1-based minor index, -1 if alternating

    /// M_k as a double (k is 1-based); +-inf if out of range of double.
    double value(int k) const;
};

MinorSequence minors(const SecondVariation& sv);

enum class DefiniteVerdict { Yes, No, Undetermined };

struct DefiniteResult {
    DefiniteVerdict verdict = DefiniteVerdict::Undetermined;
    double margin = 0.0;  // min relative pivot margin seen
    int witness = 0;      // leading window size at which the test stopped
};

/// Sign-alternation test of the minors with relative tolerance tol:
/// Yes  -- every pivot r_k < -tol * scale_k,
/// No   -- some pivot r_k > +tol * scale_k (witness = its window length),
/// Undetermined -- a pivot landed inside the tolerance band.
DefiniteResult is_negative_definite(const SecondVariation& sv, double tol = 1e-9);

struct JacobiField {
    int lo = 0;
    std::vector<double> dq;
    std::vector<double> dp;  // invariant lift, same node range

    const double& at(int node) const { return dq[node - lo]; }
};

/// Propagates the discrete Jacobi equation from seeds dq(seed) = v0,
/// dq(seed+1) = v1 across the whole segment, and lifts to (dq, dp).
JacobiField jacobi_propagate(const OrbitSegment& segment, int seed_node,
                             double v0, double v1);

class SingularSystemError : public std::runtime_error {
public:
    explicit SingularSystemError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Boundary value problem xi_M = 1, xi_N = 0 solved by the tridiagonal
/// system on the interior nodes. Requires negative definiteness on the
/// window (throws SingularSystemError on a vanishing pivot).
JacobiField solve_bvp(const OrbitSegment& segment, int M, int N);

struct NuOptions {
    int first_horizon = 8;
    int max_horizon = 8192;  // horizons double up to this cap
    double tol = 1e-8;       // on the extrapolated sequence
    int plateau = 2;         // consecutive sub-tol changes required
};

/// Limit nu_1 = lim_N xi^{0,N}_1 of the boundary-value Jacobi fields.
/// The raw sequence converges like c/N on invariant-curve orbits, so the
/// doubling schedule is Richardson-extrapolated (two levels) before the
/// tolerance test.
struct NuResult {
    double nu1 = 0.0;
    bool converged = false;
    double last_change = 0.0;   // final extrapolated increment
    int horizon_used = 0;
    bool positive_field = false;  // interior of the largest BVP field positive
    std::vector<double> raw;      // xi^{0,N}_1 along the schedule
};

NuResult limit_field_nu(const OrbitSegment& segment, int base_node,
                        const NuOptions& opts = {});

/// Convenience overload that builds the forward orbit itself.
NuResult limit_field_nu(const SupportCurve& curve, const PhasePoint& z,
                        GenFun genfun, const NuOptions& opts = {});

struct OmegaResult {
    double omega = 0.0;
    double lower = 0.0;        // H22(q_{-1}, q_0)
    double upper = 0.0;        // -H11(q_0, q_1)
    bool bounds_ok = false;    // strict inequalities of the cone bound
    double dual_residual = 0.0;  // the two expressions for omega(T z)
    NuResult nu_z, nu_Tz;
    StepStatus status = StepStatus::Ok;
};

/// omega(z) = -H11(q_0, q_1) - H12(q_0, q_1) nu_1(z), with the strict bounds
/// H22(q_{-1}, q_0) < omega < -H11(q_0, q_1), and the consistency residual
/// between the forward- and backward-looking expressions for omega(T z)
/// (each using an independently computed limit field).
OmegaResult omega(const SupportCurve& curve, const PhasePoint& z,
                  GenFun genfun = GenFun::S, const NuOptions& opts = {});

enum class Verdict {
    MCandidate,
    NotM,
    Undetermined,
    BoundaryDegenerate,
    PropagationFailure,
};

struct Classification {
    Verdict verdict = Verdict::Undetermined;
    int horizon = 0;
    double margin = 0.0;
    int witness_len = 0;    // failing leading-window size for NotM
    int witness_start = 0;  // first interior node of the tested window
};

struct ClassifyOptions {
    double tol = 1e-9;
    double delta_min = kDeltaMin;
};

/// Grows the orbit to [-N-1, N+1] around z and tests the second variation of
/// the full window (whose leading minors sweep every nested sub-window):
/// MCandidate(N) on alternating signs with margin, NotM with the first
/// failing window length as a certified witness (a window that is not
/// negative definite rules out local maximality of every enclosing segment),
/// otherwise Undetermined / BoundaryDegenerate / PropagationFailure.
Classification classify(const SupportCurve& curve, const PhasePoint& z,
                        GenFun genfun, int horizon,
                        const ClassifyOptions& opts = {});

/// Dual classification of a (psi, delta) grid under both generating
/// functions. Definite verdicts (MCandidate/NotM) must agree.
struct DualCell {
    double psi = 0.0, delta = 0.0;
    Verdict s = Verdict::Undetermined, l = Verdict::Undetermined;
};

struct CrossCheckReport {
    std::vector<DualCell> cells;
    int definite_pairs = 0;   // cells where both verdicts are definite
    int agreements = 0;
    int conflicts = 0;        // definite-definite disagreements
};

CrossCheckReport cross_check_ML_MS(const SupportCurve& curve, int grid_w,
                                   int grid_h, int horizon,
                                   double collar = 1e-3,
                                   const ClassifyOptions& opts = {});

}  // namespace billiards

#endif
