#include "billiards/maxorbit.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "billiards/parallel.hpp"

namespace billiards {

namespace {

constexpr double kPi = std::numbers::pi;

OrbitStep make_step_S(const SupportCurve& curve, double phi0, double phi1) {
    OrbitStep st;
    const auto d = gen_S_derivs(curve, phi0, phi1);
    st.h11 = d.s11;
    st.h12 = d.s12;
    st.h22 = d.s22;
    st.psi = 0.5 * (phi0 + phi1);
    st.delta_out = st.delta_in = 0.5 * (phi1 - phi0);
    st.gen_value = d.value;
    st.chord_len = 0.0;  // filled lazily where needed
    return st;
}

OrbitStep make_step_L(const SupportCurve& curve, double s0, double s1) {
    OrbitStep st;
    const auto d = gen_L_derivs(curve, s0, s1);
    st.h11 = d.l11;
    st.h12 = d.l12;
    st.h22 = d.l22;
    st.psi = curve.psi_from_arclength(s0);
    st.delta_out = d.delta0;
    st.delta_in = d.delta1;
    st.chord_len = d.value;
    st.gen_value = d.value;
    return st;
}

}  // namespace

SegmentBuild build_orbit_segment(const SupportCurve& curve, const PhasePoint& z,
                                 GenFun genfun, int back, int fwd,
                                 double delta_min) {
    SegmentBuild out;
    OrbitSegment& seg = out.segment;
    seg.genfun = genfun;
    seg.lo = -back;
    const int n = back + fwd + 1;
    seg.q.resize(n);
    seg.mom.resize(n);

    const bool use_s_chart = genfun == GenFun::L;
    PhasePoint z0 = use_s_chart ? to_sCos(curve, z) : to_phiP(curve, z);
    seg.q[back] = z0.q;
    seg.mom[back] = z0.r;

    PhasePoint cur = z0;
    for (int k = 1; k <= fwd; ++k) {
        const MapResult r = use_s_chart ? map_s(curve, cur, delta_min)
                                        : map_phi(curve, cur, delta_min);
        if (r.status != StepStatus::Ok) {
            out.status = r.status;
            out.fail_at = k - 1;
            return out;
        }
        cur = r.point;
        seg.q[back + k] = cur.q;
        seg.mom[back + k] = cur.r;
    }
    cur = z0;
    for (int k = 1; k <= back; ++k) {
        const MapResult r = use_s_chart ? map_s_inverse(curve, cur, delta_min)
                                        : map_phi_inverse(curve, cur, delta_min);
        if (r.status != StepStatus::Ok) {
            out.status = r.status;
            out.fail_at = -(k - 1);
            return out;
        }
        cur = r.point;
        seg.q[back - k] = cur.q;
        seg.mom[back - k] = cur.r;
    }

    seg.steps.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i)
        seg.steps[i] = genfun == GenFun::S
                           ? make_step_S(curve, seg.q[i], seg.q[i + 1])
                           : make_step_L(curve, seg.q[i], seg.q[i + 1]);
    return out;
}

SecondVariation build_second_variation(const OrbitSegment& segment) {
    const int n = static_cast<int>(segment.q.size());
    if (n < 3)
        throw std::invalid_argument("second variation needs at least 3 nodes");
    SecondVariation sv;
    sv.first_node = segment.lo + 1;
    sv.a.resize(n - 2);
    sv.b.resize(n - 3);
    for (int j = 0; j + 2 < n; ++j) {
        sv.a[j] = segment.steps[j].h22 + segment.steps[j + 1].h11;
        if (j < n - 3) sv.b[j] = segment.steps[j + 1].h12;
    }
    return sv;
}

double MinorSequence::value(int k) const {
    const int i = k - 1;
    if (i < 0 || i >= static_cast<int>(mantissa.size())) return 0.0;
    return std::ldexp(mantissa[i], static_cast<int>(exponent[i]));
}

MinorSequence minors(const SecondVariation& sv) {
    MinorSequence ms;
    const int m = sv.size();
    ms.mantissa.resize(m);
    ms.exponent.resize(m);
    ms.sign.resize(m);
    ms.ratio.resize(m);
    ms.min_rel_margin = 1e300;

    // M_k = mant * 2^exp, recursion M_{k+1} = a_{k+1} M_k - b_k^2 M_{k-1};
    // the scaled form never overflows and never divides.
    double m_prev = 1.0;  // M_0 = 1
    long e_prev = 0;
    double m_cur = 0.0;
    long e_cur = 0;
    for (int k = 0; k < m; ++k) {
        double t;
        long e_base;
        if (k == 0) {
            t = sv.a[0] * m_prev;
            e_base = e_prev;
        } else {
            const double b2 = sv.b[k - 1] * sv.b[k - 1];
            t = sv.a[k] * m_cur -
                b2 * std::ldexp(m_prev, static_cast<int>(e_prev - e_cur));
            e_base = e_cur;
        }
        const double denom_mant = k == 0 ? m_prev : m_cur;
        ms.ratio[k] = denom_mant != 0.0 ? t / denom_mant
                                        : std::numeric_limits<double>::infinity();
        int sh = 0;
        double mant = std::frexp(t, &sh);
        long e_new = e_base + sh;
        if (t == 0.0) { mant = 0.0; e_new = 0; }
        m_prev = (k == 0) ? 1.0 : m_cur;
        e_prev = (k == 0) ? 0 : e_cur;
        m_cur = mant;
        e_cur = e_new;
        ms.mantissa[k] = mant;
        ms.exponent[k] = e_new;
        ms.sign[k] = mant > 0.0 ? 1 : (mant < 0.0 ? -1 : 0);

        const double scale =
            std::abs(sv.a[k]) +
            (k > 0 ? sv.b[k - 1] * sv.b[k - 1] /
                         std::max(std::abs(ms.ratio[k - 1]), 1e-300)
                   : 0.0);
        const double margin = -ms.ratio[k] / std::max(scale, 1e-300);
        ms.min_rel_margin = std::min(ms.min_rel_margin, margin);
        const int expect = (k % 2 == 0) ? -1 : 1;  // sign(M_k) = (-1)^k, k>=1
        if (ms.first_non_alternating < 0 && ms.sign[k] != expect)
            ms.first_non_alternating = k + 1;
    }
    return ms;
}

DefiniteResult is_negative_definite(const SecondVariation& sv, double tol) {
    DefiniteResult res;
    const int m = sv.size();
    double r = 0.0;
    double min_margin = 1e300;
    for (int k = 0; k < m; ++k) {
        double scale;
        if (k == 0) {
            r = sv.a[0];
            scale = std::abs(sv.a[0]);
        } else {
            const double load = sv.b[k - 1] * sv.b[k - 1] / std::abs(r);
            r = sv.a[k] - sv.b[k - 1] * sv.b[k - 1] / r;
            scale = std::abs(sv.a[k]) + load;
        }
        scale = std::max(scale, 1e-300);
        const double margin = -r / scale;
        min_margin = std::min(min_margin, margin);
        if (margin < tol) {
            res.witness = k + 1;
            res.margin = margin;
            res.verdict = margin < -tol ? DefiniteVerdict::No
                                        : DefiniteVerdict::Undetermined;
            return res;
        }
    }
    res.verdict = DefiniteVerdict::Yes;
    res.margin = min_margin;
    res.witness = m;
    return res;
}

JacobiField jacobi_propagate(const OrbitSegment& segment, int seed_node,
                             double v0, double v1) {
    const int lo = segment.lo, hi = segment.hi();
    if (seed_node < lo || seed_node + 1 > hi)
        throw std::invalid_argument("jacobi_propagate: seeds outside segment");
    JacobiField f;
    f.lo = lo;
    f.dq.assign(segment.q.size(), 0.0);
    f.dq[seed_node - lo] = v0;
    f.dq[seed_node + 1 - lo] = v1;

    auto a_of = [&](int node) {
        return segment.steps[node - lo - 1].h22 + segment.steps[node - lo].h11;
    };
    auto b_of = [&](int node) {  // H12(q_node, q_node+1)
        return segment.steps[node - lo].h12;
    };

    // forward: b_{n-1} dq_{n-1} + a_n dq_n + b_n dq_{n+1} = 0
    for (int n = seed_node + 1; n + 1 <= hi; ++n)
        f.dq[n + 1 - lo] =
            -(b_of(n - 1) * f.dq[n - 1 - lo] + a_of(n) * f.dq[n - lo]) / b_of(n);
    for (int n = seed_node; n - 1 >= lo; --n)
        f.dq[n - 1 - lo] =
            -(a_of(n) * f.dq[n - lo] + b_of(n) * f.dq[n + 1 - lo]) / b_of(n - 1);

    f.dp.assign(segment.q.size(), 0.0);
    for (int n = lo; n < hi; ++n)
        f.dp[n - lo] = -segment.steps[n - lo].h11 * f.dq[n - lo] -
                       segment.steps[n - lo].h12 * f.dq[n + 1 - lo];
    // backward lift form at the last node
    f.dp[hi - lo] = segment.steps[hi - 1 - lo].h22 * f.dq[hi - lo] +
                    segment.steps[hi - 1 - lo].h12 * f.dq[hi - 1 - lo];
    return f;
}

JacobiField solve_bvp(const OrbitSegment& segment, int M, int N) {
    const int lo = segment.lo, hi = segment.hi();
    if (M < lo || N > hi || N <= M)
        throw std::invalid_argument("solve_bvp: window outside segment");
    JacobiField f;
    f.lo = M;
    f.dq.assign(N - M + 1, 0.0);
    f.dq[0] = 1.0;
    const int m = N - M - 1;
    if (m > 0) {
        auto a_of = [&](int node) {
            return segment.steps[node - lo - 1].h22 + segment.steps[node - lo].h11;
        };
        auto b_of = [&](int node) { return segment.steps[node - lo].h12; };
        // Thomas elimination; pivots are the LDL^T pivots of the window.
        std::vector<double> c(m, 0.0), d(m, 0.0);
        double piv = a_of(M + 1);
        if (piv == 0.0) throw SingularSystemError("solve_bvp: zero pivot");
        c[0] = m > 1 ? b_of(M + 1) / piv : 0.0;
        d[0] = -b_of(M) * 1.0 / piv;
        for (int i = 1; i < m; ++i) {
            const int node = M + 1 + i;
            piv = a_of(node) - b_of(node - 1) * c[i - 1];
            if (piv == 0.0) throw SingularSystemError("solve_bvp: zero pivot");
            c[i] = i < m - 1 ? b_of(node) / piv : 0.0;
            d[i] = (0.0 - b_of(node - 1) * d[i - 1]) / piv;
        }
        f.dq[m] = d[m - 1];
        for (int i = m - 2; i >= 0; --i) f.dq[i + 1] = d[i] - c[i] * f.dq[i + 2];
    }
    f.dq[N - M] = 0.0;

    f.dp.assign(N - M + 1, 0.0);
    for (int n = M; n < N; ++n)
        f.dp[n - M] = -segment.steps[n - lo].h11 * f.dq[n - M] -
                      segment.steps[n - lo].h12 * f.dq[n + 1 - M];
    if (N - 1 >= M)
        f.dp[N - M] = segment.steps[N - 1 - lo].h22 * f.dq[N - M] +
                      segment.steps[N - 1 - lo].h12 * f.dq[N - 1 - M];
    return f;
}

NuResult limit_field_nu(const OrbitSegment& segment, int base_node,
                        const NuOptions& opts) {
    NuResult res;
    std::vector<double> raw, r1, r2;
    double prev_est = 0.0;
    bool have_prev = false;
    int quiet_rounds = 0;
    for (int N = opts.first_horizon;
         N <= opts.max_horizon && base_node + N <= segment.hi(); N *= 2) {
        const JacobiField f = solve_bvp(segment, base_node, base_node + N);
        raw.push_back(f.dq[1]);
        res.horizon_used = N;

        // Two Richardson levels against the c/N + O(1/N^2) truncation error
        // of the boundary-value limit; the doubling schedule makes the level
        // weights 2 and 4/3. A plateau of sub-tolerance changes is required
        // so that one accidental agreement cannot flag convergence.
        if (raw.size() >= 2) r1.push_back(2.0 * raw.back() - raw[raw.size() - 2]);
        if (r1.size() >= 2) r2.push_back((4.0 * r1.back() - r1[r1.size() - 2]) / 3.0);
        const double est = !r2.empty() ? r2.back()
                          : !r1.empty() ? r1.back()
                                        : raw.back();
        res.nu1 = est;
        if (have_prev) {
            res.last_change = std::abs(est - prev_est);
            quiet_rounds = res.last_change < opts.tol ? quiet_rounds + 1 : 0;
            if (quiet_rounds >= opts.plateau && raw.size() >= 3) {
                res.converged = true;
                break;
            }
        }
        prev_est = est;
        have_prev = true;
    }
    res.raw = raw;
    if (raw.empty())
        throw std::invalid_argument("limit_field_nu: segment shorter than schedule");

    // positivity of the interior of the last solved field
    const JacobiField f =
        solve_bvp(segment, base_node, base_node + res.horizon_used);
    res.positive_field = true;
    for (std::size_t i = 0; i + 1 < f.dq.size(); ++i)
        if (!(f.dq[i] > 0.0)) res.positive_field = false;
    return res;
}

NuResult limit_field_nu(const SupportCurve& curve, const PhasePoint& z,
                        GenFun genfun, const NuOptions& opts) {
    // Most points converge early; build the long orbit only when needed.
    NuOptions phase = opts;
    phase.max_horizon = std::min(opts.max_horizon, 2048);
    SegmentBuild b = build_orbit_segment(curve, z, genfun, 1, phase.max_horizon + 2);
    if (b.status != StepStatus::Ok)
        throw CurveValidationError("limit_field_nu: orbit propagation failed");
    NuResult res = limit_field_nu(b.segment, 0, phase);
    if (!res.converged && opts.max_horizon > phase.max_horizon) {
        b = build_orbit_segment(curve, z, genfun, 1, opts.max_horizon + 2);
        if (b.status == StepStatus::Ok) res = limit_field_nu(b.segment, 0, opts);
    }
    return res;
}

OmegaResult omega(const SupportCurve& curve, const PhasePoint& z, GenFun genfun,
                  const NuOptions& opts) {
    OmegaResult res;
    NuOptions phase = opts;
    phase.max_horizon = std::min(opts.max_horizon, 2048);
    SegmentBuild b = build_orbit_segment(curve, z, genfun, 1, phase.max_horizon + 2);
    if (b.status != StepStatus::Ok) {
        res.status = b.status;
        return res;
    }
    res.nu_z = limit_field_nu(b.segment, 0, phase);
    res.nu_Tz = limit_field_nu(b.segment, 1, phase);
    if ((!res.nu_z.converged || !res.nu_Tz.converged) &&
        opts.max_horizon > phase.max_horizon) {
        SegmentBuild full =
            build_orbit_segment(curve, z, genfun, 1, opts.max_horizon + 2);
        if (full.status == StepStatus::Ok) {
            b = std::move(full);
            res.nu_z = limit_field_nu(b.segment, 0, opts);
            res.nu_Tz = limit_field_nu(b.segment, 1, opts);
        }
    }
    const OrbitSegment& seg = b.segment;

    const OrbitStep& back = seg.step(-1);  // chord (q_{-1}, q_0)
    const OrbitStep& cur = seg.step(0);    // chord (q_0, q_1)
    const OrbitStep& next = seg.step(1);   // chord (q_1, q_2)

    res.omega = -cur.h11 - cur.h12 * res.nu_z.nu1;
    res.lower = back.h22;
    res.upper = -cur.h11;
    res.bounds_ok = res.lower < res.omega && res.omega < res.upper;

    const double omega_Tz_backward = cur.h22 + cur.h12 / res.nu_z.nu1;
    const double omega_Tz_forward = -next.h11 - next.h12 * res.nu_Tz.nu1;
    res.dual_residual = std::abs(omega_Tz_forward - omega_Tz_backward);
    return res;
}

Classification classify(const SupportCurve& curve, const PhasePoint& z,
                        GenFun genfun, int horizon, const ClassifyOptions& opts) {
    Classification cl;
    cl.horizon = horizon;
    const SegmentBuild b = build_orbit_segment(curve, z, genfun, horizon + 1,
                                               horizon + 1, opts.delta_min);
    if (b.status != StepStatus::Ok) {
        cl.verdict = b.status == StepStatus::Collar ? Verdict::BoundaryDegenerate
                                                    : Verdict::PropagationFailure;
        return cl;
    }
    const SecondVariation sv = build_second_variation(b.segment);
    const DefiniteResult res = is_negative_definite(sv, opts.tol);
    cl.margin = res.margin;
    cl.witness_start = sv.first_node;
    switch (res.verdict) {
        case DefiniteVerdict::Yes:
            cl.verdict = Verdict::MCandidate;
            break;
        case DefiniteVerdict::No:
            cl.verdict = Verdict::NotM;
            cl.witness_len = res.witness;
            break;
        case DefiniteVerdict::Undetermined:
            cl.verdict = Verdict::Undetermined;
            cl.witness_len = res.witness;
            break;
    }
    return cl;
}

CrossCheckReport cross_check_ML_MS(const SupportCurve& curve, int grid_w,
                                   int grid_h, int horizon, double collar,
                                   const ClassifyOptions& opts) {
    CrossCheckReport rep;
    const int n = grid_w * grid_h;
    rep.cells.resize(n);
    parallel_for(n, [&](int idx) {
        const int i = idx / grid_h, j = idx % grid_h;
        DualCell& cell = rep.cells[idx];
        cell.psi = (i + 0.5) * 2.0 * kPi / grid_w;
        cell.delta = collar + (j + 0.5) * (kPi - 2.0 * collar) / grid_h;
        const double h = curve.h(cell.psi, 0), hp = curve.h(cell.psi, 1);
        const PhasePoint zs{Chart::PhiP, cell.psi + cell.delta,
                            h * std::cos(cell.delta) + hp * std::sin(cell.delta)};
        const PhasePoint zl{Chart::SCos, curve.arclength_from_psi(cell.psi),
                            std::cos(cell.delta)};
        cell.s = classify(curve, zs, GenFun::S, horizon, opts).verdict;
        cell.l = classify(curve, zl, GenFun::L, horizon, opts).verdict;
    });
    for (const auto& cell : rep.cells) {
        const bool s_def =
            cell.s == Verdict::MCandidate || cell.s == Verdict::NotM;
        const bool l_def =
            cell.l == Verdict::MCandidate || cell.l == Verdict::NotM;
        if (s_def && l_def) {
            ++rep.definite_pairs;
            if (cell.s == cell.l)
                ++rep.agreements;
            else
                ++rep.conflicts;
        }
    }
    return rep;
}

}  // namespace billiards
