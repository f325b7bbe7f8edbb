#include "billiards/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "billiards/parallel.hpp"

namespace billiards {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Periodic trapezoid rule over [0, 2 pi); spectrally accurate for the
// analytic integrands that appear here.
template <typename F>
double periodic_integral(const F& f, int n = 8192) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += f(kTwoPi * i / n);
    return acc * kTwoPi / n;
}

// 8-point Gauss-Legendre on [a, b].
template <typename F>
double gauss8(const F& f, double a, double b) {
    static const double x[4] = {0.1834346424956498, 0.5255324099163290,
                                0.7966664774136267, 0.9602898564975363};
    static const double w[4] = {0.3626837833783620, 0.3137066458778873,
                                0.2223810344533745, 0.1012285362903763};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 4; ++i)
        acc += w[i] * (f(mid + half * x[i]) + f(mid - half * x[i]));
    return acc * half;
}

double fourier_tail_h(const TrigSeries& h, int min_n, double weight) {
    double acc = 0.0;
    for (const auto& t : h.terms())
        if (t.n >= min_n)
            acc += weight * (t.cos_coeff * t.cos_coeff + t.sin_coeff * t.sin_coeff);
    return acc;
}

// h as an exact-enough trig polynomial: identity for Height curves, adaptive
// fit for HeightSquared ones.
TrigSeries h_as_series(const SupportCurve& curve) {
    if (curve.kind() == SeriesKind::Height) return curve.series();
    auto f = [&curve](double psi) { return curve.h(psi, 0); };
    const double tol = 1e-13 * (curve.h(0.0, 0) + 1.0);
    TrigSeries fit;
    for (int degree = 32;; degree *= 2) {
        fit = TrigSeries::fit(f, degree, 8 * degree);
        double worst = 0.0;
        for (int i = 0; i < 4 * degree; ++i) {
            const double p = kTwoPi * i / (4 * degree) + 0.31 / degree;
            worst = std::max(worst, std::abs(fit.eval(p) - f(p)));
        }
        if (worst < tol || degree >= 2048) break;
    }
    return fit;
}

}  // namespace

double d2_h_W(const SupportCurve& curve) {
    return fourier_tail_h(h_as_series(curve), 2, kPi);
}

double d2_h_W_quadrature(const SupportCurve& curve) {
    // Project onto {1, cos, sin} by quadrature, then integrate the residual.
    auto h = [&curve](double p) { return curve.h(p, 0); };
    const double c0 = periodic_integral(h) / kTwoPi;
    const double c1 =
        periodic_integral([&](double p) { return h(p) * std::cos(p); }) / kPi;
    const double s1 =
        periodic_integral([&](double p) { return h(p) * std::sin(p); }) / kPi;
    return periodic_integral([&](double p) {
        const double r = h(p) - c0 - c1 * std::cos(p) - s1 * std::sin(p);
        return r * r;
    });
}

double d2_h2_U(const ClassCCurve& classc) {
    return fourier_tail_h(classc.curve().series(), 3, 0.5 * kPi);
}

double d2_h2_U_quadrature(const ClassCCurve& classc) {
    const TrigSeries& h2 = classc.curve().series();
    // L^2[0, pi]; the even-frequency system {1, cos 2psi, sin 2psi} stays
    // orthogonal there with weights pi and pi/2.
    auto f = [&h2](double p) { return h2.eval(p, 0); };
    const int n = 8192;
    auto integ = [&](auto g) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += g(kPi * i / n);
        return acc * kPi / n;
    };
    const double c0 = integ(f) / kPi;
    const double c2 =
        integ([&](double p) { return f(p) * std::cos(2 * p); }) / (0.5 * kPi);
    const double s2 =
        integ([&](double p) { return f(p) * std::sin(2 * p); }) / (0.5 * kPi);
    return integ([&](double p) {
        const double r = f(p) - c0 - c2 * std::cos(2 * p) - s2 * std::sin(2 * p);
        return r * r;
    });
}

PhasePoint alpha_point(const ClassCCurve& classc, double psi, Chart chart) {
    const SupportCurve& curve = classc.curve();
    const double d = classc.d(psi);
    if (chart == Chart::PhiP)
        return {Chart::PhiP, psi + d,
                curve.h(psi, 0) * std::cos(d) + curve.h(psi, 1) * std::sin(d)};
    return {Chart::SCos, curve.arclength_from_psi(psi), std::cos(d)};
}

bool in_region_above_alpha(const ClassCCurve& classc, const PhasePoint& z) {
    const PhasePoint zs = to_sCos(classc.curve(), z);
    const double psi = classc.curve().psi_from_arclength(zs.q);
    const double delta = std::acos(std::clamp(zs.r, -1.0, 1.0));
    return delta < classc.d(psi);
}

FourPeriodicReport verify_4periodic(const ClassCCurve& classc, int samples) {
    FourPeriodicReport rep;
    rep.samples = samples;
    const SupportCurve& curve = classc.curve();
    for (int i = 0; i < samples; ++i) {
        const double psi = kTwoPi * i / samples;
        const PhasePoint z0 = alpha_point(classc, psi, Chart::PhiP);
        PhasePoint z = z0;
        bool ok = true;
        for (int k = 0; k < 4; ++k) {
            const MapResult r = map_phi(curve, z);
            if (r.status != StepStatus::Ok) { ok = false; break; }
            z = r.point;
        }
        const double defect =
            ok ? std::hypot(z.q - (z0.q + kTwoPi), z.r - z0.r)
               : std::numeric_limits<double>::infinity();
        rep.max_defect = std::max(rep.max_defect, defect);
        rep.max_d_identity_error =
            std::max(rep.max_d_identity_error,
                     std::abs(classc.d(psi + 0.5 * kPi) + classc.d(psi) - 0.5 * kPi));
    }
    return rep;
}

double total_measure(const SupportCurve& curve) { return 0.5 * curve.length(); }

double total_measure_above_alpha(const ClassCCurve& classc) {
    const SupportCurve& curve = classc.curve();
    return periodic_integral([&](double psi) {
        return 0.25 * curve.rho(psi) * (1.0 - std::cos(classc.d(psi)));
    });
}

ScanResult estimate_delta_measure(const SupportCurve& curve,
                                  const ClassCCurve* classc,
                                  const ScanParams& params) {
    if (params.region == Region::AboveAlpha && classc == nullptr)
        throw std::invalid_argument("region AboveAlpha requires a class-C curve");
    ScanResult res;
    res.params = params;
    const int W = params.grid_w, H = params.grid_h;
    res.cells.resize(static_cast<std::size_t>(W) * H);

    const double dpsi = kTwoPi / W, ddelta = kPi / H;
    parallel_for(W * H, [&](int idx) {
        const int i = idx / H, j = idx % H;
        ScanCell& cell = res.cells[idx];
        const double psi0 = i * dpsi, psi1 = psi0 + dpsi;
        const double de0 = j * ddelta, de1 = de0 + ddelta;
        cell.psi = 0.5 * (psi0 + psi1);
        cell.delta = 0.5 * (de0 + de1);

        // arclength over the cell column; exact antiderivative
        const double arc = curve.arclength_from_psi(psi1) -
                           curve.arclength_from_psi(psi0);

        if (params.region == Region::Full) {
            cell.weight = 0.25 * arc * (std::cos(de0) - std::cos(de1));
            if (de0 < params.collar || de1 > kPi - params.collar) {
                cell.verdict = CellVerdict::Collar;
                return;
            }
        } else {
            // region: 0 < delta < d(psi), band collar around alpha
            double dmin = 1e300, dmax = -1e300;
            for (int k = 0; k <= 8; ++k) {
                const double dv = classc->d(psi0 + dpsi * k / 8.0);
                dmin = std::min(dmin, dv);
                dmax = std::max(dmax, dv);
            }
            if (de0 >= dmax) {   // entirely above alpha: outside
                cell.verdict = CellVerdict::Outside;
                cell.weight = 0.0;
                return;
            }
            if (de1 <= dmin) {   // entirely inside the band
                cell.weight = 0.25 * arc * (std::cos(de0) - std::cos(de1));
                if (de0 < params.collar) {
                    cell.verdict = CellVerdict::Collar;
                    return;
                }
                if (de1 > dmin - params.alpha_collar) {
                    cell.verdict = CellVerdict::AlphaStraddle;
                    return;
                }
            } else {
                // straddles alpha: integrate the overlap and band it;
                // composite panels tame the kink where d(psi) crosses the cell
                auto overlap = [&](double psi) {
                    const double top = std::min(de1, classc->d(psi));
                    return top > de0 ? 0.25 * curve.rho(psi) *
                                           (std::cos(de0) - std::cos(top))
                                     : 0.0;
                };
                double mass = 0.0;
                const int panels = 16;
                for (int k = 0; k < panels; ++k)
                    mass += gauss8(overlap, psi0 + (psi1 - psi0) * k / panels,
                                   psi0 + (psi1 - psi0) * (k + 1) / panels);
                cell.weight = mass;
                cell.verdict = CellVerdict::AlphaStraddle;
                return;
            }
        }

        const double h = curve.h(cell.psi, 0), hp = curve.h(cell.psi, 1);
        const PhasePoint z =
            params.genfun == GenFun::S
                ? PhasePoint{Chart::PhiP, cell.psi + cell.delta,
                             h * std::cos(cell.delta) + hp * std::sin(cell.delta)}
                : PhasePoint{Chart::SCos, curve.arclength_from_psi(cell.psi),
                             std::cos(cell.delta)};
        ClassifyOptions copts;
        copts.tol = params.tol;
        const Classification cl =
            classify(curve, z, params.genfun, params.horizon, copts);
        cell.margin = cl.margin;
        cell.witness_len = cl.witness_len;
        switch (cl.verdict) {
            case Verdict::MCandidate: cell.verdict = CellVerdict::MCandidate; break;
            case Verdict::NotM: cell.verdict = CellVerdict::NotM; break;
            case Verdict::Undetermined: cell.verdict = CellVerdict::Undetermined; break;
            case Verdict::BoundaryDegenerate:
                cell.verdict = CellVerdict::BoundaryDegenerate;
                break;
            case Verdict::PropagationFailure:
                cell.verdict = CellVerdict::PropagationFailure;
                break;
        }
    });

    // deterministic reduction in cell order
    for (const ScanCell& cell : res.cells) {
        res.total += cell.weight;
        switch (cell.verdict) {
            case CellVerdict::MCandidate: res.mass_mcand += cell.weight; break;
            case CellVerdict::NotM: res.mass_not_m += cell.weight; break;
            case CellVerdict::Undetermined: res.mass_undetermined += cell.weight; break;
            case CellVerdict::BoundaryDegenerate: res.mass_degenerate += cell.weight; break;
            case CellVerdict::PropagationFailure: res.mass_propfail += cell.weight; break;
            case CellVerdict::Collar: res.mass_collar += cell.weight; break;
            case CellVerdict::AlphaStraddle: res.mass_straddle += cell.weight; break;
            case CellVerdict::Outside: break;
        }
    }
    return res;
}

namespace {

BoundReport assemble_report(const char* theorem, double beta, double d2,
                            double rhs, ScanResult scan) {
    BoundReport rep;
    rep.theorem = theorem;
    rep.beta = beta;
    rep.d2 = d2;
    rep.rhs = rhs;
    rep.estimate = scan.estimate();
    rep.band = scan.band();
    rep.total = scan.total;
    rep.params = scan.params;
    // The scan lower-bounds mu(Delta); the theorem is falsified only if even
    // estimate + band cannot reach the right-hand side.
    rep.consistent = rep.estimate + rep.band >= rhs - 1e-12;
    rep.sharp = rhs < 1e-12 && rep.estimate < 1e-12;
    rep.scan = std::move(scan);
    return rep;
}

}  // namespace

BoundReport bound_report_thm13(const SupportCurve& curve, ScanParams params) {
    params.region = Region::Full;
    const double beta = curve.min_curvature();
    const double d2 = d2_h_W(curve);
    const double rhs = kPi * kPi * beta * d2;
    return assemble_report("1.3", beta, d2, rhs,
                           estimate_delta_measure(curve, nullptr, params));
}

BoundReport bound_report_thm14(const ClassCCurve& classc, ScanParams params) {
    params.region = Region::AboveAlpha;
    const double beta = classc.curve().min_curvature();
    const double d2 = d2_h2_U(classc);
    const double rhs = 25.0 * kPi * kPi / 32.0 * beta * beta * beta * d2;
    return assemble_report("1.4", beta, d2, rhs,
                           estimate_delta_measure(classc.curve(), &classc, params));
}

Thm14Functional thm14_functional(const ClassCCurve& classc) {
    const SupportCurve& curve = classc.curve();
    const double R = classc.R();
    const double R2 = R * R;
    Thm14Functional out;

    // delta-integrals over (0, d): cos^2 sin^2 and sin^2 have closed forms
    auto Ia = [](double x) { return x / 8.0 - std::sin(4.0 * x) / 32.0; };
    auto Ib = [](double x) { return 0.5 * x - 0.25 * std::sin(2.0 * x); };
    out.lhs = periodic_integral([&](double psi) {
        const double h = curve.h(psi, 0), hp = curve.h(psi, 1), hpp = curve.h(psi, 2);
        const double P = hpp * h * h + 3.0 * h * hp * hp;  // A / (cos^2 sin)
        const double Q = h * hp * hp;                      // B / sin
        const double d = classc.d(psi);
        return 0.25 * curve.rho(psi) * (P * Ia(d) - Q * Ib(d));
    });

    // (mu')^2, (mu'')^2 from the exact derivatives of h^2
    const TrigSeries& h2 = curve.series();
    const int n = 8192;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double psi = kPi * i / n;
        const double mup = -2.0 * h2.eval(psi, 1) / R2;
        const double mupp = -2.0 * h2.eval(psi, 2) / R2;
        acc += mupp * mupp - 4.0 * mup * mup;
    }
    out.rhs_integral = acc * kPi / n;
    out.rhs = kPi * R2 * R2 / 1024.0 * out.rhs_integral;

    const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
    out.rel_discrepancy =
        scale > 0.0 ? std::abs(out.lhs - out.rhs) / scale : 0.0;

    out.parseval_lower = 4000.0 / (R2 * R2) * d2_h2_U(classc);
    out.parseval_ok = out.rhs_integral >= out.parseval_lower - 1e-10;
    return out;
}

const char* to_string(CellVerdict v) {
    switch (v) {
        case CellVerdict::MCandidate: return "m_candidate";
        case CellVerdict::NotM: return "not_m";
        case CellVerdict::Undetermined: return "undetermined";
        case CellVerdict::BoundaryDegenerate: return "boundary_degenerate";
        case CellVerdict::PropagationFailure: return "propagation_failure";
        case CellVerdict::Collar: return "collar";
        case CellVerdict::AlphaStraddle: return "alpha_straddle";
        case CellVerdict::Outside: return "outside";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::MCandidate: return "m_candidate";
        case Verdict::NotM: return "not_m";
        case Verdict::Undetermined: return "undetermined";
        case Verdict::BoundaryDegenerate: return "boundary_degenerate";
        case Verdict::PropagationFailure: return "propagation_failure";
    }
    return "?";
}

}  // namespace billiards
