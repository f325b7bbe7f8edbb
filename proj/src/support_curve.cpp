#include "billiards/support_curve.hpp"

#include <cmath>
#include <numbers>

namespace billiards {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kValidationGrid = 4096;
constexpr double kPositivityMargin = 1e-9;

// Golden-section refinement of a smooth 1-d extremum around a grid hit.
template <typename F>
double refine_min(const F& f, double lo, double hi, int iters = 60) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && (b - a) > 1e-14; ++i) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

template <typename F>
double grid_min(const F& f, double* arg_out = nullptr) {
    double best = f(0.0), best_psi = 0.0;
    for (int i = 1; i < kValidationGrid; ++i) {
        const double psi = kTwoPi * i / kValidationGrid;
        const double v = f(psi);
        if (v < best) { best = v; best_psi = psi; }
    }
    const double step = kTwoPi / kValidationGrid;
    const double psi = refine_min(f, best_psi - step, best_psi + step);
    const double v = std::min(best, f(psi));
    if (arg_out) *arg_out = v < best ? psi : best_psi;
    return v;
}

}  // namespace

double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

SupportCurve::SupportCurve(SeriesKind kind, TrigSeries series)
    : kind_(kind), series_(std::move(series)) {
    validate_and_cache();
}

SupportCurve SupportCurve::from_h(TrigSeries h) {
    return SupportCurve(SeriesKind::Height, std::move(h));
}

SupportCurve SupportCurve::from_h2(TrigSeries h2) {
    return SupportCurve(SeriesKind::HeightSquared, std::move(h2));
}

double SupportCurve::h(double psi, int order) const {
    if (kind_ == SeriesKind::Height) return series_.eval(psi, order);
    const double f = series_.eval(psi, 0);
    // Positivity of h^2 is a construction invariant; sqrt is safe.
    const double hv = std::sqrt(f);
    if (order == 0) return hv;
    const double fp = series_.eval(psi, 1);
    if (order == 1) return fp / (2.0 * hv);
    const double fpp = series_.eval(psi, 2);
    if (order == 2) return (2.0 * f * fpp - fp * fp) / (4.0 * f * hv);
    throw std::invalid_argument("SupportCurve::h: order must be 0, 1 or 2");
}

double SupportCurve::rho(double psi) const { return h(psi, 0) + h(psi, 2); }

Vec2 SupportCurve::point(double psi) const {
    const double hv = h(psi, 0), hp = h(psi, 1);
    const double c = std::cos(psi), s = std::sin(psi);
    return {hv * c - hp * s, hv * s + hp * c};
}

Vec2 SupportCurve::tangent(double psi) const {
    return {-std::sin(psi), std::cos(psi)};
}

Vec2 SupportCurve::normal(double psi) const {
    return {std::cos(psi), std::sin(psi)};
}

double SupportCurve::arclength_from_psi(double psi) const {
    const double turns = std::floor(psi / kTwoPi);
    const double r = psi - turns * kTwoPi;
    return turns * length_ + rho_arc_.integral0(r);
}

double SupportCurve::psi_from_arclength(double s) const {
    const double turns = std::floor(s / length_);
    const double sr = s - turns * length_;
    // Newton on s(psi) - sr with derivative rho > 0, bisection fallback.
    double lo = 0.0, hi = kTwoPi;
    double psi = kTwoPi * sr / length_;
    for (int it = 0; it < 100; ++it) {
        const double g = rho_arc_.integral0(psi) - sr;
        if (g > 0) hi = psi; else lo = psi;
        const double step = g / rho_arc_.eval(psi);
        double next = psi - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - psi) < 1e-15 * kTwoPi) { psi = next; break; }
        psi = next;
    }
    return psi + turns * kTwoPi;
}

TrigSeries SupportCurve::h_squared_series() const {
    if (kind_ == SeriesKind::HeightSquared) return series_;
    return series_.product(series_);
}

void SupportCurve::validate_and_cache() {
    if (series_.empty())
        throw CurveValidationError("empty Fourier series");

    const double scale = std::abs(series_.constant_coeff()) + 1.0;

    if (kind_ == SeriesKind::HeightSquared) {
        const double min_h2 =
            grid_min([this](double p) { return series_.eval(p, 0); });
        if (min_h2 <= kPositivityMargin * scale)
            throw CurveValidationError("h^2 is not strictly positive");
    }

    min_h_ = grid_min([this](double p) { return h(p, 0); });
    if (min_h_ <= kPositivityMargin * scale)
        throw CurveValidationError("support function h is not strictly positive");

    min_rho_ = grid_min([this](double p) { return rho(p); });
    if (min_rho_ <= kPositivityMargin * scale)
        throw CurveValidationError("curvature radius rho = h + h'' is not strictly positive");

    max_rho_ = -grid_min([this](double p) { return -rho(p); });
    beta_ = 1.0 / max_rho_;

    // Exact trig representation of rho for arclength. For Height input this
    // is term-wise exact; for HeightSquared fit adaptively until the residual
    // is at quadrature tolerance.
    if (kind_ == SeriesKind::Height) {
        std::vector<TrigTerm> rt;
        for (const auto& t : series_.terms()) {
            const double f = 1.0 - double(t.n) * double(t.n);
            rt.push_back({t.n, t.cos_coeff * f, t.sin_coeff * f});
        }
        rho_arc_ = TrigSeries(std::move(rt));
    } else {
        auto rho_fn = [this](double p) { return rho(p); };
        const double tol = 1e-12 * (std::abs(max_rho_) + 1.0);
        for (int degree = 32;; degree *= 2) {
            rho_arc_ = TrigSeries::fit(rho_fn, degree, 8 * degree);
            double worst = 0.0;
            for (int i = 0; i < 4 * degree; ++i) {
                const double p = kTwoPi * i / (4 * degree) + 0.37 / degree;
                worst = std::max(worst, std::abs(rho_arc_.eval(p) - rho(p)));
            }
            if (worst < tol || degree >= 1024) break;
        }
        rho_arc_ = rho_arc_.pruned(1e-16 * (std::abs(max_rho_) + 1.0));
    }
    length_ = rho_arc_.integral0(kTwoPi);

    diameter_ =
        -grid_min([this](double p) { return -(h(p, 0) + h(p + kPi, 0)); });
    if (diameter_ > 2.0 / beta_ * (1.0 + 1e-9))
        throw CurveValidationError(
            "diameter exceeds Blaschke bound 2/beta: inconsistent curve data");
}

ClassCCurve ClassCCurve::build(TrigSeries h_squared) {
    if (!classc_frequencies_ok(h_squared))
        throw CurveValidationError(
            "class-C frequency violation: h^2 must use frequencies in {0} u (2+4Z)");
    SupportCurve curve = SupportCurve::from_h2(std::move(h_squared));
    const double c0 = curve.series().constant_coeff();
    if (c0 <= 0.0)
        throw CurveValidationError("class-C: constant coefficient of h^2 must be positive");
    const double R = std::sqrt(2.0 * c0);

    // By the frequency structure h^2(psi) + h^2(psi+pi/2) = 2 c0 identically;
    // verify on a grid to catch construction bugs rather than trusting it.
    double worst_sum = 0.0, worst_d = 0.0;
    for (int i = 0; i < 1024; ++i) {
        const double psi = kTwoPi * i / 1024;
        const double sum = curve.series().eval(psi, 0) +
                           curve.series().eval(psi + 0.5 * kPi, 0);
        worst_sum = std::max(worst_sum, std::abs(sum - R * R));
        const double d0 = std::asin(std::min(1.0, curve.h(psi) / R));
        const double d1 = std::asin(std::min(1.0, curve.h(psi + 0.5 * kPi) / R));
        worst_d = std::max(worst_d, std::abs(d0 + d1 - 0.5 * kPi));
    }
    if (worst_sum > 1e-10 * (1.0 + R * R) || worst_d > 1e-10)
        throw CurveValidationError("class-C: R^2 / d(psi) consistency check failed");

    return ClassCCurve(std::move(curve), R);
}

double ClassCCurve::d(double psi) const {
    const double ratio = curve_.h(psi) / radius_;
    return std::asin(std::clamp(ratio, -1.0, 1.0));
}

bool classc_frequencies_ok(const TrigSeries& h_squared, double coeff_tol) {
    for (const auto& t : h_squared.terms()) {
        if (t.n == 0 || t.n % 4 == 2) continue;
        if (std::abs(t.cos_coeff) + std::abs(t.sin_coeff) > coeff_tol) return false;
    }
    return true;
}

}  // namespace billiards
