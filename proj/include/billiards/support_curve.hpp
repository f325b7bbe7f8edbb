#ifndef BILLIARDS_SUPPORT_CURVE_HPP
#define BILLIARDS_SUPPORT_CURVE_HPP

#include <stdexcept>
#include <string>

#include "billiards/trig_series.hpp"

namespace billiards {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
double norm(const Vec2& v);

/// Raised when a curve fails a geometric invariant (positivity, convexity,
/// Blaschke consistency, class-C structure). The message names the first
/// violated condition.
class CurveValidationError : public std::runtime_error {
public:
    explicit CurveValidationError(const std::string& what)
        : std::runtime_error(what) {}
};

/// How the defining Fourier series is to be read.
enum class SeriesKind {
    Height,         ///< series is the support function h itself
    HeightSquared,  ///< series is h^2 (class-C style input)
};

/// Strictly convex planar table given by a finite Fourier support function.
///
/// All geometry (boundary point, curvature radius rho = h + h'', arclength)
/// derives from h; for HeightSquared input the derivatives of h are obtained
/// exactly from those of h^2:
///   h' = (h^2)' / (2h),   h'' = (2 h^2 (h^2)'' - ((h^2)')^2) / (4 h^3).
///
/// Construction validates h > 0 and rho > 0 on a dense grid with local
/// refinement; violations throw CurveValidationError. Instances are immutable
/// and safe to share across threads.
class SupportCurve {
public:
    static SupportCurve from_h(TrigSeries h);
    static SupportCurve from_h2(TrigSeries h_squared);

    /// h, h' or h'' at normal angle psi (order 0, 1, 2).
    double h(double psi, int order = 0) const;

    /// Radius of curvature rho(psi) = h + h''. Positive for valid curves.
    double rho(double psi) const;
    double curvature(double psi) const { return 1.0 / rho(psi); }

    /// Boundary point whose outward normal makes angle psi with the x-axis:
    /// gamma(psi) = h(psi) (cos psi, sin psi) + h'(psi) (-sin psi, cos psi).
    Vec2 point(double psi) const;
    Vec2 tangent(double psi) const;  // unit, direction of increasing psi
    Vec2 normal(double psi) const;   // unit outward

    /// Minimal curvature beta = 1 / max_psi rho(psi).
    double min_curvature() const { return beta_; }
    double max_rho() const { return max_rho_; }
    double min_rho() const { return min_rho_; }

    /// Total boundary length.
    double length() const { return length_; }

    /// Diameter D = max_psi (h(psi) + h(psi+pi)); validated against
    /// Blaschke's bound D <= 2/beta at construction.
    double diameter() const { return diameter_; }

    /// Monotone lift of arclength: s(psi) = integral of rho, s(0) = 0,
    /// defined for all real psi with s(psi + 2 pi) = s(psi) + length().
    double arclength_from_psi(double psi) const;

    /// Inverse of the above (monotone bijection on the lifts).
    double psi_from_arclength(double s) const;

    SeriesKind kind() const { return kind_; }
    const TrigSeries& series() const { return series_; }

    /// h^2 as an exact trig polynomial (squared if kind() == Height).
    TrigSeries h_squared_series() const;

private:
    SupportCurve(SeriesKind kind, TrigSeries series);
    void validate_and_cache();

    SeriesKind kind_;
    TrigSeries series_;
    TrigSeries rho_arc_;  // trig representation of rho used for arclength
    double length_ = 0.0;
    double beta_ = 0.0;
    double min_h_ = 0.0;
    double min_rho_ = 0.0;
    double max_rho_ = 0.0;
    double diameter_ = 0.0;
};

/// Centrally symmetric curve carrying the rotation-number-1/4 invariant
/// curve of 4-periodic orbits: h^2 has frequencies in {0} union (2 + 4Z),
/// h(psi) = R sin d(psi) with R^2 = 2 c0 and d in (0, pi/2).
class ClassCCurve {
public:
    /// Validates the frequency condition, positivity of h^2, convexity of
    /// the induced curve, h^2(psi) + h^2(psi+pi/2) = R^2 and
    /// d(psi+pi/2) = pi/2 - d(psi) on a grid.
    static ClassCCurve build(TrigSeries h_squared);

    const SupportCurve& curve() const { return curve_; }
    double R() const { return radius_; }

    /// Angle d(psi) = arcsin(h(psi)/R) between the 4-periodic chord at
    /// gamma(psi) and the tangent there.
    double d(double psi) const;

private:
    ClassCCurve(SupportCurve curve, double radius)
        : curve_(std::move(curve)), radius_(radius) {}

    SupportCurve curve_;
    double radius_;
};

/// True if all frequencies lie in {0} union (2 + 4Z) up to coeff_tol.
bool classc_frequencies_ok(const TrigSeries& h_squared, double coeff_tol = 1e-12);

}  // namespace billiards

#endif
