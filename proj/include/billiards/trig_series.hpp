#ifndef BILLIARDS_TRIG_SERIES_HPP
#define BILLIARDS_TRIG_SERIES_HPP

#include <functional>
#include <vector>

namespace billiards {

/// One real Fourier term: cos_coeff*cos(n*psi) + sin_coeff*sin(n*psi), n >= 0.
struct TrigTerm {
    int n = 0;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

/// Finite real trigonometric polynomial on [0, 2*pi).
///
/// Derivatives and antiderivatives are exact (term-wise), which is what makes
/// support-function geometry downstream exact as well.
class TrigSeries {
public:
    TrigSeries() = default;

    /// Terms are normalized: sorted by frequency, duplicates rejected,
    /// coefficients must be finite, n >= 0 (sin term with n = 0 is dropped).
    explicit TrigSeries(std::vector<TrigTerm> terms);

    static TrigSeries constant(double value);

    /// Value of the order-th derivative at psi (order >= 0).
    double eval(double psi, int order = 0) const;

    /// Exact antiderivative: integral of the series over [0, psi].
    double integral0(double psi) const;

    TrigSeries derivative() const;

    /// Pointwise product, expanded back into a trig polynomial.
    TrigSeries product(const TrigSeries& other) const;

    /// Least-squares fit of a 2*pi-periodic function on a uniform grid.
    /// samples must exceed 2*degree, otherwise coefficients alias.
    static TrigSeries fit(const std::function<double(double)>& f, int degree,
                          int samples = 4096);

    double constant_coeff() const;
    int max_degree() const;
    bool empty() const { return terms_.empty(); }
    const std::vector<TrigTerm>& terms() const { return terms_; }

    /// Drops terms with |cos|+|sin| <= threshold.
    TrigSeries pruned(double threshold) const;

private:
    std::vector<TrigTerm> terms_;
};

}  // namespace billiards

#endif
