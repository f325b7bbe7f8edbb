#include "billiards/trig_series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace billiards {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TrigSeries::TrigSeries(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {
    for (auto& t : terms_) {
        if (t.n < 0)
            throw std::invalid_argument("trig series: negative frequency");
        if (!std::isfinite(t.cos_coeff) || !std::isfinite(t.sin_coeff))
            throw std::invalid_argument("trig series: non-finite coefficient");
        if (t.n == 0) t.sin_coeff = 0.0;  // sin(0) contributes nothing
    }
    std::sort(terms_.begin(), terms_.end(),
              [](const TrigTerm& a, const TrigTerm& b) { return a.n < b.n; });
    for (std::size_t i = 1; i < terms_.size(); ++i)
        if (terms_[i].n == terms_[i - 1].n)
            throw std::invalid_argument("trig series: duplicate frequency");
}

TrigSeries TrigSeries::constant(double value) {
    return TrigSeries({{0, value, 0.0}});
}

double TrigSeries::eval(double psi, int order) const {
    double v = 0.0;
    for (const auto& t : terms_) {
        const double arg = t.n * psi;
        // d/dpsi rotates (cos, sin) by pi/2 and scales by n.
        double scale = 1.0;
        for (int k = 0; k < order; ++k) scale *= t.n;
        switch (order & 3) {
            case 0: v += scale * (t.cos_coeff * std::cos(arg) + t.sin_coeff * std::sin(arg)); break;
            case 1: v += scale * (-t.cos_coeff * std::sin(arg) + t.sin_coeff * std::cos(arg)); break;
            case 2: v += scale * (-t.cos_coeff * std::cos(arg) - t.sin_coeff * std::sin(arg)); break;
            case 3: v += scale * (t.cos_coeff * std::sin(arg) - t.sin_coeff * std::cos(arg)); break;
        }
    }
    return v;
}

double TrigSeries::integral0(double psi) const {
    double v = 0.0;
    for (const auto& t : terms_) {
        if (t.n == 0) {
            v += t.cos_coeff * psi;
        } else {
            const double arg = t.n * psi;
            v += t.cos_coeff * std::sin(arg) / t.n +
                 t.sin_coeff * (1.0 - std::cos(arg)) / t.n;
        }
    }
    return v;
}

TrigSeries TrigSeries::derivative() const {
    std::vector<TrigTerm> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
        if (t.n == 0) continue;
        out.push_back({t.n, t.sin_coeff * t.n, -t.cos_coeff * t.n});
    }
    return TrigSeries(std::move(out));
}

TrigSeries TrigSeries::product(const TrigSeries& other) const {
    // cos a cos b = (cos(a-b)+cos(a+b))/2, etc.
    std::map<int, TrigTerm> acc;
    auto add = [&acc](int n, double c, double s) {
        if (n < 0) { n = -n; s = -s; }
        auto& t = acc[n];
        t.n = n;
        t.cos_coeff += c;
        if (n != 0) t.sin_coeff += s;
    };
    for (const auto& p : terms_) {
        for (const auto& q : other.terms_) {
            const int np = p.n + q.n, nm = p.n - q.n;
            add(nm, 0.5 * p.cos_coeff * q.cos_coeff, 0.0);
            add(np, 0.5 * p.cos_coeff * q.cos_coeff, 0.0);
            add(nm, 0.5 * p.sin_coeff * q.sin_coeff, 0.0);
            add(np, -0.5 * p.sin_coeff * q.sin_coeff, 0.0);
            add(np, 0.0, 0.5 * p.cos_coeff * q.sin_coeff);
            add(-nm, 0.0, 0.5 * p.cos_coeff * q.sin_coeff);
            add(np, 0.0, 0.5 * p.sin_coeff * q.cos_coeff);
            add(nm, 0.0, 0.5 * p.sin_coeff * q.cos_coeff);
        }
    }
    std::vector<TrigTerm> out;
    out.reserve(acc.size());
    for (auto& [n, t] : acc) out.push_back(t);
    return TrigSeries(std::move(out));
}

TrigSeries TrigSeries::fit(const std::function<double(double)>& f, int degree,
                           int samples) {
    if (degree < 0 || samples <= 2 * degree)
        throw std::invalid_argument("trig fit: need samples > 2*degree");
    std::vector<double> values(samples);
    for (int j = 0; j < samples; ++j) values[j] = f(kTwoPi * j / samples);

    std::vector<TrigTerm> out;
    out.reserve(degree + 1);
    for (int n = 0; n <= degree; ++n) {
        double ac = 0.0, as = 0.0;
        for (int j = 0; j < samples; ++j) {
            const double arg = n * kTwoPi * j / samples;
            ac += values[j] * std::cos(arg);
            as += values[j] * std::sin(arg);
        }
        if (n == 0)
            out.push_back({0, ac / samples, 0.0});
        else
            out.push_back({n, 2.0 * ac / samples, 2.0 * as / samples});
    }
    return TrigSeries(std::move(out));
}

double TrigSeries::constant_coeff() const {
    for (const auto& t : terms_)
        if (t.n == 0) return t.cos_coeff;
    return 0.0;
}

int TrigSeries::max_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.n);
    return d;
}

TrigSeries TrigSeries::pruned(double threshold) const {
    std::vector<TrigTerm> out;
    for (const auto& t : terms_)
        if (std::abs(t.cos_coeff) + std::abs(t.sin_coeff) > threshold)
            out.push_back(t);
    return TrigSeries(std::move(out));
}

}  // namespace billiards
