#pragma once

#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

#include "causalci/error.hpp"

namespace causalci {

namespace detail {

// Regularized lower incomplete gamma P(a, x), series/continued-fraction split.
// Absolute error well below 1e-12 over the chi-square range used here.
inline double regularized_gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error("regularized_gamma_p: domain error");
    if (x == 0.0) return 0.0;
    const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        // series: P(a,x) = x^a e^-x / Gamma(a) * sum x^n / (a)_{n+1}
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < 500; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
        }
        return std::exp(log_prefactor) * sum;
    }
    // continued fraction for Q(a,x), modified Lentz
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(log_prefactor) * h;
}

}  // namespace detail

// CDF of the chi-square distribution with df degrees of freedom.
inline double chisq_cdf(double x, int df) {
    if (df <= 0) throw Error("chisq_cdf: df must be positive");
    if (x < 0.0) throw Error("chisq_cdf: x must be nonnegative");
    return detail::regularized_gamma_p(0.5 * df, 0.5 * x);
}

// Finite chi-square mixture (chi-bar-square); df 0 denotes a point mass at 0.
struct MixtureSpec {
    struct Component {
        double weight;
        int df;
    };
    std::vector<Component> components;

    MixtureSpec() = default;
    MixtureSpec(std::initializer_list<Component> c) : components(c) {}

    static MixtureSpec chi(int df) { return MixtureSpec{{1.0, df}}; }
    // limit law for the variance-inequality null (psi = 0)
    static MixtureSpec half_chi0_chi1() { return MixtureSpec{{0.5, 0}, {0.5, 1}}; }
    // limit law for the equality-plus-inequality null (0 < |psi| < 1)
    static MixtureSpec half_chi1_chi2() { return MixtureSpec{{0.5, 1}, {0.5, 2}}; }

    [[nodiscard]] double cdf(double x) const {
        if (x < 0.0) return 0.0;
        double p = 0.0;
        for (const auto& c : components) p += c.weight * (c.df == 0 ? 1.0 : chisq_cdf(x, c.df));
        return p;
    }

    [[nodiscard]] double mass_at_zero() const {
        double w = 0.0;
        for (const auto& c : components) {
            if (c.df == 0) w += c.weight;
        }
        return w;
    }

    [[nodiscard]] bool operator==(const MixtureSpec& other) const {
        if (components.size() != other.components.size()) return false;
        for (std::size_t i = 0; i < components.size(); ++i) {
            if (components[i].df != other.components[i].df ||
                std::fabs(components[i].weight - other.components[i].weight) > 1e-15)
                return false;
        }
        return true;
    }
};

// Quantile of a chi-square mixture by bisection on the CDF. If p does not
// exceed the point mass at zero the quantile is 0 (flagged via *at_atom).
inline double mixture_quantile(double p, const MixtureSpec& spec, bool* at_atom = nullptr) {
    if (!(p > 0.0 && p < 1.0)) throw Error("mixture_quantile: p must be in (0,1)");
    if (at_atom) *at_atom = false;
    if (p <= spec.mass_at_zero() + 1e-15) {
        if (at_atom) *at_atom = true;
        return 0.0;
    }
    double lo = 0.0;
    double hi = 200.0;
    while (spec.cdf(hi) < p) {
        hi *= 2.0;
        if (hi > 1e8) throw Error("mixture_quantile: bracket failure");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-10 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (spec.cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double chisq_quantile(double p, int df) {
    return mixture_quantile(p, MixtureSpec::chi(df));
}

}  // namespace causalci
