#pragma once

#include <cmath>
#include <optional>

#include "causalci/chi_square.hpp"
#include "causalci/confidence_set.hpp"
#include "causalci/core_model.hpp"

namespace causalci {

// LRT2: likelihood-ratio tests of the polynomial model constraints.
//
// For psi != 0 the null is the one-dimensional manifold
//   { Sigma12 = psi Sigma11, Sigma11^2 = det Sigma }
// inside the p.d. cone; for psi = 0 it is the two-dimensional manifold
//   { Sigma22^2 = det Sigma }.
// Both statistics have explicit closed forms, and the acceptance region in
// psi is an interval whose endpoints solve a quadratic.

// lambda^(psi) = 2n log( tr[Q_psi S] / (2 det(S)^{1/2}) ),
// Q_psi = [[1+psi^2, -psi], [-psi, 1]]; reference distribution chi^2_2.
inline double lrt2_statistic_nonzero(const CovarianceMatrix<2>& s, long n, double psi) {
    const double tr = (1.0 + psi * psi) * s.m(0, 0) - 2.0 * psi * s.m(0, 1) + s.m(1, 1);
    return 2.0 * static_cast<double>(n) * std::log(tr / (2.0 * std::sqrt(s.det())));
}

// lambda^(0) = 2n log( (S11 - S12^2/S22 + S22) / (2 det(S)^{1/2}) );
// reference distribution chi^2_1.
inline double lrt2_statistic_zero(const CovarianceMatrix<2>& s, long n) {
    const double num = s.m(0, 0) - s.m(0, 1) * s.m(0, 1) / s.m(1, 1) + s.m(1, 1);
    return 2.0 * static_cast<double>(n) * std::log(num / (2.0 * std::sqrt(s.det())));
}

// Closed-form confidence set. K >= 0 yields the nonzero interval
// [ (S12 - sqrt(K))/S11, (S12 + sqrt(K))/S11 ]; zero membership is decided by
// the chi^2_1 test of lambda^(0). An empty set is a legitimate value and
// signals model misspecification.
struct Lrt2Interval {
    double discriminant = 0.0;  // K
    std::optional<Interval> interval;
    bool zero_included = false;
    // interval straddles 0 while the zero test rejects; when
    // include_zero_when_torn is set (default) zero is added back
    bool torn = false;
    double statistic_zero = 0.0;

    [[nodiscard]] bool empty() const { return !interval.has_value() && !zero_included; }

    [[nodiscard]] ConfidenceSet as_confidence_set() const {
        ConfidenceSet set;
        set.nonzero = interval;
        set.zero_included = zero_included;
        set.torn = torn;
        return set;
    }
};

inline Lrt2Interval lrt2_confidence_set(const CovarianceMatrix<2>& s, long n, double alpha,
                                        bool include_zero_when_torn = true) {
    Lrt2Interval out;
    const double det = s.det();
    const double q2 = chisq_quantile(1.0 - alpha, 2);
    out.discriminant = 2.0 * s.m(0, 0) * std::sqrt(det) * std::exp(q2 / (2.0 * static_cast<double>(n))) -
                       s.m(0, 0) * s.m(0, 0) - det;
    if (out.discriminant >= 0.0) {
        const double root = std::sqrt(out.discriminant);
        out.interval = Interval{(s.m(0, 1) - root) / s.m(0, 0), (s.m(0, 1) + root) / s.m(0, 0)};
    }
    out.statistic_zero = lrt2_statistic_zero(s, n);
    out.zero_included = out.statistic_zero <= chisq_quantile(1.0 - alpha, 1);
    if (!out.zero_included && out.interval && out.interval->contains(0.0)) {
        out.torn = true;
        if (include_zero_when_torn) out.zero_included = true;
    }
    return out;
}

}  // namespace causalci
