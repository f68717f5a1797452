#pragma once

#include <cmath>

#include "causalci/chi_square.hpp"
#include "causalci/confidence_set.hpp"
#include "causalci/core_model.hpp"

namespace causalci {

// LRT1: likelihood-ratio tests of the variance-inequality encoding of the
// hypothesized effect, with the alternative relaxed to the full p.d. cone.
// Three null hypotheses arise:
//   psi = 0:        Sigma11 >= Sigma22
//   0 < |psi| < 1:  Sigma12 = psi Sigma11 and Sigma11 <= Sigma22
//   |psi| >= 1:     Sigma12 = psi Sigma11 (the inequality is implied)
// with chi-bar-square limits .5chi0+.5chi1, .5chi1+.5chi2 and chi1.
//
// All constrained optima are closed-form. Under the equality constraint the
// likelihood separates in (u, v) = (Sigma11, Sigma22 - psi^2 Sigma11), giving
// u = S11 and v = psi^2 S11 - 2 psi S12 + S22; at every constrained optimum
// tr(Sigma^{-1} S) = 2, so lambda = n log(det SigmaH0 / det S).

namespace detail {

// log det of the H0-optimal covariance for the equality constraint
// Sigma12 = psi Sigma11 (no inequality active).
inline double lrt1_equality_logdet(const CovarianceMatrix<2>& s, double psi) {
    const double q = psi * psi * s.m(0, 0) - 2.0 * psi * s.m(0, 1) + s.m(1, 1);
    return std::log(s.m(0, 0) * q);
}

}  // namespace detail

inline MixtureSpec lrt1_mixture(double psi) {
    if (psi == 0.0) return MixtureSpec::half_chi0_chi1();
    if (std::fabs(psi) < 1.0) return MixtureSpec::half_chi1_chi2();
    return MixtureSpec::chi(1);
}

// Likelihood-ratio statistic of H0: effect = psi against the full cone.
inline TestOutcome lrt1_statistic(const CovarianceMatrix<2>& s, long n, double psi,
                                  double alpha = 0.05) {
    TestOutcome out;
    out.psi = psi;
    out.spec = lrt1_mixture(psi);
    const double log_det_s = std::log(s.det());
    double log_det_h0;
    if (psi == 0.0) {
        if (s.m(0, 0) >= s.m(1, 1)) {
            log_det_h0 = log_det_s;  // S itself satisfies the null
        } else {
            // optimum on the boundary Sigma11 = Sigma22: [[m,S12],[S12,m]]
            const double m = 0.5 * (s.m(0, 0) + s.m(1, 1));
            log_det_h0 = std::log(m * m - s.m(0, 1) * s.m(0, 1));
        }
    } else if (std::fabs(psi) >= 1.0) {
        log_det_h0 = detail::lrt1_equality_logdet(s, psi);
    } else {
        // KKT: try the equality-only optimum, fall back to the boundary
        // Sigma = a [[1, psi], [psi, 1]] if it violates Sigma11 <= Sigma22
        const double c_hat = 2.0 * psi * psi * s.m(0, 0) - 2.0 * psi * s.m(0, 1) + s.m(1, 1);
        if (s.m(0, 0) <= c_hat) {
            log_det_h0 = detail::lrt1_equality_logdet(s, psi);
        } else {
            const double tr_qinv_s =
                (s.m(0, 0) - 2.0 * psi * s.m(0, 1) + s.m(1, 1)) / (1.0 - psi * psi);
            const double a = 0.5 * tr_qinv_s;
            log_det_h0 = std::log(a * a * (1.0 - psi * psi));
        }
    }
    out.statistic = std::max(0.0, static_cast<double>(n) * (log_det_h0 - log_det_s));
    out.critical = mixture_quantile(1.0 - alpha, out.spec);
    out.accepted = out.statistic <= out.critical;
    return out;
}

// LRT1b: heuristic variant with both hypotheses restricted to the union of
// the two LSEMs. The numerator profiles over both branches; the null fixes
// branch M1 with beta21 = psi (psi != 0) or profiles branch M2 (psi = 0).
// Critical values reuse the LRT1 mixtures.
inline TestOutcome lrt1b_statistic(const CovarianceMatrix<2>& s, long n, double psi,
                                   double alpha = 0.05) {
    TestOutcome out;
    out.psi = psi;
    out.spec = lrt1_mixture(psi);
    const double trace_m1 = detail::profiled_trace<2>(s.m, detail::ls_coefficients<2>(s.m, kM1));
    const double trace_m2 = detail::profiled_trace<2>(s.m, detail::ls_coefficients<2>(s.m, kM2));
    const double trace_union = std::min(trace_m1, trace_m2);
    double trace_h0;
    if (psi == 0.0) {
        trace_h0 = trace_m2;
    } else {
        trace_h0 = (1.0 + psi * psi) * s.m(0, 0) - 2.0 * psi * s.m(0, 1) + s.m(1, 1);
    }
    out.statistic = std::max(0.0, 2.0 * static_cast<double>(n) * std::log(trace_h0 / trace_union));
    out.critical = mixture_quantile(1.0 - alpha, out.spec);
    out.accepted = out.statistic <= out.critical;
    return out;
}

// Confidence set for LRT1/LRT1b by grid inversion.
template <typename StatFn>
ConfidenceSet invert_lrt_family(const StatFn& statfn, const CovarianceMatrix<2>& s, long n,
                                double alpha, const PsiGrid& grid) {
    return invert_to_confidence_set(
        [&](double psi) { return statfn(s, n, psi, alpha); }, grid);
}

inline ConfidenceSet lrt1_confidence_set(const CovarianceMatrix<2>& s, long n, double alpha,
                                         const PsiGrid& grid) {
    return invert_lrt_family(
        [](const CovarianceMatrix<2>& sm, long nn, double psi, double a) {
            return lrt1_statistic(sm, nn, psi, a);
        },
        s, n, alpha, grid);
}

inline ConfidenceSet lrt1b_confidence_set(const CovarianceMatrix<2>& s, long n, double alpha,
                                          const PsiGrid& grid) {
    return invert_lrt_family(
        [](const CovarianceMatrix<2>& sm, long nn, double psi, double a) {
            return lrt1b_statistic(sm, nn, psi, a);
        },
        s, n, alpha, grid);
}

}  // namespace causalci
