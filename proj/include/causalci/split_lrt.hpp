#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "causalci/confidence_set.hpp"
#include "causalci/core_model.hpp"
#include "causalci/rng.hpp"

namespace causalci {

// Universal-inference split likelihood-ratio confidence sets. The data are
// split into D0 (test half, size k) and D1 (estimation half); a value psi is
// accepted when
//   l0(SigmaTilde1) - lDagger(psi) <= log(1/alpha),
// where l0 is the D0 log-likelihood, lDagger the profile over the model with
// effect psi, and SigmaTilde1 an estimator from D1. Validity is finite-sample
// by Markov's inequality.

enum class SplitRule {
    kSeededShuffle,  // random permutation, then first k vs rest
    kFirstK,
};

struct SplitConfig {
    long k = 0;  // 0 means floor(n/2)
    SplitRule rule = SplitRule::kSeededShuffle;
    RngSeed seed;
};

template <int D>
std::pair<Dataset<D>, Dataset<D>> split_dataset(const Dataset<D>& data, const SplitConfig& cfg) {
    const long n = data.n();
    const long k = cfg.k > 0 ? cfg.k : n / 2;
    if (k < D + 1 || n - k < D + 1)
        throw DegenerateSplit("split halves must each have at least d+1 rows");
    Dataset<D> d0, d1;
    d0.centered = d1.centered = data.centered;
    d0.rows.resize(k, D);
    d1.rows.resize(n - k, D);
    if (cfg.rule == SplitRule::kSeededShuffle) {
        Rng rng(cfg.seed);
        const auto perm = rng.permutation(static_cast<std::size_t>(n));
        for (long i = 0; i < k; ++i) d0.rows.row(i) = data.rows.row(static_cast<long>(perm[i]));
        for (long i = k; i < n; ++i)
            d1.rows.row(i - k) = data.rows.row(static_cast<long>(perm[i]));
    } else {
        d0.rows = data.rows.topRows(k);
        d1.rows = data.rows.bottomRows(n - k);
    }
    return {std::move(d0), std::move(d1)};
}

template <int D>
CovarianceMatrix<D> half_second_moment(const Dataset<D>& half) {
    try {
        return second_moment(half);
    } catch (const Error&) {
        throw DegenerateSplit("split half yields a degenerate covariance");
    }
}

// Profile log-likelihood over { Sigma in M_r : effect = psi } based on the
// D0 covariance S0 of k observations; exact closed forms.
inline double profile_loglik_d2(const CovarianceMatrix<2>& s0, long k, double psi) {
    double tr;
    if (psi == 0.0) {
        tr = s0.m(0, 0) - s0.m(0, 1) * s0.m(0, 1) / s0.m(1, 1) + s0.m(1, 1);
    } else {
        tr = (1.0 + psi * psi) * s0.m(0, 0) - 2.0 * psi * s0.m(0, 1) + s0.m(1, 1);
    }
    return -static_cast<double>(k) * std::log(std::numbers::pi * tr) - static_cast<double>(k);
}

// Closed-form discriminants of the bivariate split-LRT confidence set:
//   G_a = 2 S0_aa alpha^{-1/k} det(Sigma1)^{1/2} exp(tr[Sigma1^{-1} S0]/2 - 1)
//         - S0_aa^2 - det S0.
// G1 >= 0 gives the nonzero interval [L, U]; zero is included iff G2 >= 0.
struct SlrtDiscriminants {
    double g1 = 0.0;
    double g2 = 0.0;
    std::optional<Interval> interval;

    [[nodiscard]] ConfidenceSet as_confidence_set() const {
        ConfidenceSet set;
        set.nonzero = interval;
        set.zero_included = g2 >= 0.0;
        set.torn = !set.zero_included && interval && interval->contains(0.0);
        return set;
    }
};

inline SlrtDiscriminants slrt_discriminants(const CovarianceMatrix<2>& s0, long k,
                                            const SqMat<2>& sigma1, double alpha) {
    SlrtDiscriminants out;
    const double det1 = sigma1.determinant();
    const double tr = (sigma1.inverse() * s0.m).trace();
    const double r = 2.0 * std::pow(alpha, -1.0 / static_cast<double>(k)) * std::sqrt(det1) *
                     std::exp(0.5 * tr - 1.0);
    const double det0 = s0.det();
    out.g1 = s0.m(0, 0) * r - s0.m(0, 0) * s0.m(0, 0) - det0;
    out.g2 = s0.m(1, 1) * r - s0.m(1, 1) * s0.m(1, 1) - det0;
    if (out.g1 >= 0.0) {
        const double root = std::sqrt(out.g1);
        out.interval = Interval{(s0.m(0, 1) - root) / s0.m(0, 0), (s0.m(0, 1) + root) / s0.m(0, 0)};
    }
    return out;
}

// SLRT for d = 2: SigmaTilde1 is the restricted MLE over the two LSEMs on D1.
inline ConfidenceSet slrt_confidence_set(const Dataset<2>& data, double alpha,
                                         const SplitConfig& split,
                                         SlrtDiscriminants* discriminants = nullptr) {
    const Dataset<2> centered = data.centered_copy();
    auto [d0, d1] = split_dataset(centered, split);
    const CovarianceMatrix<2> s0 = half_second_moment(d0);
    const CovarianceMatrix<2> s1 = half_second_moment(d1);
    const SqMat<2> sigma1 = restricted_mle_union<2>(s1, d1.n()).implied.m;
    const SlrtDiscriminants disc = slrt_discriminants(s0, d0.n(), sigma1, alpha);
    if (discriminants) *discriminants = disc;
    return disc.as_confidence_set();
}

// Consistent moment estimator of a covariance matrix in the model of the
// given ordering with effect C(1->2) = psi: least-squares coefficients from
// the sample moments, the direct edge 1->2 solved from the affine relation
// C(1->2) = B(2,1) + sum_m B(2,m) B(m,1), and the error variance set to the
// sample variance of the first variable in the ordering. Returns nothing when
// the ordering does not permit the effect.
template <int D>
std::optional<SqMat<D>> moment_estimator(const CovarianceMatrix<D>& s, const Ordering<D>& ordering,
                                         double psi) {
    int pos_x1 = 0, pos_x2 = 0;
    for (int m = 0; m < D; ++m) {
        if (ordering[m] == 0) pos_x1 = m;
        if (ordering[m] == 1) pos_x2 = m;
    }
    if (pos_x2 < pos_x1 && psi != 0.0) return std::nullopt;
    SqMat<D> coeffs = detail::ls_coefficients<D>(s.m, ordering);
    if (pos_x1 < pos_x2) {
        double indirect = 0.0;
        for (int m = 2; m < D; ++m) indirect += coeffs(1, m) * coeffs(m, 0);
        coeffs(1, 0) = psi - indirect;
    }
    const double sigma2 = s.m(ordering[0], ordering[0]);
    const SqMat<D> mixing = (SqMat<D>::Identity() - coeffs).inverse();
    SqMat<D> implied = sigma2 * mixing * mixing.transpose();
    implied = 0.5 * (implied + implied.transpose().eval());
    if (!detail::passes_pd_guard<D>(implied)) return std::nullopt;
    return implied;
}

// estSLRT: the profile log-likelihood is replaced by l0 at the best moment
// estimator over feasible orderings, and SigmaTilde1 by the unrestricted D1
// covariance.
template <int D>
ConfidenceSet est_slrt_confidence_set(const Dataset<D>& data, double alpha,
                                      const SplitConfig& split, const PsiGrid& grid) {
    const Dataset<D> centered = data.centered_copy();
    auto [d0, d1] = split_dataset(centered, split);
    const CovarianceMatrix<D> s0 = half_second_moment(d0);
    const CovarianceMatrix<D> s1 = half_second_moment(d1);
    const long k = d0.n();
    const double l_ref = gaussian_loglik<D>(s1.m, s0, k);
    const double log_inv_alpha = std::log(1.0 / alpha);
    const auto orderings = all_orderings<D>();

    const auto test = [&](double psi) {
        TestOutcome out;
        out.psi = psi;
        out.critical = log_inv_alpha;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& ordering : orderings) {
            const auto sigma = moment_estimator<D>(s0, ordering, psi);
            if (!sigma) continue;
            best = std::max(best, gaussian_loglik<D>(*sigma, s0, k));
        }
        const double stat = l_ref - best;
        out.statistic = std::max(0.0, stat);
        out.accepted = stat <= log_inv_alpha;
        return out;
    };
    return invert_to_confidence_set(test, grid);
}

namespace detail {

// Quadratic-form helpers on the D0 covariance for the d = 3 profile.
inline double quad(const SqMat<3>& s, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return a.dot(s * b);
}

}  // namespace detail

// Minimum of tr[(I-B)^T (I-B) S] over coefficient matrices B supported on the
// ordering and satisfying C(1->2) = psi. Exact for every ordering except
// (1,3,2), where the problem reduces to a one-dimensional minimization that
// is solved by scan plus golden-section refinement. Returns nothing when the
// ordering does not permit the effect.
inline std::optional<double> profile_trace_d3(const CovarianceMatrix<3>& s,
                                              const Ordering<3>& ordering, double psi) {
    const SqMat<3>& m = s.m;
    int pos_x1 = 0, pos_x2 = 0;
    for (int q = 0; q < 3; ++q) {
        if (ordering[q] == 0) pos_x1 = q;
        if (ordering[q] == 1) pos_x2 = q;
    }
    if (pos_x2 < pos_x1) {
        if (psi != 0.0) return std::nullopt;
        return detail::profiled_trace<3>(m, detail::ls_coefficients<3>(m, ordering));
    }

    // residual trace of one node regressed on a predecessor set, with the
    // node's "target" direction u fixed (u encodes pinned coefficients)
    const auto residual = [&](const Eigen::Vector3d& u, std::initializer_list<int> preds) {
        double q = detail::quad(m, u, u);
        const int np = static_cast<int>(preds.size());
        if (np == 0) return q;
        Eigen::MatrixXd spp(np, np);
        Eigen::VectorXd spu(np);
        int a = 0;
        for (int p : preds) {
            spu(a) = detail::quad(m, u, Eigen::Vector3d::Unit(p));
            int b = 0;
            for (int r : preds) {
                spp(a, b) = m(p, r);
                ++b;
            }
            ++a;
        }
        return q - spu.dot(spp.ldlt().solve(spu));
    };

    const Eigen::Vector3d e0 = Eigen::Vector3d::Unit(0);
    const Eigen::Vector3d e1 = Eigen::Vector3d::Unit(1);
    const Eigen::Vector3d e2 = Eigen::Vector3d::Unit(2);
    const Eigen::Vector3d u = e1 - psi * e0;  // X2 residual direction with beta21 pinned

    if (ordering == Ordering<3>{0, 1, 2}) {
        // C = beta21; X3 free on {X1, X2}
        return m(0, 0) + residual(u, {}) + residual(e2, {0, 1});
    }
    if (ordering == Ordering<3>{2, 0, 1}) {
        // C = beta21 (X3 has no parents); X2 keeps a free coefficient on X3
        return m(2, 2) + residual(e0, {2}) + residual(u, {2});
    }
    // ordering (0,2,1): C = beta21 + beta23 * beta31 is bilinear; eliminate
    // beta21 and profile the X2 row in closed form, leaving beta31 =: b free:
    //   T(b) = S11 + q3(b) + min_c (u - c w)^T S (u - c w),  w = e3 - b e1.
    const auto t_of_b = [&](double b) {
        const Eigen::Vector3d w = e2 - b * e0;
        const double q3 = detail::quad(m, w, w);
        const double usw = detail::quad(m, u, w);
        return m(0, 0) + q3 + detail::quad(m, u, u) - usw * usw / q3;
    };
    const double b_ls = m(0, 2) / m(0, 0);
    const double t_at_ls = t_of_b(b_ls);
    const double resid3 = m(2, 2) - m(0, 2) * m(0, 2) / m(0, 0);
    // q3(b) <= T(b0) - S11 restricts the minimizer to a computable bracket
    const double radius =
        std::sqrt(std::max(0.0, (t_at_ls - m(0, 0) - resid3) / m(0, 0))) + 1e-6;
    double lo = b_ls - radius;
    double hi = b_ls + radius;
    int best_i = 0;
    double best_t = std::numeric_limits<double>::infinity();
    constexpr int kScan = 129;
    for (int i = 0; i < kScan; ++i) {
        const double b = lo + (hi - lo) * i / (kScan - 1);
        const double t = t_of_b(b);
        if (t < best_t) {
            best_t = t;
            best_i = i;
        }
    }
    double a = lo + (hi - lo) * std::max(0, best_i - 1) / (kScan - 1);
    double b = lo + (hi - lo) * std::min(kScan - 1, best_i + 1) / (kScan - 1);
    constexpr double kGolden = 0.6180339887498949;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = t_of_b(x1);
    double f2 = t_of_b(x2);
    for (int it = 0; it < 120 && (b - a) > 1e-12 * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = t_of_b(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = t_of_b(x2);
        }
    }
    return std::min({best_t, f1, f2});
}

// Profile log-likelihood for d = 3: the best ordering's profiled trace turned
// into the sigma2-profiled Gaussian log-likelihood.
inline std::optional<double> profile_loglik_d3(const CovarianceMatrix<3>& s0, long k, double psi) {
    double best_trace = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& ordering : all_orderings<3>()) {
        const auto t = profile_trace_d3(s0, ordering, psi);
        if (t && std::isfinite(*t) && *t < best_trace) {
            best_trace = *t;
            any = true;
        }
    }
    if (!any) return std::nullopt;
    const double kk = static_cast<double>(k);
    return -1.5 * kk * std::log(2.0 * std::numbers::pi * best_trace / 3.0) - 1.5 * kk;
}

// SLRT for d = 3 with the numerically profiled likelihood. A psi whose
// profile evaluation fails is accepted conservatively: universal-inference
// validity must survive numerical failure, at the cost of a wider set.
inline ConfidenceSet slrt_numeric_confidence_set_d3(const Dataset<3>& data, double alpha,
                                                    const SplitConfig& split, const PsiGrid& grid) {
    const Dataset<3> centered = data.centered_copy();
    auto [d0, d1] = split_dataset(centered, split);
    const CovarianceMatrix<3> s0 = half_second_moment(d0);
    const CovarianceMatrix<3> s1 = half_second_moment(d1);
    const long k = d0.n();
    const SqMat<3> sigma1 = restricted_mle_union<3>(s1, d1.n()).implied.m;
    const double l_ref = gaussian_loglik<3>(sigma1, s0, k);
    const double log_inv_alpha = std::log(1.0 / alpha);

    int failures = 0;
    const auto test = [&](double psi) {
        TestOutcome out;
        out.psi = psi;
        out.critical = log_inv_alpha;
        const auto profile = profile_loglik_d3(s0, k, psi);
        if (!profile || !std::isfinite(*profile)) {
            ++failures;
            out.accepted = true;
            return out;
        }
        const double stat = l_ref - *profile;
        out.statistic = std::max(0.0, stat);
        out.accepted = stat <= log_inv_alpha;
        return out;
    };
    ConfidenceSet set = invert_to_confidence_set(test, grid);
    set.optimizer_failures = failures;
    return set;
}

}  // namespace causalci
