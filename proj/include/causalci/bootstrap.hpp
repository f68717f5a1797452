#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "causalci/confidence_set.hpp"
#include "causalci/core_model.hpp"
#include "causalci/rng.hpp"

namespace causalci {

// The two resampling procedures the simulations use as baselines. Both fail
// to reach nominal coverage near the model singularity, which is the point
// of including them.

struct BootstrapConfig {
    long resamples = 1000;  // B
    double alpha = 0.05;
    RngSeed seed;
    // scale on the per-edge log(n)/2 penalty of the greedy search score
    double gds_penalty_scale = 0.75;
};

// Direction by variance ordering: effect S12/S11 under (M1) if S11 <= S22,
// else 0 under (M2).
inline double effect_estimate_varorder(const CovarianceMatrix<2>& s) {
    return s.m(0, 0) <= s.m(1, 1) ? s.m(0, 1) / s.m(0, 0) : 0.0;
}

// Greedy DAG search over {empty, M1, M2} maximizing the equal-variance
// Gaussian likelihood with a scaled BIC penalty per edge; the effect is the
// regression slope when the search lands on M1 and zero otherwise. Ties go
// to M1.
inline double effect_estimate_gds(const CovarianceMatrix<2>& s, long n,
                                  double penalty_scale = 0.75) {
    const double s11 = s.m(0, 0), s12 = s.m(0, 1), s22 = s.m(1, 1);
    const double trace_empty = s11 + s22;
    const double trace_m1 = trace_empty - s12 * s12 / s11;
    const double trace_m2 = trace_empty - s12 * s12 / s22;
    const double crit = penalty_scale * std::log(static_cast<double>(n));
    const double lambda_m1 = 2.0 * static_cast<double>(n) * std::log(trace_empty / trace_m1);
    const double lambda_m2 = 2.0 * static_cast<double>(n) * std::log(trace_empty / trace_m2);
    if (lambda_m1 <= crit && lambda_m2 <= crit) return 0.0;  // empty graph wins
    return trace_m1 <= trace_m2 ? s12 / s11 : 0.0;
}

// Type-7 (linear interpolation) quantile of a sorted sample; fixed so
// percentile endpoints are bit-for-bit reproducible per seed.
inline double quantile_type7(const std::vector<double>& sorted_ascending, double p) {
    const auto& x = sorted_ascending;
    const double h = (static_cast<double>(x.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

// Percentile bootstrap interval of an effect estimator: B resamples with
// replacement, the estimator applied to each resample's centered covariance.
inline ConfidenceSet bootstrap_interval(const Dataset<2>& data,
                                        const std::function<double(const CovarianceMatrix<2>&, long)>& estimator,
                                        const BootstrapConfig& cfg) {
    const long n = data.n();
    if (n < 3) throw TooFewRows("bootstrap needs at least d+1 observations");
    std::vector<double> estimates;
    estimates.reserve(static_cast<std::size_t>(cfg.resamples));
    for (long b = 0; b < cfg.resamples; ++b) {
        Rng rng(cfg.seed.child(static_cast<std::uint64_t>(b)));
        double m1 = 0, m2 = 0, s11 = 0, s12 = 0, s22 = 0;
        for (long i = 0; i < n; ++i) {
            const auto row = data.rows.row(static_cast<long>(rng.next_below(static_cast<std::uint64_t>(n))));
            m1 += row(0);
            m2 += row(1);
            s11 += row(0) * row(0);
            s12 += row(0) * row(1);
            s22 += row(1) * row(1);
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        m1 *= inv_n;
        m2 *= inv_n;
        SqMat<2> cov;
        cov << s11 * inv_n - m1 * m1, s12 * inv_n - m1 * m2, s12 * inv_n - m1 * m2,
            s22 * inv_n - m2 * m2;
        try {
            estimates.push_back(estimator(CovarianceMatrix<2>(cov, n), n));
        } catch (const SingularCovariance&) {
            // degenerate resample (e.g. one row drawn n times); skip it
        }
    }
    if (estimates.empty()) throw SingularCovariance("all bootstrap resamples degenerate");
    std::sort(estimates.begin(), estimates.end());
    ConfidenceSet set;
    const double lo = quantile_type7(estimates, cfg.alpha / 2.0);
    const double hi = quantile_type7(estimates, 1.0 - cfg.alpha / 2.0);
    set.nonzero = Interval{lo, hi};
    set.zero_included = lo <= 0.0 && 0.0 <= hi;
    return set;
}

}  // namespace causalci
