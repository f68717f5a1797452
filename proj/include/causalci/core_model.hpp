#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "causalci/error.hpp"

namespace causalci {

template <int D>
using SqMat = Eigen::Matrix<double, D, D>;

template <int D>
using DataMat = Eigen::Matrix<double, Eigen::Dynamic, D>;

// Causal ordering: ordering[m] is the variable (0-based) at position m.
template <int D>
using Ordering = std::array<int, D>;

inline constexpr Ordering<2> kM1{0, 1};  // X1 -> X2
inline constexpr Ordering<2> kM2{1, 0};  // X1 <- X2

template <int D>
std::vector<Ordering<D>> all_orderings() {
    Ordering<D> o;
    for (int i = 0; i < D; ++i) o[i] = i;
    std::vector<Ordering<D>> out;
    do {
        out.push_back(o);
    } while (std::next_permutation(o.begin(), o.end()));
    return out;
}

namespace detail {

// Leading principal minors must exceed 1e-12 times the product of the
// corresponding diagonal entries (scale-free positive-definiteness guard).
template <int D>
bool passes_pd_guard(const SqMat<D>& m) {
    double diag_prod = 1.0;
    for (int k = 1; k <= D; ++k) {
        diag_prod *= m(k - 1, k - 1);
        const double minor = m.topLeftCorner(k, k).determinant();
        if (!(minor > 1e-12 * diag_prod)) return false;
    }
    return true;
}

}  // namespace detail

// Observation matrix, one row per observation.
template <int D>
struct Dataset {
    DataMat<D> rows;
    bool centered = false;

    [[nodiscard]] long n() const { return rows.rows(); }

    // Subtracts column means in place.
    void center() {
        const Eigen::RowVector<double, D> mean = rows.colwise().mean();
        rows.rowwise() -= mean;
        centered = true;
    }

    [[nodiscard]] Dataset centered_copy() const {
        Dataset d = *this;
        if (!d.centered) d.center();
        return d;
    }
};

// Sample covariance with divisor n (not n-1), the sufficient statistic
// for the zero-mean Gaussian likelihood used throughout.
template <int D>
struct CovarianceMatrix {
    SqMat<D> m;
    long n = 0;

    CovarianceMatrix() : m(SqMat<D>::Identity()) {}

    CovarianceMatrix(const SqMat<D>& entries, long sample_size) : m(entries), n(sample_size) {
        m = 0.5 * (m + m.transpose().eval());  // store exactly symmetric
        if (!detail::passes_pd_guard<D>(m))
            throw SingularCovariance("covariance matrix fails positive-definiteness guard");
    }

    [[nodiscard]] double det() const { return m.determinant(); }
};

// (1/n) sum_i x_i x_i^T without centering; covariance of mean-zero data.
template <int D>
CovarianceMatrix<D> second_moment(const Dataset<D>& data) {
    const long n = data.n();
    if (n < D + 1) throw TooFewRows("need at least d+1 observations");
    SqMat<D> s = data.rows.transpose() * data.rows / static_cast<double>(n);
    return CovarianceMatrix<D>(s, n);
}

// Centers the data and returns (1/n) sum (x_i - xbar)(x_i - xbar)^T.
template <int D>
CovarianceMatrix<D> center_and_covariance(const Dataset<D>& data) {
    const long n = data.n();
    if (n < D + 1) throw TooFewRows("need at least d+1 observations");
    return second_moment(data.centered_copy());
}

// Gaussian log-likelihood of n zero-mean observations with sample covariance S:
//   (n/2) * ( -log det(2 pi Sigma) - tr(Sigma^{-1} S) ).
template <int D>
double gaussian_loglik(const SqMat<D>& sigma, const CovarianceMatrix<D>& s, long n) {
    const SqMat<D> sym = 0.5 * (sigma + sigma.transpose().eval());
    if (!detail::passes_pd_guard<D>(sym)) throw NotPositiveDefinite("sigma is not positive definite");
    const double logdet = std::log(sym.determinant()) + D * std::log(2.0 * std::numbers::pi);
    const double trace = (sym.inverse() * s.m).trace();
    return 0.5 * static_cast<double>(n) * (-logdet - trace);
}

// Structural parameters (ordering, coefficient matrix, common error variance).
template <int D>
struct LsemParams {
    Ordering<D> ordering{};
    SqMat<D> coeffs = SqMat<D>::Zero();  // coeffs(j,i) — edge i -> j
    double sigma2 = 1.0;

    [[nodiscard]] SqMat<D> mixing() const {  // (I - B)^{-1}
        return (SqMat<D>::Identity() - coeffs).inverse();
    }

    [[nodiscard]] SqMat<D> implied_covariance() const {
        const SqMat<D> m = mixing();
        return sigma2 * m * m.transpose();
    }

    // Total causal effect of variable i on variable j: (I-B)^{-1}(j,i).
    [[nodiscard]] double effect(int i, int j) const { return mixing()(j, i); }
};

namespace detail {

// Least-squares coefficients of each node on its ordering predecessors.
template <int D>
SqMat<D> ls_coefficients(const SqMat<D>& s, const Ordering<D>& ordering) {
    SqMat<D> coeffs = SqMat<D>::Zero();
    for (int m = 1; m < D; ++m) {
        const int j = ordering[m];
        Eigen::MatrixXd spp(m, m);
        Eigen::VectorXd spj(m);
        for (int a = 0; a < m; ++a) {
            spj(a) = s(ordering[a], j);
            for (int b = 0; b < m; ++b) spp(a, b) = s(ordering[a], ordering[b]);
        }
        const Eigen::VectorXd beta = spp.ldlt().solve(spj);
        for (int a = 0; a < m; ++a) coeffs(j, ordering[a]) = beta(a);
    }
    return coeffs;
}

// tr[(I - B)^T (I - B) S]; equals d * sigma2_hat at the profiled optimum.
template <int D>
double profiled_trace(const SqMat<D>& s, const SqMat<D>& coeffs) {
    const SqMat<D> a = SqMat<D>::Identity() - coeffs;
    return (a.transpose() * a * s).trace();
}

}  // namespace detail

// Maximum-likelihood fit within one ordering: regression coefficients of each
// node on its predecessors and sigma2 = tr[(I-B)^T (I-B) S] / d.
template <int D>
std::pair<LsemParams<D>, double> mle_for_branch(const CovarianceMatrix<D>& s, long n,
                                                const Ordering<D>& ordering) {
    LsemParams<D> params;
    params.ordering = ordering;
    params.coeffs = detail::ls_coefficients<D>(s.m, ordering);
    params.sigma2 = detail::profiled_trace<D>(s.m, params.coeffs) / D;
    const double loglik = gaussian_loglik<D>(params.implied_covariance(), s, n);
    return {params, loglik};
}

template <int D>
struct UnionMleResult {
    LsemParams<D> params;
    CovarianceMatrix<D> implied;
    Ordering<D> ordering;
    double loglik;
};

// MLE over the union of all orderings; ties resolved toward the
// lexicographically first ordering (M1 for d = 2).
template <int D>
UnionMleResult<D> restricted_mle_union(const CovarianceMatrix<D>& s, long n) {
    UnionMleResult<D> best;
    bool first = true;
    for (const auto& ordering : all_orderings<D>()) {
        auto [params, loglik] = mle_for_branch<D>(s, n, ordering);
        if (first || loglik > best.loglik) {
            best = UnionMleResult<D>{params, CovarianceMatrix<D>(params.implied_covariance(), n),
                                     ordering, loglik};
            first = false;
        }
    }
    return best;
}

// Total causal effect of X1 on X2 read off a covariance matrix, extended to
// the full p.d. cone: Sigma12/Sigma11 when Sigma11 <= Sigma22, else 0.
inline double total_effect(const CovarianceMatrix<2>& s) {
    return s.m(0, 0) <= s.m(1, 1) ? s.m(0, 1) / s.m(0, 0) : 0.0;
}

}  // namespace causalci
