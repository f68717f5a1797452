#pragma once

#include "causalci/core_model.hpp"
#include "causalci/rng.hpp"

namespace causalci {

// Draws n observations X = (I - B)^{-1} eps with eps ~ N(0, sigma2 I),
// deterministically for a given (seed, stream).
template <int D>
Dataset<D> sample_lsem(const LsemParams<D>& params, long n, RngSeed seed) {
    Rng rng(seed);
    const SqMat<D> mixing = params.mixing();
    const double sd = std::sqrt(params.sigma2);
    Dataset<D> data;
    data.rows.resize(n, D);
    Eigen::Vector<double, D> eps;
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < D; j += 2) {
            double z0, z1;
            rng.next_normal_pair(z0, z1);
            eps(j) = z0;
            if (j + 1 < D) eps(j + 1) = z1;
        }
        data.rows.row(i) = (sd * (mixing * eps)).transpose();
    }
    return data;
}

// Convenience builder for the bivariate models: direction M1 is
// X2 = beta X1 + eps2, direction M2 is X1 = beta X2 + eps1.
inline LsemParams<2> bivariate_params(const Ordering<2>& branch, double beta, double sigma2 = 1.0) {
    LsemParams<2> p;
    p.ordering = branch;
    p.sigma2 = sigma2;
    p.coeffs(branch[1], branch[0]) = beta;
    return p;
}

}  // namespace causalci
