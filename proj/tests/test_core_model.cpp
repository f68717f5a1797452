#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "causalci/core_model.hpp"
#include "causalci/sampler.hpp"
#include "test_util.hpp"

using namespace causalci;

namespace {

Dataset<2> make_dataset(std::initializer_list<std::pair<double, double>> rows) {
    Dataset<2> d;
    d.rows.resize(static_cast<long>(rows.size()), 2);
    long i = 0;
    for (const auto& [a, b] : rows) {
        d.rows(i, 0) = a;
        d.rows(i, 1) = b;
        ++i;
    }
    return d;
}

SqMat<2> mat2(double a, double b, double c, double d) {
    SqMat<2> m;
    m << a, b, c, d;
    return m;
}

// log density of N(0, Sigma) at x, written out directly
double log_normal_density(const Eigen::Vector2d& x, const SqMat<2>& sigma) {
    const double det = sigma.determinant();
    const double quad = x.dot(sigma.inverse() * x);
    return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * quad;
}

}  // namespace

TEST_CASE("center_and_covariance on hand-checked data") {
    const auto cov = center_and_covariance(make_dataset({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}));
    CHECK(cov.m(0, 0) == 0.5);
    CHECK(cov.m(1, 1) == 0.5);
    CHECK(cov.m(0, 1) == 0.0);
    CHECK(cov.n == 4);

    CHECK_THROWS_AS(center_and_covariance(make_dataset({{1, 1}, {-1, -1}, {2, 2}, {0, 0}})),
                    SingularCovariance);
    CHECK_THROWS_AS(center_and_covariance(make_dataset({{1, 1}, {-1, -1}})), TooFewRows);
}

TEST_CASE("sampled covariance approaches the model covariance") {
    const auto data = sample_lsem<2>(bivariate_params(kM1, 0.5), 500, RngSeed{7, 0});
    const auto cov = center_and_covariance(data);
    const SqMat<2> target = mat2(1.0, 0.5, 0.5, 1.25);
    CHECK(std::fabs(cov.m(0, 0) - target(0, 0)) < 0.15);
    CHECK(std::fabs(cov.m(0, 1) - target(0, 1)) < 0.15);
    CHECK(std::fabs(cov.m(1, 1) - target(1, 1)) < 0.15);
}

TEST_CASE("centering zeroes column sums") {
    auto data = sample_lsem<2>(bivariate_params(kM2, 0.3), 777, RngSeed{5, 5});
    data.rows.array() += 3.7;  // shift so centering has work to do
    data.center();
    const double scale = data.rows.cwiseAbs().maxCoeff();
    CHECK(std::fabs(data.rows.col(0).sum()) <= 1e-9 * 777 * std::max(scale, 1.0));
    CHECK(std::fabs(data.rows.col(1).sum()) <= 1e-9 * 777 * std::max(scale, 1.0));
}

TEST_CASE("gaussian log-likelihood closed-form spot values") {
    const CovarianceMatrix<2> s_id(SqMat<2>::Identity(), 2);
    CHECK_THAT(gaussian_loglik<2>(SqMat<2>::Identity(), s_id, 2),
               Catch::Matchers::WithinAbs(-2.0 * std::log(2.0 * std::numbers::pi) - 2.0, 1e-12));

    const CovarianceMatrix<2> s_id10(SqMat<2>::Identity(), 10);
    CHECK_THAT(gaussian_loglik<2>(2.0 * SqMat<2>::Identity(), s_id10, 10),
               Catch::Matchers::WithinAbs(-5.0 * (2.0 * std::log(4.0 * std::numbers::pi) + 1.0),
                                          1e-12));

    CHECK_THROWS_AS(gaussian_loglik<2>(mat2(1, 2, 2, 1), s_id, 2), NotPositiveDefinite);
}

TEST_CASE("gaussian log-likelihood equals the per-observation density sum") {
    Rng rng(RngSeed{100, 3});
    const SqMat<2> sigma = test_util::random_pd2(rng);
    Dataset<2> data = make_dataset({{0.3, -1.2}, {1.7, 0.4}, {-0.5, 0.9}});
    const auto s = second_moment(data);  // raw second moment: zero-mean likelihood
    double direct = 0.0;
    for (long i = 0; i < 3; ++i) direct += log_normal_density(data.rows.row(i), sigma);
    CHECK_THAT(gaussian_loglik<2>(sigma, s, 3), Catch::Matchers::WithinAbs(direct, 1e-10));
}

TEST_CASE("branch MLE closed forms") {
    const CovarianceMatrix<2> s(mat2(1.0, 0.5, 0.5, 1.25), 100);
    const auto [params, loglik] = mle_for_branch<2>(s, 100, kM1);
    CHECK_THAT(params.coeffs(1, 0), Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(params.sigma2, Catch::Matchers::WithinAbs(1.0, 1e-12));

    const CovarianceMatrix<2> s_id(SqMat<2>::Identity(), 50);
    const auto [p_id, l_id] = mle_for_branch<2>(s_id, 50, kM1);
    CHECK(p_id.coeffs(1, 0) == 0.0);
    CHECK_THAT(p_id.sigma2, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("branch MLE agrees with a 2-parameter grid oracle") {
    const CovarianceMatrix<2> s(mat2(1.25, 0.5, 0.5, 1.0), 100);
    const auto [params, loglik] = mle_for_branch<2>(s, 100, kM1);
    CHECK_THAT(params.coeffs(1, 0), Catch::Matchers::WithinAbs(0.4, 1e-12));
    CHECK_THAT(params.sigma2, Catch::Matchers::WithinAbs(0.5 * (1.16 * 1.25 - 0.4 + 1.0), 1e-12));

    const auto oracle = test_util::grid_maximize(
        [&](const std::vector<double>& x) {
            LsemParams<2> p;
            p.ordering = kM1;
            p.coeffs(1, 0) = x[0];
            p.sigma2 = x[1];
            return gaussian_loglik<2>(p.implied_covariance(), s, 100);
        },
        {-2.0, 0.05}, {2.0, 5.0}, 41, 8);
    CHECK_THAT(loglik, Catch::Matchers::WithinAbs(oracle, 1e-4));

    // this S is an exact M2 point, so branch M2 must beat branch M1
    const auto [p2, l2] = mle_for_branch<2>(s, 100, kM2);
    CHECK(loglik < l2);
}

TEST_CASE("restricted union MLE picks the better branch, ties to M1") {
    const CovarianceMatrix<2> s_m1(mat2(1.0, 0.5, 0.5, 1.25), 40);
    const auto r1 = restricted_mle_union<2>(s_m1, 40);
    CHECK(r1.ordering == kM1);
    CHECK((r1.implied.m - s_m1.m).norm() < 1e-12);

    const CovarianceMatrix<2> s_id(SqMat<2>::Identity(), 40);
    const auto r_id = restricted_mle_union<2>(s_id, 40);
    CHECK(r_id.ordering == kM1);
    CHECK((r_id.implied.m - SqMat<2>::Identity()).norm() < 1e-12);

    const CovarianceMatrix<2> s_m2(mat2(1.25, 0.5, 0.5, 1.0), 40);
    const auto r2 = restricted_mle_union<2>(s_m2, 40);
    CHECK(r2.ordering == kM2);
    CHECK((r2.implied.m - s_m2.m).norm() < 1e-12);
}

TEST_CASE("union MLE is exhaustive over branches") {
    Rng rng(RngSeed{2024, 1});
    for (int i = 0; i < 50; ++i) {
        const CovarianceMatrix<2> s(test_util::random_pd2(rng), 60);
        const auto u = restricted_mle_union<2>(s, 60);
        const double l1 = mle_for_branch<2>(s, 60, kM1).second;
        const double l2 = mle_for_branch<2>(s, 60, kM2).second;
        CHECK_THAT(u.loglik, Catch::Matchers::WithinAbs(std::max(l1, l2), 1e-12));
    }
}

TEST_CASE("branch MLE recovers generating parameters") {
    Rng rng(RngSeed{2024, 2});
    for (int i = 0; i < 25; ++i) {
        const auto branch = (rng.next_u64() & 1) ? kM1 : kM2;
        const double beta = 2.0 * rng.next_normal();
        const double sigma2 = 0.2 + 3.0 * rng.next_uniform();
        const auto params = bivariate_params(branch, beta, sigma2);
        const CovarianceMatrix<2> s(params.implied_covariance(), 100);
        const auto [fit, loglik] = mle_for_branch<2>(s, 100, branch);
        CHECK_THAT(fit.coeffs(branch[1], branch[0]),
                   Catch::Matchers::WithinRel(beta, 1e-10));
        CHECK_THAT(fit.sigma2, Catch::Matchers::WithinRel(sigma2, 1e-10));
    }
}

TEST_CASE("unrestricted MLE dominance") {
    Rng rng(RngSeed{2024, 3});
    const CovarianceMatrix<2> s(test_util::random_pd2(rng), 30);
    const double at_s = gaussian_loglik<2>(s.m, s, 30);
    for (int i = 0; i < 100; ++i) {
        const SqMat<2> sigma = test_util::random_pd2(rng);
        CHECK(gaussian_loglik<2>(sigma, s, 30) <= at_s + 1e-12);
    }
}

TEST_CASE("total effect reads the covariance, extended to the full cone") {
    CHECK(total_effect(CovarianceMatrix<2>(mat2(1.0, 0.5, 0.5, 1.25), 10)) == 0.5);
    CHECK(total_effect(CovarianceMatrix<2>(mat2(1.25, 0.5, 0.5, 1.0), 10)) == 0.0);
    CHECK(total_effect(CovarianceMatrix<2>(SqMat<2>::Identity(), 10)) == 0.0);
    // Sigma11 = Sigma22 tie keeps the ratio
    CHECK(total_effect(CovarianceMatrix<2>(mat2(1.0, 0.3, 0.3, 1.0), 10)) == 0.3);
}

TEST_CASE("total effect is invariant under joint rescaling") {
    Rng rng(RngSeed{2024, 4});
    for (int i = 0; i < 20; ++i) {
        const SqMat<2> s = test_util::random_pd2(rng);
        const double base = total_effect(CovarianceMatrix<2>(s, 10));
        for (double c : {1e-3, 0.1, 10.0, 1e3}) {
            CHECK_THAT(total_effect(CovarianceMatrix<2>(c * s, 10)),
                       Catch::Matchers::WithinAbs(base, 1e-12));
        }
    }
}

TEST_CASE("d = 3 branch MLE matches a brute-force grid oracle") {
    Rng rng(RngSeed{2024, 5});
    const auto orderings = all_orderings<3>();
    for (int i = 0; i < 5; ++i) {
        const CovarianceMatrix<3> s(test_util::random_pd3(rng), 80);
        const auto& ordering = orderings[rng.next_below(orderings.size())];
        const auto [params, loglik] = mle_for_branch<3>(s, 80, ordering);

        // free coefficients in a fixed ordering: (pos1<-pos0), (pos2<-pos0), (pos2<-pos1)
        const auto oracle = test_util::grid_maximize(
            [&](const std::vector<double>& x) {
                LsemParams<3> p;
                p.ordering = ordering;
                p.coeffs(ordering[1], ordering[0]) = x[0];
                p.coeffs(ordering[2], ordering[0]) = x[1];
                p.coeffs(ordering[2], ordering[1]) = x[2];
                p.sigma2 = x[3];
                return gaussian_loglik<3>(p.implied_covariance(), s, 80);
            },
            {-4.0, -4.0, -4.0, 0.05}, {4.0, 4.0, 4.0, 8.0}, 13, 10);
        CHECK_THAT(loglik, Catch::Matchers::WithinAbs(oracle, 1e-4));
        CHECK(loglik >= oracle - 1e-9);  // oracle can only undershoot the max
    }
}
