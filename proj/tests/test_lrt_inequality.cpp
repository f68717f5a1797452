#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "causalci/lrt_inequality.hpp"
#include "causalci/sampler.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace causalci;
using oracles::lrt1_lambda_grid;
using oracles::mat2;

TEST_CASE("LRT1 statistic vanishes when S satisfies the null") {
    const CovarianceMatrix<2> s(mat2(1.25, 0.5, 0.5, 1.0), 100);
    const auto zero = lrt1_statistic(s, 100, 0.0);
    CHECK(zero.statistic == 0.0);
    CHECK(zero.accepted);
    CHECK(zero.spec == MixtureSpec::half_chi0_chi1());

    const auto at_id = lrt1_statistic(CovarianceMatrix<2>(SqMat<2>::Identity(), 100), 100, 0.0);
    CHECK(at_id.statistic == 0.0);

    const CovarianceMatrix<2> s_m1(mat2(1.0, 0.5, 0.5, 1.25), 500);
    CHECK(lrt1_statistic(s_m1, 500, 0.5).statistic == 0.0);
    CHECK(lrt1_statistic(s_m1, 500, 0.5).spec == MixtureSpec::half_chi1_chi2());
}

TEST_CASE("LRT1 statistic matches the grid maximization oracle") {
    const CovarianceMatrix<2> s(mat2(1.0, 0.5, 0.5, 1.25), 500);
    const auto outcome = lrt1_statistic(s, 500, 0.3);
    CHECK_THAT(outcome.statistic,
               Catch::Matchers::WithinAbs(lrt1_lambda_grid(s, 500, 0.3), 1e-4));

    Rng rng(RngSeed{88, 1});
    for (int i = 0; i < 5; ++i) {
        const CovarianceMatrix<2> sr(test_util::random_pd2(rng), 200);
        for (double psi : {0.0, 0.25, -0.6, 1.4}) {
            const double lib = lrt1_statistic(sr, 200, psi).statistic;
            const double oracle = lrt1_lambda_grid(sr, 200, psi);
            CHECK_THAT(lib, Catch::Matchers::WithinAbs(oracle, 1e-3));
        }
    }
}

TEST_CASE("LRT1 uses the chi1 calibration at |psi| >= 1") {
    const CovarianceMatrix<2> s(mat2(1.0, 0.5, 0.5, 1.25), 100);
    CHECK(lrt1_statistic(s, 100, 1.0).spec == MixtureSpec::chi(1));
    CHECK(lrt1_statistic(s, 100, -1.3).spec == MixtureSpec::chi(1));
}

TEST_CASE("LRT1 is nonnegative and scale-invariant") {
    Rng rng(RngSeed{88, 2});
    for (int i = 0; i < 40; ++i) {
        const SqMat<2> base = test_util::random_pd2(rng);
        for (double psi : {0.0, 0.2, -0.9, 2.0}) {
            const double stat = lrt1_statistic(CovarianceMatrix<2>(base, 300), 300, psi).statistic;
            CHECK(stat >= 0.0);
            for (double c : {0.1, 10.0}) {
                const double scaled =
                    lrt1_statistic(CovarianceMatrix<2>(c * base, 300), 300, psi).statistic;
                if (psi == 0.0) {
                    CHECK_THAT(scaled, Catch::Matchers::WithinAbs(stat, 1e-10));
                } else {
                    // equality-constrained cases are scale-invariant as well
                    CHECK_THAT(scaled, Catch::Matchers::WithinAbs(stat, 1e-8 * (1.0 + stat)));
                }
            }
        }
    }
}

TEST_CASE("LRT1b statistic closed forms") {
    const CovarianceMatrix<2> s_m1(mat2(1.0, 0.5, 0.5, 1.25), 100);
    CHECK(lrt1b_statistic(s_m1, 100, 0.5).statistic == 0.0);
    CHECK(lrt1b_statistic(CovarianceMatrix<2>(SqMat<2>::Identity(), 100), 100, 0.0).statistic ==
          0.0);

    // two-point evaluation: 2 * (l at (beta=.5, s2=1) - l at (beta=.2, s2 profiled))
    const auto outcome = lrt1b_statistic(s_m1, 100, 0.2);
    const double expected = 200.0 * std::log((1.04 - 0.2 + 1.25) / 2.0);
    CHECK_THAT(outcome.statistic, Catch::Matchers::WithinAbs(expected, 1e-10));
    CHECK(outcome.spec == MixtureSpec::half_chi1_chi2());
}

TEST_CASE("LRT1b null never beats the union optimum") {
    Rng rng(RngSeed{88, 3});
    for (int i = 0; i < 50; ++i) {
        const CovarianceMatrix<2> s(test_util::random_pd2(rng), 150);
        for (double psi : {0.0, 0.15, -0.5, 1.2}) {
            CHECK(lrt1b_statistic(s, 150, psi).statistic >= 0.0);
        }
    }
}

TEST_CASE("confidence sets nest in the significance level") {
    const auto data = sample_lsem<2>(bivariate_params(kM1, 0.3), 400, RngSeed{54, 3});
    const auto s = center_and_covariance(data);
    const PsiGrid grid = PsiGrid::around_estimate(s, 400, total_effect(s), 801);
    const auto check_nested = [&](const ConfidenceSet& wide, const ConfidenceSet& narrow) {
        REQUIRE(wide.nonzero.has_value());
        REQUIRE(narrow.nonzero.has_value());
        CHECK(wide.nonzero->lo <= narrow.nonzero->lo + 1e-9);
        CHECK(narrow.nonzero->hi <= wide.nonzero->hi + 1e-9);
        CHECK((!narrow.zero_included || wide.zero_included));
    };
    check_nested(lrt1_confidence_set(s, 400, 0.05, grid), lrt1_confidence_set(s, 400, 0.10, grid));
    check_nested(lrt1b_confidence_set(s, 400, 0.05, grid),
                 lrt1b_confidence_set(s, 400, 0.10, grid));
}

TEST_CASE("LRT1 covers the extension target on an exact model point") {
    // S on the null manifold for psi = 0.5 makes every lambda closed form
    const CovarianceMatrix<2> s(mat2(1.0, 0.5, 0.5, 1.25), 1000);
    const PsiGrid grid = PsiGrid::around_estimate(s, 1000, total_effect(s), 801);
    const auto set = lrt1_confidence_set(s, 1000, 0.05, grid);
    CHECK(set.contains(0.5));
    CHECK_FALSE(set.empty());
}
