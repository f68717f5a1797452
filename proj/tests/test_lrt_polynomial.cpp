#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "causalci/chi_square.hpp"
#include "causalci/lrt_polynomial.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace causalci;
using oracles::lrt2_interval_inversion;
using oracles::mat2;

TEST_CASE("nonzero LRT2 statistic closed forms") {
    const CovarianceMatrix<2> id(SqMat<2>::Identity(), 100);
    for (double psi : {0.1, 0.5, -1.2}) {
        CHECK_THAT(lrt2_statistic_nonzero(id, 100, psi),
                   Catch::Matchers::WithinAbs(200.0 * std::log(1.0 + 0.5 * psi * psi), 1e-10));
    }
    // exact model point: trace = 2 det^{1/2}
    const CovarianceMatrix<2> s(mat2(1.0, 0.5, 0.5, 1.25), 100);
    CHECK_THAT(lrt2_statistic_nonzero(s, 100, 0.5), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("zero LRT2 statistic closed forms") {
    CHECK_THAT(lrt2_statistic_zero(CovarianceMatrix<2>(SqMat<2>::Identity(), 50), 50),
               Catch::Matchers::WithinAbs(0.0, 1e-12));
    // exact M2 point
    CHECK_THAT(lrt2_statistic_zero(CovarianceMatrix<2>(mat2(1.25, 0.5, 0.5, 1.0), 200), 200),
               Catch::Matchers::WithinAbs(0.0, 1e-12));
    // M1 point with nonzero effect: 2n log(2.05/2)
    CHECK_THAT(lrt2_statistic_zero(CovarianceMatrix<2>(mat2(1.0, 0.5, 0.5, 1.25), 100), 100),
               Catch::Matchers::WithinAbs(200.0 * std::log(2.05 / 2.0), 1e-10));
}

TEST_CASE("LRT2 statistics are scale invariant") {
    Rng rng(RngSeed{55, 0});
    for (int i = 0; i < 25; ++i) {
        const SqMat<2> base = test_util::random_pd2(rng);
        for (double c : {0.01, 0.1, 10.0, 1000.0}) {
            CHECK_THAT(lrt2_statistic_nonzero(CovarianceMatrix<2>(c * base, 80), 80, 0.4),
                       Catch::Matchers::WithinAbs(
                           lrt2_statistic_nonzero(CovarianceMatrix<2>(base, 80), 80, 0.4), 1e-9));
            CHECK_THAT(lrt2_statistic_zero(CovarianceMatrix<2>(c * base, 80), 80),
                       Catch::Matchers::WithinAbs(
                           lrt2_statistic_zero(CovarianceMatrix<2>(base, 80), 80), 1e-9));
        }
    }
}

TEST_CASE("lambda(psi) vanishes exactly on the constrained model point") {
    Rng rng(RngSeed{55, 1});
    for (int i = 0; i < 20; ++i) {
        const double psi = 2.0 * rng.next_normal();
        if (psi == 0.0) continue;
        const double s11 = 0.2 + 2.0 * rng.next_uniform();
        // Theta0^(psi): Sigma12 = psi Sigma11 and Sigma22 = (1 + psi^2) Sigma11
        const CovarianceMatrix<2> s(mat2(s11, psi * s11, psi * s11, (1.0 + psi * psi) * s11), 60);
        CHECK_THAT(lrt2_statistic_nonzero(s, 60, psi), Catch::Matchers::WithinAbs(0.0, 1e-10));
        // perturbing away from the manifold makes it strictly positive
        const CovarianceMatrix<2> off(mat2(s11, psi * s11, psi * s11,
                                           (1.0 + psi * psi) * s11 * 1.25),
                                      60);
        CHECK(lrt2_statistic_nonzero(off, 60, psi) > 1e-6);
    }
}

TEST_CASE("Theorem-style closed-form interval on the worked example") {
    const CovarianceMatrix<2> s(mat2(1.0, 0.5, 0.5, 1.25), 100);
    const auto set = lrt2_confidence_set(s, 100, 0.05);
    const double q2 = chisq_quantile(0.95, 2);
    CHECK_THAT(set.discriminant,
               Catch::Matchers::WithinAbs(2.0 * (std::exp(q2 / 200.0) - 1.0), 1e-12));
    REQUIRE(set.interval.has_value());
    CHECK_THAT(set.interval->lo, Catch::Matchers::WithinAbs(0.25337, 1e-4));
    CHECK_THAT(set.interval->hi, Catch::Matchers::WithinAbs(0.74663, 1e-4));
    // lambda(0) = 200 log(1.025) = 4.94 > 3.841: zero excluded
    CHECK_THAT(set.statistic_zero, Catch::Matchers::WithinAbs(200.0 * std::log(1.025), 1e-10));
    CHECK_FALSE(set.zero_included);
    CHECK_FALSE(set.torn);
}

TEST_CASE("identity covariance keeps zero and a symmetric interval") {
    const CovarianceMatrix<2> id(SqMat<2>::Identity(), 400);
    const auto set = lrt2_confidence_set(id, 400, 0.05);
    const double q2 = chisq_quantile(0.95, 2);
    CHECK_THAT(set.discriminant,
               Catch::Matchers::WithinAbs(2.0 * (std::exp(q2 / 800.0) - 1.0), 1e-12));
    REQUIRE(set.interval.has_value());
    CHECK_THAT(set.interval->lo, Catch::Matchers::WithinAbs(-set.interval->hi, 1e-12));
    CHECK(set.zero_included);
}

TEST_CASE("closed-form endpoints agree with grid inversion") {
    Rng rng(RngSeed{55, 2});
    int nonempty = 0;
    for (int i = 0; i < 100; ++i) {
        const CovarianceMatrix<2> s(test_util::random_pd2(rng), 0);
        const long n = 50 + static_cast<long>(rng.next_below(1950));
        const auto closed = lrt2_confidence_set(s, n, 0.05);
        const auto oracle = lrt2_interval_inversion(s, n, 0.05);
        REQUIRE(closed.interval.has_value() == oracle.has_value());
        if (oracle) {
            ++nonempty;
            CHECK_THAT(closed.interval->lo, Catch::Matchers::WithinAbs(oracle->lo, 1e-5));
            CHECK_THAT(closed.interval->hi, Catch::Matchers::WithinAbs(oracle->hi, 1e-5));
        }
    }
    CHECK(nonempty > 0);
}

TEST_CASE("misspecified covariance yields the empty set") {
    // heteroscedastic population covariance, far from both branches
    const CovarianceMatrix<2> s(mat2(1.0, 0.3, 0.3, 4.09), 1000);
    const auto set = lrt2_confidence_set(s, 1000, 0.05);
    CHECK(set.empty());
    CHECK(set.discriminant < 0.0);
    CHECK(set.statistic_zero > chisq_quantile(0.95, 1));
}

TEST_CASE("K < 0 with zero accepted returns the singleton {0}") {
    // exact M2 point (sigma2 = 2, beta12 = 1): zero fits, K = -sigma^4 beta^4 < 0
    const CovarianceMatrix<2> s(mat2(4.0, 2.0, 2.0, 2.0), 2000);
    const auto set = lrt2_confidence_set(s, 2000, 0.05);
    CHECK(set.discriminant < 0.0);
    CHECK_FALSE(set.interval.has_value());
    CHECK(set.zero_included);
    CHECK_FALSE(set.empty());
    const auto cs = set.as_confidence_set();
    CHECK(cs.contains(0.0));
    CHECK(cs.max_width() == 0.0);
}

TEST_CASE("torn case is detected and the zero fallback applied") {
    // near-singular configuration: zero rejected at df 1 while tiny nonzero
    // effects stay accepted at df 2
    const CovarianceMatrix<2> s(mat2(1.0, 0.0426, 0.0426, 1.134), 1000);
    CHECK(lrt2_statistic_zero(s, 1000) > chisq_quantile(0.95, 1));

    const auto raw = lrt2_confidence_set(s, 1000, 0.05, /*include_zero_when_torn=*/false);
    REQUIRE(raw.interval.has_value());
    CHECK(raw.interval->contains(0.0));
    CHECK(raw.torn);
    CHECK_FALSE(raw.zero_included);

    const auto fallback = lrt2_confidence_set(s, 1000, 0.05);
    CHECK(fallback.torn);
    CHECK(fallback.zero_included);
}
