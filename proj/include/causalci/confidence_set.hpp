#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "causalci/chi_square.hpp"
#include "causalci/core_model.hpp"
#include "causalci/error.hpp"

namespace causalci {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const { return hi - lo; }
    [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
};

// Confidence set for the total causal effect. The nonzero part is reported as
// a closed interval (hull of accepted nonzero psi); membership of psi = 0 is
// tracked separately because the zero hypothesis has its own test.
struct ConfidenceSet {
    std::optional<Interval> nonzero;
    bool zero_included = false;
    // zero was rejected although the nonzero interval straddles 0
    bool torn = false;
    // grid acceptance region was not an interval; hull reported
    bool noncontiguous = false;
    // psi points accepted conservatively after a numerical failure
    int optimizer_failures = 0;

    [[nodiscard]] bool empty() const { return !nonzero.has_value() && !zero_included; }

    [[nodiscard]] bool contains(double psi) const {
        if (psi == 0.0) return zero_included;
        return nonzero.has_value() && nonzero->contains(psi);
    }

    // Width of the smallest interval containing the whole set; 0 for {0} and
    // for the empty set.
    [[nodiscard]] double max_width() const {
        if (!nonzero) return 0.0;
        double lo = nonzero->lo;
        double hi = nonzero->hi;
        if (zero_included) {
            lo = std::min(lo, 0.0);
            hi = std::max(hi, 0.0);
        }
        return hi - lo;
    }
};

// Outcome of one level-alpha test of H0: effect = psi.
struct TestOutcome {
    double psi = 0.0;
    double statistic = 0.0;
    MixtureSpec spec;
    double critical = 0.0;
    bool accepted = false;
};

// Grid of hypothesized effects; always contains 0 and the point estimate.
struct PsiGrid {
    std::vector<double> points;

    static PsiGrid linear(double lo, double hi, int count) {
        if (!(lo < hi) || count < 2) throw ConfigError("PsiGrid: need lo < hi and count >= 2");
        PsiGrid g;
        g.points.reserve(static_cast<std::size_t>(count) + 2);
        for (int i = 0; i < count; ++i)
            g.points.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
        g.add(0.0);
        return g;
    }

    // Default grid: 2001 points spanning the point estimate +- 6 standard
    // errors, se^2 = det(S) / (n S11^2), augmented with {0, estimate}.
    template <int D>
    static PsiGrid around_estimate(const CovarianceMatrix<D>& s, long n, double estimate,
                                   int count = 2001) {
        const double s11 = s.m(0, 0);
        const double det12 = s11 * s.m(1, 1) - s.m(0, 1) * s.m(0, 1);
        const double se = std::sqrt(std::max(det12, 1e-300) / (static_cast<double>(n) * s11 * s11));
        PsiGrid g = linear(estimate - 6.0 * se, estimate + 6.0 * se, count);
        g.add(estimate);
        return g;
    }

    void add(double psi) {
        const auto it = std::lower_bound(points.begin(), points.end(), psi);
        if (it == points.end() || *it != psi) points.insert(it, psi);
    }
};

// Builds the confidence set {psi : test accepts psi} from per-psi tests on a
// grid. The nonzero part is the hull of accepted nonzero grid points with the
// two endpoints refined by bisection to 1e-6; psi = 0 membership comes from
// its own test. Non-interval acceptance patterns are flagged, not fixed.
inline ConfidenceSet invert_to_confidence_set(const std::function<TestOutcome(double)>& test,
                                              const PsiGrid& grid) {
    ConfidenceSet set;
    const auto& psis = grid.points;
    std::vector<bool> accepted(psis.size());
    long first_acc = -1;
    long last_acc = -1;
    for (std::size_t i = 0; i < psis.size(); ++i) {
        if (psis[i] == 0.0) {
            accepted[i] = false;  // zero handled by its own test below
            continue;
        }
        accepted[i] = test(psis[i]).accepted;
        if (accepted[i]) {
            if (first_acc < 0) first_acc = static_cast<long>(i);
            last_acc = static_cast<long>(i);
        }
    }
    set.zero_included = test(0.0).accepted;

    if (first_acc >= 0) {
        for (long i = first_acc; i <= last_acc; ++i) {
            if (!accepted[static_cast<std::size_t>(i)] && psis[static_cast<std::size_t>(i)] != 0.0)
                set.noncontiguous = true;
        }
        const auto refine = [&](double inside, double outside) {
            for (int it = 0; it < 60 && std::fabs(outside - inside) > 1e-6; ++it) {
                const double mid = 0.5 * (inside + outside);
                if (mid == 0.0) break;
                (test(mid).accepted ? inside : outside) = mid;
            }
            return inside;
        };
        double lo = psis[static_cast<std::size_t>(first_acc)];
        double hi = psis[static_cast<std::size_t>(last_acc)];
        if (first_acc > 0) lo = refine(lo, psis[static_cast<std::size_t>(first_acc - 1)]);
        if (last_acc + 1 < static_cast<long>(psis.size()))
            hi = refine(hi, psis[static_cast<std::size_t>(last_acc + 1)]);
        set.nonzero = Interval{lo, hi};
        set.torn = !set.zero_included && set.nonzero->contains(0.0);
    }
    return set;
}

}  // namespace causalci
