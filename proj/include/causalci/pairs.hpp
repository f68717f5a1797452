#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "causalci/core_model.hpp"
#include "causalci/error.hpp"
#include "causalci/experiment.hpp"

namespace causalci {

// One cause-effect benchmark pair: two observation columns plus an optional
// ground-truth direction tag from the corpus metadata.
struct PairRecord {
    std::string id;
    std::vector<double> x1;
    std::vector<double> x2;
    std::string truth_tag;  // "1->2", "2->1" or empty when unknown

    [[nodiscard]] Dataset<2> dataset() const {
        Dataset<2> d;
        d.rows.resize(static_cast<long>(x1.size()), 2);
        for (std::size_t i = 0; i < x1.size(); ++i) {
            d.rows(static_cast<long>(i), 0) = x1[i];
            d.rows(static_cast<long>(i), 1) = x2[i];
        }
        return d;
    }
};

// Parses a whitespace-delimited numeric text file with at least two columns
// per line (extra columns are ignored). `swap` exchanges the two columns for
// the reverse-direction analysis.
inline PairRecord load_pair_file(const std::string& path, bool swap = false) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    PairRecord rec;
    // id = file stem
    std::string stem = path;
    if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (const auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    rec.id = stem;

    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
        if (tokens.empty()) continue;
        if (tokens.size() < 2)
            throw LengthMismatch("line " + std::to_string(line_number) + " of " + path +
                                 " has fewer than two columns");
        double vals[2];
        for (int c = 0; c < 2; ++c) {
            std::size_t consumed = 0;
            double v = 0.0;
            try {
                v = std::stod(tokens[static_cast<std::size_t>(c)], &consumed);
            } catch (const std::exception&) {
                throw ParseError("invalid number '" + tokens[static_cast<std::size_t>(c)] + "'",
                                 line_number);
            }
            if (consumed != tokens[static_cast<std::size_t>(c)].size() || !std::isfinite(v))
                throw ParseError("invalid number '" + tokens[static_cast<std::size_t>(c)] + "'",
                                 line_number);
            vals[c] = v;
        }
        rec.x1.push_back(vals[0]);
        rec.x2.push_back(vals[1]);
    }
    if (rec.x1.size() < 10)
        throw TooFewRows(path + ": need at least 10 observations, got " +
                         std::to_string(rec.x1.size()));
    if (swap) std::swap(rec.x1, rec.x2);
    return rec;
}

// Per-method analysis of one pair. The data are centered first; the
// standardized variant additionally scales each column to unit variance
// (the corpus does not fix units, so both are reported).
struct PairMethodReport {
    Method method{};
    ConfidenceSet raw;
    ConfidenceSet standardized;
};

inline std::vector<PairMethodReport> analyze_pair(const PairRecord& record,
                                                  const std::vector<Method>& methods, double alpha,
                                                  RngSeed seed, long bootstrap_resamples = 1000,
                                                  double gds_penalty_scale = 0.75,
                                                  int grid_points = 2001) {
    ExperimentConfig cfg;
    cfg.alpha = alpha;
    cfg.bootstrap_resamples = bootstrap_resamples;
    cfg.gds_penalty_scale = gds_penalty_scale;
    cfg.grid_points = grid_points;

    Dataset<2> centered = record.dataset().centered_copy();
    Dataset<2> standardized = centered;
    for (int c = 0; c < 2; ++c) {
        const double sd = std::sqrt(standardized.rows.col(c).squaredNorm() /
                                    static_cast<double>(standardized.n()));
        if (sd > 0.0) standardized.rows.col(c) /= sd;
    }

    std::vector<PairMethodReport> out;
    for (Method m : methods) {
        PairMethodReport rep;
        rep.method = m;
        const CovarianceMatrix<2> s_raw = second_moment(centered);
        const CovarianceMatrix<2> s_std = second_moment(standardized);
        rep.raw = detail::run_method_d2(m, cfg, centered, s_raw, seed);
        rep.standardized = detail::run_method_d2(m, cfg, standardized, s_std, seed);
        out.push_back(rep);
    }
    return out;
}

}  // namespace causalci
