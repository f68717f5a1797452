#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "causalci/bootstrap.hpp"
#include "causalci/confidence_set.hpp"
#include "causalci/core_model.hpp"
#include "causalci/lrt_inequality.hpp"
#include "causalci/lrt_polynomial.hpp"
#include "causalci/sampler.hpp"
#include "causalci/split_lrt.hpp"

namespace causalci {

enum class Method { kLrt1, kLrt1b, kLrt2, kSlrt, kEstSlrt, kBootstrap1, kBootstrap2 };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::kLrt1: return "LRT1";
        case Method::kLrt1b: return "LRT1b";
        case Method::kLrt2: return "LRT2";
        case Method::kSlrt: return "SLRT";
        case Method::kEstSlrt: return "estSLRT";
        case Method::kBootstrap1: return "Bootstrap1";
        case Method::kBootstrap2: return "Bootstrap2";
    }
    return "?";
}

inline std::optional<Method> method_from_name(const std::string& name) {
    for (Method m : {Method::kLrt1, Method::kLrt1b, Method::kLrt2, Method::kSlrt, Method::kEstSlrt,
                     Method::kBootstrap1, Method::kBootstrap2}) {
        if (name == method_name(m)) return m;
    }
    return std::nullopt;
}

enum class Direction { kForward, kReverse };  // X1 -> X2 versus X2 -> X1

inline const char* direction_name(Direction d) {
    return d == Direction::kForward ? "1->2" : "2->1";
}

// Generating model of one d = 3 scenario: the complete DAG along the given
// ordering with all edges 0.5, except that the direct 1->2 edge is adjusted
// so the total effect C(1->2) is exactly 0.5 whenever the ordering places
// X1 before X2 (it is structurally 0 otherwise).
inline LsemParams<3> d3_scenario_params(const Ordering<3>& ordering) {
    LsemParams<3> p;
    p.ordering = ordering;
    p.sigma2 = 1.0;
    for (int m = 1; m < 3; ++m)
        for (int q = 0; q < m; ++q) p.coeffs(ordering[m], ordering[q]) = 0.5;
    int pos_x1 = 0, pos_x2 = 0;
    for (int m = 0; m < 3; ++m) {
        if (ordering[m] == 0) pos_x1 = m;
        if (ordering[m] == 1) pos_x2 = m;
    }
    if (pos_x1 < pos_x2) {
        double indirect = 0.0;
        for (int m = 2; m < 3; ++m) indirect += p.coeffs(1, m) * p.coeffs(m, 0);
        p.coeffs(1, 0) = 0.5 - indirect;
    }
    return p;
}

struct ExperimentConfig {
    int dimension = 2;
    std::vector<Method> methods = {Method::kLrt1, Method::kLrt1b, Method::kLrt2, Method::kSlrt,
                                   Method::kEstSlrt};
    std::vector<long> sample_sizes = {100, 500, 1000};
    std::vector<double> betas = {0.0, 0.05, 0.1, 0.2, 0.5};
    std::vector<Direction> directions = {Direction::kForward, Direction::kReverse};
    std::vector<int> d3_scenarios = {0, 1, 2, 3, 4, 5};  // lexicographic ordering index
    long replications = 1000;
    double alpha = 0.05;
    std::uint64_t master_seed = 20240001;
    long bootstrap_resamples = 1000;
    double gds_penalty_scale = 0.75;
    int grid_points = 2001;
    long split_k = 0;  // 0 means floor(n/2)
    int threads = 0;   // 0 means hardware concurrency

    void validate() const {
        if (dimension != 2 && dimension != 3) throw ConfigError("dimension must be 2 or 3");
        if (replications < 1) throw ConfigError("replications must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");
        if (methods.empty()) throw ConfigError("no methods selected");
        if (sample_sizes.empty()) throw ConfigError("no sample sizes");
        if (bootstrap_resamples < 200) throw ConfigError("bootstrap resamples must be >= 200");
        if (grid_points < 2) throw ConfigError("grid_points must be >= 2");
        if (dimension == 3) {
            for (Method m : methods) {
                if (m != Method::kSlrt && m != Method::kEstSlrt)
                    throw ConfigError(std::string(method_name(m)) + " supports d = 2 only");
            }
            for (int s : d3_scenarios) {
                if (s < 0 || s > 5) throw ConfigError("d3 scenario index must be in 0..5");
            }
            if (d3_scenarios.empty()) throw ConfigError("no d3 scenarios");
        } else if (directions.empty()) {
            throw ConfigError("no directions");
        }
    }
};

// One (cell, method) aggregate. Coverage counts a failed replication as not
// covered; failures are reported separately and do not abort a sweep.
struct CellResult {
    Method method{};
    long n = 0;
    double beta = 0.0;            // effect size of the generating model
    std::string scenario_label;   // direction (d=2) or ordering (d=3)
    double true_effect = 0.0;     // value whose coverage is tallied
    long replications = 0;
    double coverage = 0.0;
    double mean_max_width = 0.0;
    double zero_rate = 0.0;
    double empty_rate = 0.0;
    long failures = 0;
    std::uint64_t cell_stream = 0;  // seed lineage: child stream of the cell
    double mean_runtime_seconds = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<CellResult> cells;

    [[nodiscard]] const CellResult* find(Method m, long n, double beta,
                                         const std::string& scenario) const {
        for (const auto& c : cells) {
            if (c.method == m && c.n == n && c.beta == beta && c.scenario_label == scenario)
                return &c;
        }
        return nullptr;
    }
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct RepOutcome {
    bool covered = false;
    bool zero = false;
    bool empty = false;
    bool failed = false;
    double width = 0.0;
    double seconds = 0.0;
};

// One simulation cell: generating model + the value to cover.
struct Cell {
    long n = 0;
    double beta = 0.0;
    std::string label;
    double true_effect = 0.0;
    Direction direction = Direction::kForward;  // d = 2
    int scenario = -1;                          // d = 3 ordering index
};

template <int D>
Dataset<D> generate_cell_dataset(const Cell& cell, RngSeed seed);

template <>
inline Dataset<2> generate_cell_dataset<2>(const Cell& cell, RngSeed seed) {
    const auto branch = cell.direction == Direction::kForward ? kM1 : kM2;
    return sample_lsem<2>(bivariate_params(branch, cell.beta), cell.n, seed);
}

template <>
inline Dataset<3> generate_cell_dataset<3>(const Cell& cell, RngSeed seed) {
    const auto ordering = all_orderings<3>()[static_cast<std::size_t>(cell.scenario)];
    return sample_lsem<3>(d3_scenario_params(ordering), cell.n, seed);
}

inline ConfidenceSet run_method_d2(Method m, const ExperimentConfig& cfg, const Dataset<2>& data,
                                   const CovarianceMatrix<2>& s, RngSeed rep_seed) {
    const long n = data.n();
    switch (m) {
        case Method::kLrt1: {
            const PsiGrid grid = PsiGrid::around_estimate(s, n, total_effect(s), cfg.grid_points);
            return lrt1_confidence_set(s, n, cfg.alpha, grid);
        }
        case Method::kLrt1b: {
            const PsiGrid grid = PsiGrid::around_estimate(s, n, total_effect(s), cfg.grid_points);
            return lrt1b_confidence_set(s, n, cfg.alpha, grid);
        }
        case Method::kLrt2:
            return lrt2_confidence_set(s, n, cfg.alpha).as_confidence_set();
        case Method::kSlrt:
            return slrt_confidence_set(data, cfg.alpha,
                                       SplitConfig{cfg.split_k, SplitRule::kSeededShuffle,
                                                   rep_seed.child(1)});
        case Method::kEstSlrt: {
            const PsiGrid grid = PsiGrid::around_estimate(s, n, total_effect(s), cfg.grid_points);
            return est_slrt_confidence_set<2>(data, cfg.alpha,
                                              SplitConfig{cfg.split_k, SplitRule::kSeededShuffle,
                                                          rep_seed.child(1)},
                                              grid);
        }
        case Method::kBootstrap1:
            return bootstrap_interval(
                data, [](const CovarianceMatrix<2>& sb, long) { return effect_estimate_varorder(sb); },
                BootstrapConfig{cfg.bootstrap_resamples, cfg.alpha, rep_seed.child(2),
                                cfg.gds_penalty_scale});
        case Method::kBootstrap2:
            return bootstrap_interval(
                data,
                [&cfg](const CovarianceMatrix<2>& sb, long nb) {
                    return effect_estimate_gds(sb, nb, cfg.gds_penalty_scale);
                },
                BootstrapConfig{cfg.bootstrap_resamples, cfg.alpha, rep_seed.child(3),
                                cfg.gds_penalty_scale});
    }
    throw ConfigError("unknown method");
}

inline ConfidenceSet run_method_d3(Method m, const ExperimentConfig& cfg, const Dataset<3>& data,
                                   const CovarianceMatrix<3>& s, RngSeed rep_seed) {
    const long n = data.n();
    const double estimate = restricted_mle_union<3>(s, n).params.effect(0, 1);
    const PsiGrid grid = PsiGrid::around_estimate(s, n, estimate, cfg.grid_points);
    const SplitConfig split{cfg.split_k, SplitRule::kSeededShuffle, rep_seed.child(1)};
    if (m == Method::kSlrt) return slrt_numeric_confidence_set_d3(data, cfg.alpha, split, grid);
    return est_slrt_confidence_set<3>(data, cfg.alpha, split, grid);
}

template <int D>
void run_cell_replication(const ExperimentConfig& cfg, const Cell& cell, RngSeed rep_seed,
                          std::vector<RepOutcome>& out) {
    const Dataset<D> data = generate_cell_dataset<D>(cell, rep_seed.child(0)).centered_copy();
    CovarianceMatrix<D> s;
    try {
        s = second_moment(data);
    } catch (const Error&) {
        for (auto& o : out) o.failed = true;
        return;
    }
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            ConfidenceSet set;
            if constexpr (D == 2) {
                set = run_method_d2(cfg.methods[mi], cfg, data, s, rep_seed);
            } else {
                set = run_method_d3(cfg.methods[mi], cfg, data, s, rep_seed);
            }
            out[mi].covered = set.contains(cell.true_effect);
            out[mi].zero = set.contains(0.0);
            out[mi].empty = set.empty();
            out[mi].width = set.max_width();
        } catch (const Error&) {
            out[mi].failed = true;
        }
        out[mi].seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
}

}  // namespace detail

// Runs the full coverage/width/zero-inclusion sweep. Replications are
// distributed over a worker pool; every replication is a pure function of
// (config, master seed), so results are identical for any thread count.
//
// Seed lineage: with base = RngSeed{master_seed, 0}, replication r of cell c
// uses rep = base.child(c).child(r); the dataset stream is rep.child(0), the
// data split rep.child(1), bootstrap resamples rep.child(2) or rep.child(3).
inline ExperimentResult run_coverage_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<detail::Cell> cells;
    if (cfg.dimension == 2) {
        for (long n : cfg.sample_sizes)
            for (double beta : cfg.betas)
                for (Direction dir : cfg.directions) {
                    detail::Cell c;
                    c.n = n;
                    c.beta = beta;
                    c.direction = dir;
                    c.label = direction_name(dir);
                    c.true_effect = dir == Direction::kForward ? beta : 0.0;
                    cells.push_back(c);
                }
    } else {
        const auto orderings = all_orderings<3>();
        for (long n : cfg.sample_sizes)
            for (int scenario : cfg.d3_scenarios) {
                detail::Cell c;
                c.n = n;
                c.scenario = scenario;
                const auto& o = orderings[static_cast<std::size_t>(scenario)];
                c.label = "ordering(" + std::to_string(o[0] + 1) + "," + std::to_string(o[1] + 1) +
                          "," + std::to_string(o[2] + 1) + ")";
                const LsemParams<3> params = d3_scenario_params(o);
                c.true_effect = params.effect(0, 1);
                c.beta = c.true_effect;
                cells.push_back(c);
            }
    }

    const RngSeed base{cfg.master_seed, 0};
    const long reps = cfg.replications;
    const std::size_t n_methods = cfg.methods.size();
    std::vector<detail::RepOutcome> outcomes(cells.size() * static_cast<std::size_t>(reps) *
                                             n_methods);

    std::atomic<long> next_task{0};
    const long total_tasks = static_cast<long>(cells.size()) * reps;
    const auto worker = [&] {
        for (;;) {
            const long task = next_task.fetch_add(1);
            if (task >= total_tasks) return;
            const std::size_t ci = static_cast<std::size_t>(task) / static_cast<std::size_t>(reps);
            const long r = task % reps;
            const RngSeed rep_seed = base.child(static_cast<std::uint64_t>(ci))
                                         .child(static_cast<std::uint64_t>(r));
            std::vector<detail::RepOutcome> rep_out(n_methods);
            if (cfg.dimension == 2) {
                detail::run_cell_replication<2>(cfg, cells[ci], rep_seed, rep_out);
            } else {
                detail::run_cell_replication<3>(cfg, cells[ci], rep_seed, rep_out);
            }
            const std::size_t offset =
                (ci * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)) * n_methods;
            for (std::size_t mi = 0; mi < n_methods; ++mi) outcomes[offset + mi] = rep_out[mi];
        }
    };

    int n_threads = cfg.threads > 0 ? cfg.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentResult result;
    result.config = cfg;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
            CellResult cr;
            cr.method = cfg.methods[mi];
            cr.n = cells[ci].n;
            cr.beta = cells[ci].beta;
            cr.scenario_label = cells[ci].label;
            cr.true_effect = cells[ci].true_effect;
            cr.replications = reps;
            cr.cell_stream = base.child(static_cast<std::uint64_t>(ci)).stream;
            long covered = 0, zero = 0, empty = 0, failed = 0;
            double width_sum = 0.0, time_sum = 0.0;
            for (long r = 0; r < reps; ++r) {
                const auto& o =
                    outcomes[(ci * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)) *
                                 n_methods +
                             mi];
                covered += o.covered && !o.failed;
                zero += o.zero && !o.failed;
                empty += o.empty && !o.failed;
                failed += o.failed;
                width_sum += o.failed ? 0.0 : o.width;
                time_sum += o.seconds;
            }
            const double dreps = static_cast<double>(reps);
            cr.coverage = static_cast<double>(covered) / dreps;
            cr.zero_rate = static_cast<double>(zero) / dreps;
            cr.empty_rate = static_cast<double>(empty) / dreps;
            cr.failures = failed;
            cr.mean_max_width = width_sum / dreps;
            cr.mean_runtime_seconds = time_sum / dreps;
            result.cells.push_back(cr);
        }
    }
    return result;
}

// Same sweep viewed as width / zero-inclusion curves (per-n and per-beta
// series); the caller extracts series from the returned cells.
inline ExperimentResult run_width_and_zero_curves(const ExperimentConfig& cfg) {
    return run_coverage_experiment(cfg);
}

// Deterministic result table; excludes runtimes so that identical
// (config, master seed) runs produce byte-identical files.
inline std::string to_csv(const ExperimentResult& result) {
    std::string out =
        "method,d,n,beta,scenario,true_effect,replications,alpha,coverage,"
        "mean_max_width,zero_rate,empty_rate,failures,cell_stream\n";
    for (const auto& c : result.cells) {
        out += method_name(c.method);
        out += ',' + std::to_string(result.config.dimension);
        out += ',' + std::to_string(c.n);
        out += ',' + detail::format_double(c.beta);
        out += ',' + c.scenario_label;
        out += ',' + detail::format_double(c.true_effect);
        out += ',' + std::to_string(c.replications);
        out += ',' + detail::format_double(result.config.alpha);
        out += ',' + detail::format_double(c.coverage);
        out += ',' + detail::format_double(c.mean_max_width);
        out += ',' + detail::format_double(c.zero_rate);
        out += ',' + detail::format_double(c.empty_rate);
        out += ',' + std::to_string(c.failures);
        out += ',' + std::to_string(c.cell_stream);
        out += '\n';
    }
    return out;
}

// Wall-clock sidecar; intentionally separate because runtimes are not
// deterministic.
inline std::string timings_csv(const ExperimentResult& result) {
    std::string out = "method,d,n,beta,scenario,mean_runtime_seconds\n";
    for (const auto& c : result.cells) {
        out += method_name(c.method);
        out += ',' + std::to_string(result.config.dimension);
        out += ',' + std::to_string(c.n);
        out += ',' + detail::format_double(c.beta);
        out += ',' + c.scenario_label;
        out += ',' + detail::format_double(c.mean_runtime_seconds);
        out += '\n';
    }
    return out;
}

}  // namespace causalci
