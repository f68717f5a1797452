// Command-line interface: single-dataset confidence sets (`ci`), the Monte
// Carlo simulation harness (`simulate`), and batch analysis of cause-effect
// benchmark pairs (`pairs`).

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "causalci/causalci.hpp"
#include "causalci/pairs_fetch.hpp"
#include "causalci/report.hpp"

namespace {

using namespace causalci;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string set_csv_row(const std::string& id, const std::string& method,
                        const std::string& variant, const ConfidenceSet& set) {
    std::string row = id + ',' + method + ',' + variant + ',';
    row += set.empty() ? "1," : "0,";
    row += set.zero_included ? "1," : "0,";
    if (set.nonzero) {
        row += detail::format_double(set.nonzero->lo) + ',' + detail::format_double(set.nonzero->hi);
    } else {
        row += ",";
    }
    row += ',' + detail::format_double(set.max_width());
    row += set.torn ? ",1" : ",0";
    row += set.noncontiguous ? ",1" : ",0";
    return row + "\n";
}

constexpr const char* kSetCsvHeader =
    "id,method,variant,empty,zero_included,lo,hi,max_width,torn,noncontiguous\n";

std::vector<Method> all_methods() {
    return {Method::kLrt1, Method::kLrt1b, Method::kLrt2, Method::kSlrt,
            Method::kEstSlrt, Method::kBootstrap1, Method::kBootstrap2};
}

int run_ci(const std::string& input, const std::string& method_str, double alpha, bool swap,
           std::uint64_t split_seed, const std::string& format) {
    const auto method = method_from_name(method_str);
    if (!method) {
        std::cerr << "error: unknown method '" << method_str << "'\n";
        return kExitConfig;
    }
    const PairRecord rec = load_pair_file(input, swap);
    const auto reports = analyze_pair(rec, {*method}, alpha, RngSeed{split_seed, 0});
    const auto& rep = reports.front();
    if (format == "json") {
        nlohmann::json j;
        j["id"] = rec.id;
        j["n"] = rec.x1.size();
        j["method"] = method_name(rep.method);
        j["alpha"] = alpha;
        j["swapped"] = swap;
        j["raw"] = to_json(rep.raw);
        j["standardized"] = to_json(rep.standardized);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << kSetCsvHeader;
        std::cout << set_csv_row(rec.id, method_name(rep.method), "raw", rep.raw);
        std::cout << set_csv_row(rec.id, method_name(rep.method), "standardized", rep.standardized);
    }
    return kExitOk;
}

int run_simulate(const std::string& config_path, bool full, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, std::optional<int> threads) {
    ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{} : load_experiment_config(config_path);
    if (full) cfg.replications = 10000;
    if (seed) cfg.master_seed = *seed;
    if (threads) cfg.threads = *threads;
    cfg.validate();

    const ExperimentResult result = run_coverage_experiment(cfg);

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream csv(out_dir + "/results.csv");
        csv << to_csv(result);
    }
    {
        std::ofstream json_out(out_dir + "/results.json");
        json_out << to_json(result).dump(2) << "\n";
    }
    {
        std::ofstream timing(out_dir + "/timings.csv");
        timing << timings_csv(result);
    }
    std::cout << "wrote " << result.cells.size() << " result rows to " << out_dir << "\n";
    return kExitOk;
}

int run_pairs(const std::string& dir, const std::vector<std::string>& ids, double alpha, bool swap,
              std::uint64_t split_seed, const std::string& format, const std::string& fetch_url) {
    std::vector<std::pair<std::string, std::vector<PairMethodReport>>> all;
    for (const auto& id : ids) {
        std::string path = dir + "/" + id + ".txt";
        if (!std::filesystem::exists(path)) path = dir + "/" + pair_file_name(id);
        if (!std::filesystem::exists(path) && !fetch_url.empty())
            path = fetch_pair_file(fetch_url, id, dir);
        const PairRecord rec = load_pair_file(path, swap);
        all.emplace_back(id, analyze_pair(rec, all_methods(), alpha, RngSeed{split_seed, 0}));
    }
    if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& [id, reports] : all) {
            nlohmann::json pj;
            pj["id"] = id;
            pj["alpha"] = alpha;
            pj["swapped"] = swap;
            auto& methods = pj["methods"] = nlohmann::json::array();
            for (const auto& rep : reports) {
                nlohmann::json mj;
                mj["method"] = method_name(rep.method);
                mj["raw"] = to_json(rep.raw);
                mj["standardized"] = to_json(rep.standardized);
                methods.push_back(mj);
            }
            j.push_back(pj);
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << kSetCsvHeader;
        for (const auto& [id, reports] : all) {
            for (const auto& rep : reports) {
                std::cout << set_csv_row(id, method_name(rep.method), "raw", rep.raw);
                std::cout << set_csv_row(id, method_name(rep.method), "standardized",
                                         rep.standardized);
            }
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"confidence sets for total causal effects under unknown causal direction"};
    app.require_subcommand(1);

    auto* ci = app.add_subcommand("ci", "confidence set for one two-column data file");
    std::string ci_input, ci_method, ci_format = "csv";
    double ci_alpha = 0.05;
    bool ci_swap = false;
    std::uint64_t ci_seed = 20240001;
    ci->add_option("--input", ci_input, "two-column whitespace-delimited file")->required();
    ci->add_option("--method", ci_method,
                   "LRT1|LRT1b|LRT2|SLRT|estSLRT|Bootstrap1|Bootstrap2")
        ->required();
    ci->add_option("--alpha", ci_alpha, "significance level");
    ci->add_flag("--swap", ci_swap, "swap the two columns");
    ci->add_option("--split-seed", ci_seed, "seed for data splits and resampling");
    ci->add_option("--format", ci_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* sim = app.add_subcommand("simulate", "run the Monte Carlo coverage/width experiment");
    std::string sim_config, sim_out = "out";
    bool sim_full = false;
    std::optional<std::uint64_t> sim_seed;
    std::optional<int> sim_threads;
    sim->add_option("--config", sim_config, "key=value config file (defaults when omitted)");
    sim->add_flag("--full", sim_full, "use 10000 replications");
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->add_option("--seed", sim_seed, "master seed override");
    sim->add_option("--threads", sim_threads, "worker threads (0 = hardware)");

    auto* pairs = app.add_subcommand("pairs", "analyze cause-effect benchmark pairs");
    std::string pairs_dir, pairs_format = "csv", pairs_fetch;
    std::vector<std::string> pairs_ids;
    double pairs_alpha = 0.05;
    bool pairs_swap = false;
    std::uint64_t pairs_seed = 20240001;
    pairs->add_option("--dir", pairs_dir, "directory with pair files")->required();
    pairs->add_option("--ids", pairs_ids, "comma-separated pair ids")
        ->required()
        ->delimiter(',');
    pairs->add_option("--alpha", pairs_alpha, "significance level");
    pairs->add_flag("--swap", pairs_swap, "swap columns (effect of X2 on X1)");
    pairs->add_option("--split-seed", pairs_seed, "seed for data splits and resampling");
    pairs->add_option("--format", pairs_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    pairs->add_option("--fetch-base-url", pairs_fetch,
                      "download missing pair files from this base url");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (app.got_subcommand(ci))
            return run_ci(ci_input, ci_method, ci_alpha, ci_swap, ci_seed, ci_format);
        if (app.got_subcommand(sim))
            return run_simulate(sim_config, sim_full, sim_out, sim_seed, sim_threads);
        return run_pairs(pairs_dir, pairs_ids, pairs_alpha, pairs_swap, pairs_seed, pairs_format,
                         pairs_fetch);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const LengthMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
