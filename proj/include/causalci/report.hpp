#pragma once

#include <json.hpp>
#include <string>

#include "causalci/confidence_set.hpp"
#include "causalci/experiment.hpp"

namespace causalci {

inline nlohmann::json to_json(const ConfidenceSet& set) {
    nlohmann::json j;
    j["empty"] = set.empty();
    j["zero_included"] = set.zero_included;
    if (set.nonzero) {
        j["interval"] = {set.nonzero->lo, set.nonzero->hi};
    } else {
        j["interval"] = nullptr;
    }
    j["max_width"] = set.max_width();
    j["torn"] = set.torn;
    j["noncontiguous"] = set.noncontiguous;
    if (set.optimizer_failures > 0) j["optimizer_failures"] = set.optimizer_failures;
    return j;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["dimension"] = cfg.dimension;
    auto& methods = j["methods"] = nlohmann::json::array();
    for (Method m : cfg.methods) methods.push_back(method_name(m));
    j["sample_sizes"] = cfg.sample_sizes;
    j["betas"] = cfg.betas;
    if (cfg.dimension == 2) {
        auto& dirs = j["directions"] = nlohmann::json::array();
        for (Direction d : cfg.directions) dirs.push_back(direction_name(d));
    } else {
        j["d3_scenarios"] = cfg.d3_scenarios;
    }
    j["replications"] = cfg.replications;
    j["alpha"] = cfg.alpha;
    j["master_seed"] = cfg.master_seed;
    j["bootstrap_resamples"] = cfg.bootstrap_resamples;
    j["gds_penalty_scale"] = cfg.gds_penalty_scale;
    j["grid_points"] = cfg.grid_points;
    j["split_k"] = cfg.split_k;
    j["seed_lineage"] =
        "rep = {master_seed,0}.child(cell_index).child(rep_index); dataset=rep.child(0), "
        "split=rep.child(1), bootstrap=rep.child(2|3)";
    return j;
}

// Deterministic JSON result document (runtimes live in the timings sidecar).
inline nlohmann::json to_json(const ExperimentResult& result) {
    nlohmann::json j;
    j["config"] = config_to_json(result.config);
    auto& cells = j["cells"] = nlohmann::json::array();
    for (const auto& c : result.cells) {
        nlohmann::json cj;
        cj["method"] = method_name(c.method);
        cj["n"] = c.n;
        cj["beta"] = c.beta;
        cj["scenario"] = c.scenario_label;
        cj["true_effect"] = c.true_effect;
        cj["replications"] = c.replications;
        cj["coverage"] = c.coverage;
        cj["mean_max_width"] = c.mean_max_width;
        cj["zero_rate"] = c.zero_rate;
        cj["empty_rate"] = c.empty_rate;
        cj["failures"] = c.failures;
        cj["cell_stream"] = c.cell_stream;
        cells.push_back(cj);
    }
    return j;
}

}  // namespace causalci
