#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "causalci/error.hpp"
#include "causalci/experiment.hpp"

namespace causalci {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline double parse_number(const std::string& tok, long line) {
    std::size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &consumed);
    } catch (const std::exception&) {
        throw ParseError("invalid number '" + tok + "'", line);
    }
    if (consumed != tok.size()) throw ParseError("invalid number '" + tok + "'", line);
    return v;
}

}  // namespace detail

// Plain key/value experiment configuration. Lines are `key = value`, with
// `#` comments and comma/space separated arrays:
//
//   d             = 2
//   methods       = LRT1, LRT1b, LRT2, SLRT, estSLRT
//   sample_sizes  = 100, 500, 1000
//   betas         = 0, 0.05, 0.1, 0.2, 0.5
//   directions    = 1->2, 2->1
//   scenarios     = 0, 1, 2, 3, 4, 5        # d = 3 ordering indices
//   replications  = 1000
//   alpha         = 0.05
//   bootstrap_b   = 1000
//   gds_penalty_scale = 0.75
//   grid_points   = 2001
//   split_k       = 0
//   seed          = 20240001
//
// Unknown keys are rejected. All defaults are echoed into the output files.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_number);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const auto items = detail::split_list(value);
        if (items.empty()) throw ParseError("empty value for '" + key + "'", line_number);

        if (key == "d" || key == "dimension") {
            cfg.dimension = static_cast<int>(detail::parse_number(value, line_number));
        } else if (key == "methods") {
            cfg.methods.clear();
            for (const auto& item : items) {
                const auto m = method_from_name(item);
                if (!m) throw ParseError("unknown method '" + item + "'", line_number);
                cfg.methods.push_back(*m);
            }
        } else if (key == "sample_sizes") {
            cfg.sample_sizes.clear();
            for (const auto& item : items)
                cfg.sample_sizes.push_back(static_cast<long>(detail::parse_number(item, line_number)));
        } else if (key == "betas") {
            cfg.betas.clear();
            for (const auto& item : items) cfg.betas.push_back(detail::parse_number(item, line_number));
        } else if (key == "directions") {
            cfg.directions.clear();
            for (const auto& item : items) {
                if (item == "1->2" || item == "fwd") {
                    cfg.directions.push_back(Direction::kForward);
                } else if (item == "2->1" || item == "rev") {
                    cfg.directions.push_back(Direction::kReverse);
                } else {
                    throw ParseError("unknown direction '" + item + "'", line_number);
                }
            }
        } else if (key == "scenarios") {
            cfg.d3_scenarios.clear();
            for (const auto& item : items)
                cfg.d3_scenarios.push_back(static_cast<int>(detail::parse_number(item, line_number)));
        } else if (key == "replications") {
            cfg.replications = static_cast<long>(detail::parse_number(value, line_number));
        } else if (key == "alpha") {
            cfg.alpha = detail::parse_number(value, line_number);
        } else if (key == "bootstrap_b") {
            cfg.bootstrap_resamples = static_cast<long>(detail::parse_number(value, line_number));
        } else if (key == "gds_penalty_scale") {
            cfg.gds_penalty_scale = detail::parse_number(value, line_number);
        } else if (key == "grid_points") {
            cfg.grid_points = static_cast<int>(detail::parse_number(value, line_number));
        } else if (key == "split_k") {
            cfg.split_k = static_cast<long>(detail::parse_number(value, line_number));
        } else if (key == "seed") {
            cfg.master_seed = static_cast<std::uint64_t>(detail::parse_number(value, line_number));
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(detail::parse_number(value, line_number));
        } else {
            throw ParseError("unknown key '" + key + "'", line_number);
        }
    }
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path);
    return parse_experiment_config(in);
}

}  // namespace causalci
