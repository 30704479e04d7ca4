#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace hsg {

struct Metric {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string note;
};

struct ExperimentOutput {
    std::vector<Metric> metrics;
    nlohmann::json details;
    std::vector<std::pair<std::string, std::string>> csv_files; // name -> content
    bool pass = true;
};

struct ExperimentInfo {
    std::string name;
    std::string description;
    ExperimentOutput (*fn)(const nlohmann::json& config, int threads);
    nlohmann::json (*defaults)();
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo* find_experiment(const std::string& name);

// Stable-sorted one-line-per-experiment listing.
std::string list_experiments();

// Runs a config (merged over the experiment defaults), writes
// <out_dir>/<name>_report.json plus CSV series.  Returns the process exit
// code: 0 all metrics pass, 2 any failure, 1 usage/config error.
int run_config(const nlohmann::json& config, const std::string& out_dir, long seed_override,
               int threads);

// Compares two report files ignoring timing fields; returns 0 on identical
// content, 2 otherwise.
int baseline_compare(const std::string& old_path, const std::string& new_path);

nlohmann::json merge_config(const nlohmann::json& defaults, const nlohmann::json& overrides);

} // namespace hsg
