#pragma once

#include <string>
#include <vector>

#include "levyou/config.hpp"

namespace levyou {

struct Assertion {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunResult {
    bool all_pass = true;
    std::vector<Assertion> assertions;
    std::string output_dir;
};

/// Execute the configured experiment: verify its preconditions up front
/// (PreconditionError names the failed hypothesis), write results.csv,
/// summary.json, resolved_config.json and plot.svg (when applicable) into
/// config.output_dir, and return the per-assertion outcomes.
RunResult run(const ExperimentConfig& config);

}  // namespace levyou
