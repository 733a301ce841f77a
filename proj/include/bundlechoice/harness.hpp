#pragma once

#include <string>
#include <vector>

#include "bundlechoice/dgp.hpp"
#include "bundlechoice/estimators.hpp"
#include "bundlechoice/metrics.hpp"
#include "bundlechoice/testing.hpp"

namespace bundlechoice {

struct RunConfig {
    std::string task;  // simulate | estimate | set | test | bounds | montecarlo | rationalize
    DgpConfig dgp;
    std::vector<std::string> estimators = {"two-step"};
    int replications = 1;
    uint64_t base_seed = 0;
    std::string out;
    std::string data_path;      // input panel for estimate/set/test/bounds
    std::string instance_path;  // rationalize
    std::string method = "two-step";
    GridSpec grid;
    std::string hypothesis = "comp";
    double alpha = 0.05;
    int sim_draws = 100;
    int err_draws = 10000;
    bool timing = false;

    void validate() const;
};

std::string run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& text);

struct MonteCarloResult {
    std::vector<MetricsRow> rows;
    std::string to_json() const;
    std::string to_csv() const;
};

// Seeded, replication-parallel driver; results are independent of the thread
// count, and per-replication estimator failures are counted, never dropped
// silently.
MonteCarloResult run_monte_carlo(const RunConfig& config);

// Dispatch a CLI task; returns the JSON payload that was written/printed.
std::string run_task(const RunConfig& config);

}  // namespace bundlechoice
