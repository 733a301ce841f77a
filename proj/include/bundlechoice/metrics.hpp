#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bundlechoice/dgp.hpp"
#include "bundlechoice/types.hpp"

namespace bundlechoice {

struct MetricsRow {
    std::string estimator;
    std::string parameter;  // "beta" or "gamma"
    int design = 0;
    int n = 0;
    int t_len = 0;
    std::optional<double> err;  // sign-error metric; gamma rows only
    double sd = 0.0;
    double rmse = 0.0;
    double mad = 0.0;
    int replications = 0;
    int failures = 0;
};

// SD/rMSE/MAD pooled over the free (non-normalized) coordinates, so that
// rmse^2 = sd^2 + bias^2 holds by construction.
MetricsRow metrics_block(const std::vector<Vec>& estimates, const Vec& truth,
                         const std::string& estimator, const std::string& parameter);

// Err = E|sign(Z'gamma_0) - sign(Z'gamma_hat)| by Monte Carlo over eval_draws
// fresh Z draws from the design's Z law, averaged over replications.
double err_metric(const std::vector<Vec>& gamma_estimates, const Vec& gamma_true,
                  CovariateScheme scheme, int d_z, int eval_draws, uint64_t seed);

}  // namespace bundlechoice
