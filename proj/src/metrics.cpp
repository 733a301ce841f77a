#include "bundlechoice/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "bundlechoice/moments.hpp"
#include "bundlechoice/rng.hpp"

namespace bundlechoice {

MetricsRow metrics_block(const std::vector<Vec>& estimates, const Vec& truth,
                         const std::string& estimator, const std::string& parameter) {
    if (estimates.empty()) throw std::invalid_argument("metrics: no estimates");
    const int d = static_cast<int>(truth.size());
    if (d < 2) throw std::invalid_argument("metrics: need at least one free coordinate");
    const int b = static_cast<int>(estimates.size());
    const int free_dims = d - 1;

    MetricsRow row;
    row.estimator = estimator;
    row.parameter = parameter;
    row.replications = b;

    double mse = 0.0, var = 0.0, mad = 0.0;
    for (int k = 1; k < d; ++k) {
        double mean = 0.0;
        for (const auto& e : estimates) {
            if (static_cast<int>(e.size()) != d)
                throw std::invalid_argument("metrics: estimate dimension mismatch");
            mean += e[k] / b;
        }
        for (const auto& e : estimates) {
            double dev = e[k] - truth[k];
            mse += dev * dev;
            mad += std::abs(dev);
            var += (e[k] - mean) * (e[k] - mean);
        }
    }
    row.rmse = std::sqrt(mse / (b * free_dims));
    row.sd = std::sqrt(var / (b * free_dims));
    row.mad = mad / (b * free_dims);
    return row;
}

double err_metric(const std::vector<Vec>& gamma_estimates, const Vec& gamma_true,
                  CovariateScheme scheme, int d_z, int eval_draws, uint64_t seed) {
    if (eval_draws <= 0) throw std::invalid_argument("err_metric: eval_draws must be positive");
    if (gamma_estimates.empty()) throw std::invalid_argument("err_metric: no estimates");

    std::vector<Vec> draws(eval_draws, Vec(d_z));
    RngStream rs(mix_seed(seed, 9311));
    for (int m = 0; m < eval_draws; ++m)
        for (int k = 0; k < d_z; ++k) {
            if (scheme == CovariateScheme::Gaussian)
                draws[m][k] = k == 0 ? rs.normal(2.0, std::sqrt(2.0)) : rs.normal(0.0, 1.0);
            else
                draws[m][k] = k == 0 ? rs.uniform(0.0, 4.0) : rs.uniform(-2.0, 2.0);
        }

    double total = 0.0;
    for (const auto& g : gamma_estimates) {
        if (g.size() != gamma_true.size())
            throw std::invalid_argument("err_metric: gamma dimension mismatch");
        double acc = 0.0;
        for (const auto& z : draws) {
            double s0 = 0.0, s1 = 0.0;
            for (int k = 0; k < d_z; ++k) {
                s0 += z[k] * gamma_true[k];
                s1 += z[k] * g[k];
            }
            acc += std::abs(sign_of(s0) - sign_of(s1));
        }
        total += acc / eval_draws;
    }
    return total / gamma_estimates.size();
}

}  // namespace bundlechoice
