#pragma once

// Test-only enumeration oracle: discrete-error instances whose conditional
// choice probabilities are computed exactly by summing over the error grid.
// Kept independent of the library's estimation path; only shared vocabulary
// types are reused.

#include <array>
#include <cmath>
#include <vector>

#include "bundlechoice/core_model.hpp"
#include "bundlechoice/moments.hpp"
#include "bundlechoice/rng.hpp"
#include "bundlechoice/sharpness.hpp"
#include "bundlechoice/types.hpp"

namespace oracle {

using bundlechoice::Vec;

struct DiscreteInstance {
    bundlechoice::Theta theta0;
    std::vector<std::array<Vec, 2>> x_support;  // (x_A, x_B) support points
    std::vector<Vec> z_support;
    std::vector<std::array<double, 2>> eps_points;
    std::vector<double> eps_prob;
};

// Tie order O < A < B < AB, evaluated directly from the utility definition.
inline int oracle_choice(const std::array<Vec, 2>& x, const Vec& beta, double gamma,
                         const std::array<double, 2>& eps) {
    double ua = eps[0], ub = eps[1];
    for (size_t k = 0; k < beta.size(); ++k) {
        ua += x[0][k] * beta[k];
        ub += x[1][k] * beta[k];
    }
    double u[4] = {0.0, ua, ub, ua + ub + gamma};
    int best = 0;
    for (int j = 1; j < 4; ++j)
        if (u[j] > u[best]) best = j;
    return best;
}

inline std::array<double, 4> exact_ccp(const DiscreteInstance& inst, int x_idx, int z_idx) {
    double gamma = 0.0;
    for (size_t k = 0; k < inst.theta0.gamma.size(); ++k)
        gamma += inst.z_support[z_idx][k] * inst.theta0.gamma[k];
    std::array<double, 4> p{};
    for (size_t e = 0; e < inst.eps_points.size(); ++e)
        p[oracle_choice(inst.x_support[x_idx], inst.theta0.beta, gamma, inst.eps_points[e])] +=
            inst.eps_prob[e];
    return p;
}

// Exact CCP under an arbitrary candidate parameter's complementarity value is
// never needed: CCPs are generated once under theta0; candidates only change
// the indicator side.

// Minimum gap between any two utilities over all (support, grid) evaluations;
// instances are regenerated until this is comfortably positive so that grid
// atoms never sit on region boundaries.
inline double min_utility_gap(const DiscreteInstance& inst) {
    double best = 1e300;
    for (size_t zi = 0; zi < inst.z_support.size(); ++zi) {
        double gamma = 0.0;
        for (size_t k = 0; k < inst.theta0.gamma.size(); ++k)
            gamma += inst.z_support[zi][k] * inst.theta0.gamma[k];
        for (const auto& x : inst.x_support)
            for (const auto& eps : inst.eps_points) {
                double ua = eps[0], ub = eps[1];
                for (size_t k = 0; k < inst.theta0.beta.size(); ++k) {
                    ua += x[0][k] * inst.theta0.beta[k];
                    ub += x[1][k] * inst.theta0.beta[k];
                }
                double u[4] = {0.0, ua, ub, ua + ub + gamma};
                for (int a = 0; a < 4; ++a)
                    for (int b = a + 1; b < 4; ++b)
                        best = std::min(best, std::abs(u[a] - u[b]));
            }
    }
    return best;
}

inline DiscreteInstance random_discrete_instance(uint64_t seed, int max_x_support = 4,
                                                 bool no_bundle = false) {
    for (uint64_t attempt = 0;; ++attempt) {
        bundlechoice::RngStream rs(bundlechoice::mix_seed(seed, 555, attempt));
        DiscreteInstance inst;
        inst.theta0.beta = {rs.bernoulli(0.5) ? 1.0 : -1.0, rs.uniform(-2.0, 2.0)};
        inst.theta0.gamma = {rs.bernoulli(0.5) ? 1.0 : -1.0, rs.uniform(-2.0, 2.0)};
        inst.theta0.normalized = true;

        int n_x = 2 + static_cast<int>(rs.next_u64() % (max_x_support - 1));
        for (int p = 0; p < n_x; ++p)
            inst.x_support.push_back({Vec{rs.uniform(-2.0, 2.0), rs.uniform(-2.0, 2.0)},
                                      Vec{rs.uniform(-2.0, 2.0), rs.uniform(-2.0, 2.0)}});
        inst.z_support.push_back(Vec{rs.uniform(-1.5, 1.5), rs.uniform(-1.5, 1.5)});
        if (no_bundle) {
            // push the bundle far out of reach while keeping Gamma finite
            double g1 = inst.theta0.gamma[0], g2 = inst.theta0.gamma[1];
            double z2 = inst.z_support[0][1];
            inst.z_support[0][0] = (-40.0 - g2 * z2) / g1;
        }

        double spread = rs.uniform(1.0, 3.0);
        std::array<double, 3> grid_a, grid_b;
        for (int m = 0; m < 3; ++m) {
            grid_a[m] = spread * (m - 1) + rs.uniform(-0.3, 0.3);
            grid_b[m] = spread * (m - 1) + rs.uniform(-0.3, 0.3);
        }
        double total = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                inst.eps_points.push_back({grid_a[a], grid_b[b]});
                double pr = rs.uniform(0.2, 1.0);
                inst.eps_prob.push_back(pr);
                total += pr;
            }
        for (double& pr : inst.eps_prob) pr /= total;

        if (min_utility_gap(inst) > 1e-6) return inst;
    }
}

// All ordered support pairs with their exact CCPs under theta0.
inline std::vector<bundlechoice::CcpPair> instance_pairs(const DiscreteInstance& inst) {
    std::vector<bundlechoice::CcpPair> pairs;
    for (size_t zi = 0; zi < inst.z_support.size(); ++zi)
        for (size_t a = 0; a < inst.x_support.size(); ++a)
            for (size_t b = 0; b < inst.x_support.size(); ++b) {
                if (a == b) continue;
                bundlechoice::CcpPair pr;
                pr.x_s = inst.x_support[a];
                pr.x_t = inst.x_support[b];
                pr.z = inst.z_support[zi];
                pr.p_s = exact_ccp(inst, static_cast<int>(a), static_cast<int>(zi));
                pr.p_t = exact_ccp(inst, static_cast<int>(b), static_cast<int>(zi));
                pairs.push_back(std::move(pr));
            }
    return pairs;
}

// Worst (largest) moment component over all ordered pairs at a candidate
// theta, using the exact CCPs generated under theta0.
inline double max_moment_violation(const DiscreteInstance& inst, const bundlechoice::Theta& theta) {
    double worst = -1e300;
    auto pairs = instance_pairs(inst);
    for (const auto& pr : pairs) {
        bundlechoice::IndexDelta d = bundlechoice::index_delta(pr.x_s, pr.x_t, theta.beta);
        double gz = bundlechoice::gamma_value(pr.z, theta.gamma);
        auto mv = bundlechoice::moment_vector(pr.p_s, pr.p_t, d, gz);
        worst = std::max(worst, mv.max_component());
    }
    return worst;
}

// Population criterion data over the support pairs: every "individual" is one
// ordered support pair with its exact CCPs (equivalently a population of
// individuals at those covariate cells).
inline bundlechoice::CriterionData population_criterion_data(const DiscreteInstance& inst) {
    bundlechoice::CriterionData data;
    auto pairs = instance_pairs(inst);
    data.n = 0;
    bundlechoice::CriterionData::PairBlock pb;
    pb.s = 0;
    pb.t = 1;
    for (const auto& pr : pairs) {
        pb.p_s.push_back(pr.p_s);
        pb.p_t.push_back(pr.p_t);
        Vec dxa(pr.x_s[0].size()), dxb(pr.x_s[1].size());
        for (size_t k = 0; k < dxa.size(); ++k) {
            dxa[k] = pr.x_s[0][k] - pr.x_t[0][k];
            dxb[k] = pr.x_s[1][k] - pr.x_t[1][k];
        }
        pb.dx_a.push_back(std::move(dxa));
        pb.dx_b.push_back(std::move(dxb));
        data.z.push_back(pr.z);
        ++data.n;
    }
    data.pairs.push_back(std::move(pb));
    return data;
}

}  // namespace oracle
