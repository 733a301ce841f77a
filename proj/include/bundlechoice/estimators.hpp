#pragma once

#include <cstdint>
#include <optional>

#include "bundlechoice/ccp.hpp"
#include "bundlechoice/moments.hpp"
#include "bundlechoice/types.hpp"

namespace bundlechoice {

// Fits CCP models for every unordered period pair and caches their values at
// each observed W_ist, so criterion evaluations are free of panel data.
CriterionData build_criterion_data(const ObservationPanel& panel, const CcpHyper& hyper);

struct OptimizerTrace {
    long criterion_evals = 0;
    double grid_minimum = 0.0;
    int sign_beta = 1;
    int sign_gamma = 1;
};

struct PointEstimate {
    Theta theta_hat;
    double criterion_value = 0.0;
    OptimizerTrace trace;
};

struct TwoStepOptions {
    CcpHyper ccp;
    double grid_lo = -5.0;
    double grid_hi = 5.0;
    int grid_points = 41;
    int nm_restarts = 5;
    int nm_max_iter = 200;
    uint64_t seed = 0;
};

// Criterion minimization over the free coordinates for each sign combination
// of the normalized leading coordinates; reusable with exact-CCP data.
PointEstimate minimize_criterion(const CriterionData& data, int d_x, int d_z,
                                 const TwoStepOptions& options);

// Two-step semiparametric point estimator.
PointEstimate estimate_two_step(const ObservationPanel& panel, const TwoStepOptions& options);

struct GridSpec {
    double lo = -5.0;
    double hi = 5.0;
    int points = 100;
};

struct SetEstimate {
    GridSpec grid;
    int free_dims = 0;
    std::vector<bool> accepted;   // odometer order over the free-coordinate grid
    double c_hat = 0.0;
    double a_n = 0.0;
    double min_criterion = 0.0;
    Vec free_lower, free_upper;   // per-coordinate min/max of accepted points

    // True when theta's free coordinates lie inside the accepted hull.
    bool hull_contains(const Theta& theta) const;
};

// Grid-search level-set estimator; leading coordinates fixed at +1.
SetEstimate estimate_set(const ObservationPanel& panel, const GridSpec& grid,
                         const CcpHyper& hyper);
SetEstimate estimate_set_from_data(const CriterionData& data, int d_x, int d_z, int n,
                                   const GridSpec& grid);

struct ParametricEstimate {
    Theta theta_hat;       // normalized by the leading coordinates
    Vec beta_raw, gamma_raw;
    double eta0 = 0.0;
    Vec eta1;
    double criterion_value = 0.0;
};

// Simulated method of moments under Gumbel errors and a linear fixed-effect
// model alpha_ij = eta0 + xbar_ij'eta1 + v_ij.
ParametricEstimate estimate_msm_parametric(const ObservationPanel& panel, int sim_draws,
                                           uint64_t seed);

// The simulated-moment objective at a packed (beta, gamma, eta0, eta1), with
// common random numbers fixed by the seed.
double msm_criterion(const ObservationPanel& panel, const Vec& psi, int sim_draws, uint64_t seed);

// Chamberlain's conditional fixed-effect logit over {O, A, B}; uses
// individuals whose choices avoid the bundle in every period.
PointEstimate estimate_fe_logit(const ObservationPanel& panel);

struct SemiNoBundleOptions {
    TwoStepOptions two_step;
    bool renormalize_ccp = true;  // divide {O,A,B} CCPs by 1 - P(AB)
};

// Stationarity-based estimator that assumes away bundles: ID1-type moments
// for j in {O, A, B} only.
PointEstimate estimate_semi_nobundle(const ObservationPanel& panel,
                                     const SemiNoBundleOptions& options);
double criterion_nobundle(const CriterionData& data, const Vec& beta, bool renormalize);

}  // namespace bundlechoice
