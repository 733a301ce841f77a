#pragma once

#include <optional>

#include "bundlechoice/rng.hpp"
#include "bundlechoice/types.hpp"

namespace bundlechoice {

enum class CovariateScheme { Gaussian, Bounded };

// Two-point latent complementarity: Gamma_i = +g_plus w.p. eta, -g_minus w.p.
// 1-eta, i.i.d. across individuals, independent of covariates, constant over t.
struct LatentGammaSpec {
    double g_plus = 1.0;
    double g_minus = 1.0;
    double eta = 0.5;
};

struct DgpConfig {
    int design = 1;  // 1..4
    int n = 0;
    int t_len = 2;
    int d_x = 2;
    int d_z = 2;
    CovariateScheme covariate_scheme = CovariateScheme::Gaussian;
    Theta theta_true;
    uint64_t seed = 0;
    std::optional<LatentGammaSpec> latent_gamma;
    // Gaussian scheme draws each X coordinate from N(0, d_x) read as variance
    // d_x; set false to use unit variance instead.
    bool x_variance_dx = true;

    void validate() const;
};

struct SimulatedPanel {
    ObservationPanel panel;
    std::vector<LatentDraw> latent;  // oracle-only, never serialized with the panel
};

// Per-individual covariate draw: x[t][good] and z.
void draw_covariates(const DgpConfig& config, int i, std::vector<std::array<Vec, 2>>& x_out,
                     Vec& z_out);

// Per-period error pair for individual i.
std::array<double, 2> draw_errors(int design, uint64_t seed, int i, int t);

// alpha_j from the per-good time-average index and the N(0,1) draw v_j.
// Designs 1,2: alpha_j = xbar_j'beta / 2 + v_j.
// Designs 3,4: alpha_j = (xbar_j/2 - xbar_k)'beta * (1 + v_j), k the other good.
std::array<double, 2> fixed_effects(int design, const Vec& xbar_a, const Vec& xbar_b,
                                    const Vec& beta, const std::array<double, 2>& v);

SimulatedPanel simulate(const DgpConfig& config);

}  // namespace bundlechoice
