#include "bundlechoice/dgp.hpp"

#include <cmath>
#include <stdexcept>

#include "bundlechoice/core_model.hpp"
#include "bundlechoice/parallel.hpp"

namespace bundlechoice {

namespace {
// Stream tags, one sub-stream family per draw purpose.
enum Tag : uint64_t { kCovX = 1, kCovZ = 2, kEps = 3, kFe = 4, kLatentGamma = 5 };
}  // namespace

void DgpConfig::validate() const {
    if (design < 1 || design > 4) throw std::invalid_argument("dgp: design must be in 1..4");
    if (n < 0) throw std::invalid_argument("dgp: n must be >= 0");
    if (t_len < 2) throw std::invalid_argument("dgp: t_len must be >= 2");
    if (d_x < 1 || d_z < 1) throw std::invalid_argument("dgp: d_x and d_z must be >= 1");
    if (static_cast<int>(theta_true.beta.size()) != d_x ||
        static_cast<int>(theta_true.gamma.size()) != d_z)
        throw std::invalid_argument("dgp: theta_true dimensions do not match d_x/d_z");
    if (latent_gamma) {
        if (latent_gamma->eta < 0.0 || latent_gamma->eta > 1.0)
            throw std::invalid_argument("dgp: latent eta must be in [0,1]");
        if (latent_gamma->g_plus < 0.0 || latent_gamma->g_minus < 0.0)
            throw std::invalid_argument("dgp: latent g_plus/g_minus must be >= 0");
    }
}

void draw_covariates(const DgpConfig& config, int i, std::vector<std::array<Vec, 2>>& x_out,
                     Vec& z_out) {
    x_out.assign(config.t_len, {Vec(config.d_x), Vec(config.d_x)});
    for (int t = 0; t < config.t_len; ++t) {
        RngStream rs(mix_seed(config.seed, kCovX, i, t));
        for (int g = 0; g < 2; ++g)
            for (int k = 0; k < config.d_x; ++k) {
                if (config.covariate_scheme == CovariateScheme::Gaussian) {
                    double sd = config.x_variance_dx ? std::sqrt(double(config.d_x)) : 1.0;
                    x_out[t][g][k] = rs.normal(0.0, sd);
                } else {
                    // Bounded scheme: X_A ~ U[-3,3], X_B ~ N(0, 2).
                    x_out[t][g][k] = (g == 0) ? rs.uniform(-3.0, 3.0)
                                              : rs.normal(0.0, std::sqrt(2.0));
                }
            }
    }
    z_out.assign(config.d_z, 0.0);
    RngStream rz(mix_seed(config.seed, kCovZ, i));
    for (int k = 0; k < config.d_z; ++k) {
        if (config.covariate_scheme == CovariateScheme::Gaussian) {
            if (k == 0)
                z_out[k] = rz.normal(2.0, std::sqrt(2.0));
            else
                z_out[k] = rz.normal(0.0, 1.0);
        } else {
            // Bounded scheme: Z_1 ~ U[0,4], Z_2 ~ U[-2,2].
            z_out[k] = (k == 0) ? rz.uniform(0.0, 4.0) : rz.uniform(-2.0, 2.0);
        }
    }
}

std::array<double, 2> draw_errors(int design, uint64_t seed, int i, int t) {
    RngStream rs(mix_seed(seed, kEps, i, t));
    if (design == 1 || design == 3) return {rs.gumbel(), rs.gumbel()};
    double ea, eb;
    rs.binormal(2.0, -2.0, -0.7, ea, eb);
    return {ea, eb};
}

std::array<double, 2> fixed_effects(int design, const Vec& xbar_a, const Vec& xbar_b,
                                    const Vec& beta, const std::array<double, 2>& v) {
    double ia = 0.0, ib = 0.0;
    if (xbar_a.size() != beta.size() || xbar_b.size() != beta.size())
        throw std::invalid_argument("fixed_effects: dimension mismatch");
    for (size_t k = 0; k < beta.size(); ++k) {
        ia += xbar_a[k] * beta[k];
        ib += xbar_b[k] * beta[k];
    }
    if (design == 1 || design == 2) return {ia / 2.0 + v[0], ib / 2.0 + v[1]};
    return {(ia / 2.0 - ib) * (1.0 + v[0]), (ib / 2.0 - ia) * (1.0 + v[1])};
}

SimulatedPanel simulate(const DgpConfig& config) {
    config.validate();
    SimulatedPanel out;
    ObservationPanel& p = out.panel;
    p.n = config.n;
    p.t_len = config.t_len;
    p.d_x = config.d_x;
    p.d_z = config.d_z;
    p.z.resize(config.n);
    p.x.resize(config.n);
    p.y.assign(config.n, std::vector<Choice>(config.t_len, Choice::O));
    out.latent.resize(config.n);

    parallel_for(config.n, [&](int i) {
        draw_covariates(config, i, p.x[i], p.z[i]);

        Vec xbar_a(config.d_x, 0.0), xbar_b(config.d_x, 0.0);
        for (int t = 0; t < config.t_len; ++t)
            for (int k = 0; k < config.d_x; ++k) {
                xbar_a[k] += p.x[i][t][0][k] / config.t_len;
                xbar_b[k] += p.x[i][t][1][k] / config.t_len;
            }

        RngStream rfe(mix_seed(config.seed, kFe, i));
        std::array<double, 2> v = {rfe.normal(), rfe.normal()};
        LatentDraw& lat = out.latent[i];
        lat.alpha = fixed_effects(config.design, xbar_a, xbar_b, config.theta_true.beta, v);

        double gamma_i;
        if (config.latent_gamma) {
            RngStream rg(mix_seed(config.seed, kLatentGamma, i));
            gamma_i = rg.bernoulli(config.latent_gamma->eta) ? config.latent_gamma->g_plus
                                                             : -config.latent_gamma->g_minus;
        } else {
            gamma_i = gamma_value(p.z[i], config.theta_true.gamma);
        }

        lat.eps.resize(config.t_len);
        lat.gamma_it.assign(config.t_len, gamma_i);
        for (int t = 0; t < config.t_len; ++t) {
            lat.eps[t] = draw_errors(config.design, config.seed, i, t);
            auto u = utilities_with_gamma(p.x[i][t][0], p.x[i][t][1], lat.alpha, lat.eps[t],
                                          config.theta_true.beta, gamma_i);
            p.y[i][t] = choose(u);
        }
    });
    return out;
}

}  // namespace bundlechoice
