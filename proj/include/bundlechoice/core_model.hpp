#pragma once

#include <array>

#include "bundlechoice/types.hpp"

namespace bundlechoice {

// z'gamma, the linear complementarity index.
double gamma_value(const Vec& z, const Vec& gamma);

// Utility 4-vector (u_O, u_A, u_B, u_AB):
//   u_O  = 0
//   u_l  = x_l'beta + alpha_l + eps_l          for l in {A, B}
//   u_AB = u_A + u_B + Gamma(z)
std::array<double, 4> utilities(const Vec& x_a, const Vec& x_b, const Vec& z,
                                const std::array<double, 2>& alpha,
                                const std::array<double, 2>& eps, const Theta& theta);

// Same, with the complementarity passed directly (latent-Gamma DGPs).
std::array<double, 4> utilities_with_gamma(const Vec& x_a, const Vec& x_b,
                                           const std::array<double, 2>& alpha,
                                           const std::array<double, 2>& eps, const Vec& beta,
                                           double gamma_val);

// Argmax over the 4 utilities; exact float ties resolved by O < A < B < AB.
Choice choose(const std::array<double, 4>& u);

}  // namespace bundlechoice
