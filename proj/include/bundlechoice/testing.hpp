#pragma once

#include <cstdint>
#include <optional>

#include "bundlechoice/ccp.hpp"
#include "bundlechoice/types.hpp"

namespace bundlechoice {

struct TestResult {
    std::string hypothesis;   // "complementarity" or "substitutability"
    double statistic = 0.0;
    double critical_value = 0.0;
    double alpha = 0.05;
    bool reject = false;
    int cells_used = 0;       // gated (cell, good, pair) triples entering the max
    uint64_t seed = 0;
};

// Optional box on z selecting the subsample; empty bounds accept everything.
struct ZCell {
    Vec lo, hi;
    bool contains(const Vec& z) const;
};

struct TestOptions {
    double alpha = 0.05;
    int n_centers = 64;        // kNN cell centers (seeded subsample of observed w)
    double neighbor_frac = 0.1;  // k = max(30, frac * n) neighbors per cell
    int bootstrap_draws = 200;
    uint64_t seed = 0;
    CcpHyper ccp;              // gate estimator; kernel smoother by default
    TestOptions() { ccp.method = CcpMethod::Kernel; }
};

// xi-gates: componentwise weak CCP increases over {A,B,AB} (kind 1) or
// {A,AB,O} (kind 2).
bool xi_indicator(const std::array<double, 4>& ccp_s, const std::array<double, 4>& ccp_t,
                  int kind);

// H0: Gamma(z) >= 0 against Gamma(z) < 0.  Gated cell moments with a
// multiplier-bootstrap critical value; see module notes on power.
TestResult test_complementarity(const ObservationPanel& panel, const ZCell& z_cell,
                                const TestOptions& options);

// H0': Gamma(z) <= 0 against Gamma(z) > 0 (xi^2 gate, signed demand moments).
TestResult test_substitutability(const ObservationPanel& panel, const ZCell& z_cell,
                                 const TestOptions& options);

struct SabOptions {
    double match_tol = 1e-9;   // sup-norm tolerance for "other covariates matched"
    double noise_mult = 2.0;   // |slope| <= noise_mult * SE reports 0
};

struct SabResult {
    int sign = 0;
    double slope = 0.0;
    double std_error = 0.0;
    int pairs_used = 0;
    bool no_variation = false;  // no matched pair with price variation
};

// Demand-based substitution sign: slope of P(Y in D_A) against the designated
// price coordinate of good B across matched period pairs.
SabResult estimate_s_ab(const ObservationPanel& panel, const ZCell& z_cell, int price_coordinate,
                        const SabOptions& options);

struct EtaBounds {
    double lower = 0.0;
    double upper = 1.0;
    bool lower_trivial = false;  // no qualifying xi^2 cell
    bool upper_trivial = false;  // no qualifying xi^1 cell
    bool valid = true;           // lower <= upper (specification-test signal)
};

struct EtaBoundsOptions {
    CcpHyper ccp;
    EtaBoundsOptions() { ccp.method = CcpMethod::Neural; }
};

// Plug-in bounds for eta = Pr(Gamma_it >= 0) over observed covariate pairs.
EtaBounds eta_bounds(const ObservationPanel& panel, const EtaBoundsOptions& options);

}  // namespace bundlechoice
