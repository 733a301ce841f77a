#pragma once

#include <array>
#include <vector>

#include "bundlechoice/types.hpp"

namespace bundlechoice {

// Changes in covariate indices between two periods: d_l = (x_ls - x_lt)'beta,
// with d_AB = d_A + d_B and d_O = 0 derived.
struct IndexDelta {
    double d_a = 0.0;
    double d_b = 0.0;
    double d_ab() const { return d_a + d_b; }
    double of(Choice j) const {
        switch (j) {
            case Choice::O: return 0.0;
            case Choice::OnlyA: return d_a;
            case Choice::OnlyB: return d_b;
            case Choice::Bundle: return d_ab();
        }
        return 0.0;
    }
};

IndexDelta index_delta(const std::array<Vec, 2>& x_s, const std::array<Vec, 2>& x_t,
                       const Vec& beta);

// sign(x) = 1{x>0} - 1{x<0}.
inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Indicator of the identifying restriction behind each CCP comparison.  All
// inequalities are strict and evaluated exactly on floats; a degenerate
// boundary yields false, which keeps the corresponding moment switched on.
bool lambda_id1(const IndexDelta& delta, Choice j);
bool lambda_id2(const IndexDelta& delta, double gamma_z, Good l);
std::pair<bool, bool> lambda_id3(const IndexDelta& delta, double gamma_z);  // (lambda_L, lambda_U)

// The 8 conditional moment functions, ordered (g_O, g_A, g_B, g_AB, g_DA,
// g_DB, g_L, g_U).  Components whose indicator holds are exactly zero.
struct MomentVector {
    std::array<double, 8> g{};
    double positive_part_l1() const {
        double s = 0.0;
        for (double v : g)
            if (v > 0.0) s += v;
        return s;
    }
    double max_component() const {
        double m = g[0];
        for (double v : g) m = v > m ? v : m;
        return m;
    }
};

MomentVector moment_vector(const std::array<double, 4>& ccp_s, const std::array<double, 4>& ccp_t,
                           const IndexDelta& delta, double gamma_z);

// ---- model variants (online-appendix restrictions) ----

enum class ModelVariant { Base, Nonseparable, Multigood, CrossSectional };

struct VariantTarget {
    enum Kind { SingleGood, SingleChoice, BundlePair, DemandSet, LowerBound, UpperBound };
    Kind kind;
    int j1 = -1;  // good index, or Choice code for SingleChoice
    int j2 = -1;  // second good of a bundle

    static VariantTarget single_good(int j) { return {SingleGood, j, -1}; }
    static VariantTarget single_choice(Choice c) { return {SingleChoice, static_cast<int>(c), -1}; }
    static VariantTarget bundle(int a, int b) { return {BundlePair, a, b}; }
    static VariantTarget demand(Good l) { return {DemandSet, static_cast<int>(l), -1}; }
    static VariantTarget lower() { return {LowerBound, -1, -1}; }
    static VariantTarget upper() { return {UpperBound, -1, -1}; }
};

// Exact indicator of the variant's identifying restriction.  `deltas` holds
// per-good index changes (goods 0..L-1; base/nonseparable/cross-sectional use
// L = 2).  Only the sign of gamma_ab matters except for the bound conditions,
// which use its value.
bool variant_lambda(ModelVariant variant, const std::vector<double>& deltas, double gamma_ab,
                    const VariantTarget& target);

// ---- sample criterion ----

// Per-(unordered pair, individual) inputs cached once; evaluations over theta
// then touch no panel data or CCP model.
struct CriterionData {
    struct PairBlock {
        int s = 0, t = 1;                        // canonical s < t
        std::vector<std::array<double, 4>> p_s;  // fitted CCP at w_i for period s
        std::vector<std::array<double, 4>> p_t;
        std::vector<Vec> dx_a;                   // x_{A,s} - x_{A,t} per individual
        std::vector<Vec> dx_b;
    };
    int n = 0;
    std::vector<PairBlock> pairs;
    std::vector<Vec> z;

    void require_valid() const;
};

// Omega_hat_N(theta): mean over individuals of the summed positive parts of
// g_{s,t} across all ordered pairs s != t.  Nonnegative by construction.
double criterion(const CriterionData& data, const Theta& theta);

}  // namespace bundlechoice
