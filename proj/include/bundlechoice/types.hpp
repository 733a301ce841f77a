#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bundlechoice {

using Vec = std::vector<double>;

enum class Good : int { A = 0, B = 1 };

// Fixed order O < A < B < AB; this order is also the tie-breaking rule.
enum class Choice : int { O = 0, OnlyA = 1, OnlyB = 2, Bundle = 3 };

constexpr int kNumChoices = 4;

inline const char* to_string(Choice c) {
    switch (c) {
        case Choice::O: return "O";
        case Choice::OnlyA: return "A";
        case Choice::OnlyB: return "B";
        case Choice::Bundle: return "AB";
    }
    throw std::logic_error("invalid Choice");
}

inline Choice choice_from_string(const std::string& s) {
    if (s == "O") return Choice::O;
    if (s == "A") return Choice::OnlyA;
    if (s == "B") return Choice::OnlyB;
    if (s == "AB") return Choice::Bundle;
    throw std::invalid_argument("unknown choice label: " + s);
}

// D_A = {A, AB}, D_B = {B, AB}: all choices containing the good.
inline bool in_demand_set(Choice c, Good g) {
    if (c == Choice::Bundle) return true;
    return g == Good::A ? c == Choice::OnlyA : c == Choice::OnlyB;
}

// Parameter pair (beta, gamma) for Gamma(z) = z'gamma.
struct Theta {
    Vec beta;
    Vec gamma;
    bool normalized = false;

    int d_x() const { return static_cast<int>(beta.size()); }
    int d_z() const { return static_cast<int>(gamma.size()); }
};

// Rescale so |beta[0]| = |gamma[0]| = 1 (simulation convention).
Theta normalize(const Theta& theta);

// N x T panel. z is constant over t; x is indexed (i, t, good, coordinate).
struct ObservationPanel {
    int n = 0;
    int t_len = 0;
    int d_x = 0;
    int d_z = 0;
    std::vector<Vec> z;                           // [i][d_z]
    std::vector<std::vector<std::array<Vec, 2>>> x;  // [i][t][good][d_x]
    std::vector<std::vector<Choice>> y;           // [i][t]

    const Vec& x_at(int i, int t, Good g) const { return x[i][t][static_cast<int>(g)]; }
    void validate() const;
};

// Simulator internals; never readable by estimators.
struct LatentDraw {
    std::array<double, 2> alpha;                  // (alpha_A, alpha_B)
    std::vector<std::array<double, 2>> eps;       // [t][(eps_A, eps_B)]
    std::vector<double> gamma_it;                 // per-period complementarity actually used
};

}  // namespace bundlechoice
