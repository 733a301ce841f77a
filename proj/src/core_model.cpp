#include "bundlechoice/core_model.hpp"

#include <cmath>
#include <stdexcept>

namespace bundlechoice {

Theta normalize(const Theta& theta) {
    Theta out = theta;
    if (theta.beta.empty() || theta.gamma.empty())
        throw std::invalid_argument("normalize: beta and gamma must be nonempty");
    double sb = std::abs(theta.beta[0]);
    double sg = std::abs(theta.gamma[0]);
    if (sb == 0.0 || sg == 0.0)
        throw std::invalid_argument("normalize: leading coordinate is zero");
    for (auto& v : out.beta) v /= sb;
    for (auto& v : out.gamma) v /= sg;
    out.normalized = true;
    return out;
}

void ObservationPanel::validate() const {
    if (n < 0 || t_len < 0) throw std::invalid_argument("panel: negative dimensions");
    if (n > 0 && t_len < 2) throw std::invalid_argument("panel: needs at least two periods");
    if (static_cast<int>(z.size()) != n || static_cast<int>(x.size()) != n ||
        static_cast<int>(y.size()) != n)
        throw std::invalid_argument("panel: outer array length != n");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(z[i].size()) != d_z) throw std::invalid_argument("panel: bad z dim");
        if (static_cast<int>(x[i].size()) != t_len || static_cast<int>(y[i].size()) != t_len)
            throw std::invalid_argument("panel: bad time dim");
        for (int t = 0; t < t_len; ++t)
            for (int g = 0; g < 2; ++g) {
                if (static_cast<int>(x[i][t][g].size()) != d_x)
                    throw std::invalid_argument("panel: bad x dim");
                for (double v : x[i][t][g])
                    if (!std::isfinite(v)) throw std::invalid_argument("panel: non-finite x");
            }
        for (double v : z[i])
            if (!std::isfinite(v)) throw std::invalid_argument("panel: non-finite z");
    }
}

static double dot(const Vec& a, const Vec& b, const char* what) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                    ")");
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double gamma_value(const Vec& z, const Vec& gamma) { return dot(z, gamma, "gamma_value"); }

std::array<double, 4> utilities_with_gamma(const Vec& x_a, const Vec& x_b,
                                           const std::array<double, 2>& alpha,
                                           const std::array<double, 2>& eps, const Vec& beta,
                                           double gamma_val) {
    double u_a = dot(x_a, beta, "utilities") + alpha[0] + eps[0];
    double u_b = dot(x_b, beta, "utilities") + alpha[1] + eps[1];
    return {0.0, u_a, u_b, u_a + u_b + gamma_val};
}

std::array<double, 4> utilities(const Vec& x_a, const Vec& x_b, const Vec& z,
                                const std::array<double, 2>& alpha,
                                const std::array<double, 2>& eps, const Theta& theta) {
    return utilities_with_gamma(x_a, x_b, alpha, eps, theta.beta, gamma_value(z, theta.gamma));
}

Choice choose(const std::array<double, 4>& u) {
    int best = 0;
    for (int j = 0; j < 4; ++j) {
        if (std::isnan(u[j])) throw std::invalid_argument("choose: NaN utility");
        if (u[j] > u[best]) best = j;  // strict: earliest index wins ties
    }
    return static_cast<Choice>(best);
}

}  // namespace bundlechoice
