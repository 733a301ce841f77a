#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bundlechoice/types.hpp"

namespace bundlechoice {

enum class CcpMethod { Neural, Kernel };

struct CcpHyper {
    CcpMethod method = CcpMethod::Neural;
    uint64_t seed = 0;
    int iterations = 2000;       // full-batch gradient descent steps
    double learning_rate = 0.05;
    int width_cap = 32;          // hidden width = min(ceil(n^(1/4)), width_cap)
    double prob_floor = 1e-6;    // clip each component, then renormalize
    double bandwidth_scale = 1.0;  // kernel method only
};

// First-step estimator of P_period({j} | x_s, x_t, z) for one canonical
// period pair s < t.  One multinomial model per period over the shared
// conditioning vector w = (x_s, x_t, z).
class CcpModel {
public:
    // Assembled conditioning vector for individual i.
    Vec make_w(const ObservationPanel& panel, int i) const;
    static Vec make_w(const ObservationPanel& panel, int i, int s, int t);

    // Probability 4-vector for the given period (must be s or t); nonnegative
    // and summing to 1 after flooring and renormalization.
    std::array<double, 4> eval(const Vec& w, int period) const;

    // P_period(K | w) = sum of member probabilities.
    double eval_set(const Vec& w, int period, const std::vector<Choice>& k) const;

    int period_s() const { return s_; }
    int period_t() const { return t_; }

    std::string dump_json() const;
    static CcpModel load_json(const std::string& text);

    friend CcpModel fit_ccp(const ObservationPanel& panel, int s, int t, const CcpHyper& hyper);

private:
    struct Net {
        std::vector<double> w1, b1, w2, b2;  // w1: hidden x din, w2: 4 x hidden
        int din = 0, hidden = 0;
    };
    struct KernelData {
        std::vector<double> rows;               // nd x din, standardized
        std::vector<std::array<double, 4>> target_s, target_t;
        std::vector<double> weight;
        std::vector<double> bandwidth;          // per standardized input dim
        std::array<double, 4> global_s{}, global_t{};
        int nd = 0;
    };

    std::array<double, 4> eval_net(const Net& net, const std::vector<double>& w_std) const;
    std::array<double, 4> floor_and_renorm(std::array<double, 4> p) const;
    std::vector<double> standardize(const Vec& w) const;

    CcpHyper hyper_;
    int s_ = 0, t_ = 1;
    int din_ = 0;
    std::vector<double> mu_, sd_;
    Net net_s_, net_t_;
    KernelData kernel_;
};

// Fits the pair (s, t); order is canonicalized to s < t internally.
CcpModel fit_ccp(const ObservationPanel& panel, int s, int t, const CcpHyper& hyper);

}  // namespace bundlechoice
