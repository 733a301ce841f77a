#include "bundlechoice/testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bundlechoice/rng.hpp"

namespace bundlechoice {

namespace {
constexpr int iO = 0, iA = 1, iB = 2, iAB = 3;
}

bool ZCell::contains(const Vec& z) const {
    for (size_t k = 0; k < lo.size() && k < z.size(); ++k)
        if (z[k] < lo[k]) return false;
    for (size_t k = 0; k < hi.size() && k < z.size(); ++k)
        if (z[k] > hi[k]) return false;
    return true;
}

bool xi_indicator(const std::array<double, 4>& ccp_s, const std::array<double, 4>& ccp_t,
                  int kind) {
    if (kind != 1 && kind != 2) throw std::invalid_argument("xi_indicator: kind must be 1 or 2");
    const int set1[3] = {iA, iB, iAB};
    const int set2[3] = {iA, iAB, iO};
    const int* set = kind == 1 ? set1 : set2;
    for (int m = 0; m < 3; ++m)
        if (ccp_s[set[m]] - ccp_t[set[m]] < 0.0) return false;
    return true;
}

namespace {

ObservationPanel subset_panel(const ObservationPanel& panel, const ZCell& z_cell) {
    ObservationPanel sub;
    sub.t_len = panel.t_len;
    sub.d_x = panel.d_x;
    sub.d_z = panel.d_z;
    for (int i = 0; i < panel.n; ++i) {
        if (!z_cell.contains(panel.z[i])) continue;
        sub.z.push_back(panel.z[i]);
        sub.x.push_back(panel.x[i]);
        sub.y.push_back(panel.y[i]);
    }
    sub.n = static_cast<int>(sub.z.size());
    return sub;
}

// One gated cell moment: the within-cell mean, sd and count of the paired
// indicator differences d_i.
struct CellMoment {
    double mean = 0.0;
    double sd = 1.0;
    int count = 0;
    std::vector<int> members;
    std::vector<double> d;
};

struct CellSystem {
    std::vector<CellMoment> gated;  // only cells whose xi-gate fired
    double statistic = 0.0;
};

// sign = +1 tests the moment >= 0 (negative part enters the max);
// sign = -1 tests the moment <= 0.
void add_cell(CellSystem& sys, const std::vector<int>& members, const std::vector<double>& d,
              int sign) {
    CellMoment cm;
    cm.count = static_cast<int>(d.size());
    if (cm.count < 2) return;
    double mean = std::accumulate(d.begin(), d.end(), 0.0) / cm.count;
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    var /= (cm.count - 1);
    cm.mean = sign * mean;
    cm.sd = std::max(std::sqrt(var), 1e-3);
    cm.members = members;
    cm.d = d;
    if (sign < 0)
        for (double& v : cm.d) v = -v;
    double t = std::sqrt(static_cast<double>(cm.count)) * std::max(0.0, -cm.mean) / cm.sd;
    sys.statistic = std::max(sys.statistic, t);
    sys.gated.push_back(std::move(cm));
}

TestResult run_gated_max_test(const ObservationPanel& panel, const TestOptions& opt,
                              int xi_kind, const char* hypothesis,
                              const std::vector<std::pair<Good, int>>& moment_signs) {
    TestResult res;
    res.hypothesis = hypothesis;
    res.alpha = opt.alpha;
    res.seed = opt.seed;
    if (panel.n < 10) throw std::invalid_argument("test: subsample too small (n < 10)");

    const int n = panel.n;
    const int k_neighbors = std::min(n, std::max(30, static_cast<int>(opt.neighbor_frac * n)));
    const int n_centers = std::min(opt.n_centers, n);

    CellSystem sys;
    for (int s = 0; s < panel.t_len; ++s) {
        for (int t = s + 1; t < panel.t_len; ++t) {
            CcpModel model = fit_ccp(panel, s, t, opt.ccp);

            // Standardized conditioning vectors for the kNN cells.
            const int din = 4 * panel.d_x + panel.d_z;
            std::vector<double> w_all(static_cast<size_t>(n) * din);
            for (int i = 0; i < n; ++i) {
                Vec w = model.make_w(panel, i);
                for (int d = 0; d < din; ++d) w_all[static_cast<size_t>(i) * din + d] = w[d];
            }
            std::vector<double> mu(din, 0.0), sd(din, 0.0);
            for (int i = 0; i < n; ++i)
                for (int d = 0; d < din; ++d) mu[d] += w_all[static_cast<size_t>(i) * din + d] / n;
            for (int i = 0; i < n; ++i)
                for (int d = 0; d < din; ++d) {
                    double diff = w_all[static_cast<size_t>(i) * din + d] - mu[d];
                    sd[d] += diff * diff / n;
                }
            for (int d = 0; d < din; ++d) sd[d] = std::max(std::sqrt(sd[d]), 1e-12);

            // Seeded centers without replacement.
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            RngStream rs(mix_seed(opt.seed, 4243, s, t));
            for (int i = n - 1; i > 0; --i) {
                int j = static_cast<int>(rs.next_u64() % static_cast<uint64_t>(i + 1));
                std::swap(order[i], order[j]);
            }

            std::vector<std::pair<double, int>> dist(n);
            for (int c = 0; c < n_centers; ++c) {
                const int center = order[c];
                const double* wc = &w_all[static_cast<size_t>(center) * din];

                Vec w_center(wc, wc + din);
                auto p_s = model.eval(w_center, s);
                auto p_t = model.eval(w_center, t);
                if (!xi_indicator(p_s, p_t, xi_kind)) continue;

                for (int i = 0; i < n; ++i) {
                    const double* wi = &w_all[static_cast<size_t>(i) * din];
                    double q = 0.0;
                    for (int d = 0; d < din; ++d) {
                        double u = (wi[d] - wc[d]) / sd[d];
                        q += u * u;
                    }
                    dist[i] = {q, i};
                }
                std::nth_element(dist.begin(), dist.begin() + (k_neighbors - 1), dist.end());
                std::vector<int> members(k_neighbors);
                for (int m = 0; m < k_neighbors; ++m) members[m] = dist[m].second;
                std::sort(members.begin(), members.end());

                for (auto [good, sign] : moment_signs) {
                    std::vector<double> d(k_neighbors);
                    for (int m = 0; m < k_neighbors; ++m) {
                        int i = members[m];
                        d[m] = (in_demand_set(panel.y[i][s], good) ? 1.0 : 0.0) -
                               (in_demand_set(panel.y[i][t], good) ? 1.0 : 0.0);
                    }
                    add_cell(sys, members, d, sign);
                    // reversed ordered pair: gate mirrored, moment negated
                    auto p_s_rev = p_t, p_t_rev = p_s;
                    if (xi_indicator(p_s_rev, p_t_rev, xi_kind)) {
                        std::vector<double> dr = d;
                        for (double& v : dr) v = -v;
                        add_cell(sys, members, dr, sign);
                    }
                }
            }
        }
    }

    res.cells_used = static_cast<int>(sys.gated.size());
    res.statistic = sys.statistic;
    if (sys.gated.empty()) {
        res.critical_value = 0.0;
        res.reject = false;
        return res;
    }

    // Multiplier bootstrap of the recentered studentized cell means; the gate
    // is held fixed.
    std::vector<double> boot(opt.bootstrap_draws);
    std::vector<double> e(n);
    RngStream rb(mix_seed(opt.seed, 4247));
    for (int b = 0; b < opt.bootstrap_draws; ++b) {
        for (int i = 0; i < n; ++i) e[i] = rb.bernoulli(0.5) ? 1.0 : -1.0;
        double tmax = 0.0;
        for (const auto& cm : sys.gated) {
            double acc = 0.0;
            double mean_signed = cm.mean;
            for (size_t m = 0; m < cm.members.size(); ++m)
                acc += e[cm.members[m]] * (cm.d[m] - mean_signed);
            double pert = acc / cm.count;
            double t = std::sqrt(static_cast<double>(cm.count)) * std::max(0.0, -pert) / cm.sd;
            tmax = std::max(tmax, t);
        }
        boot[b] = tmax;
    }
    std::sort(boot.begin(), boot.end());
    int q = static_cast<int>(std::ceil((1.0 - opt.alpha) * opt.bootstrap_draws)) - 1;
    q = std::clamp(q, 0, opt.bootstrap_draws - 1);
    res.critical_value = boot[q];
    res.reject = res.statistic > res.critical_value;
    return res;
}

}  // namespace

TestResult test_complementarity(const ObservationPanel& panel, const ZCell& z_cell,
                                const TestOptions& options) {
    ObservationPanel sub = subset_panel(panel, z_cell);
    if (sub.n == 0) throw std::invalid_argument("test: z_cell selects an empty subsample");
    // Under H0 both demand moments are >= 0 on xi^1 cells.
    return run_gated_max_test(sub, options, 1, "complementarity",
                              {{Good::A, +1}, {Good::B, +1}});
}

TestResult test_substitutability(const ObservationPanel& panel, const ZCell& z_cell,
                                 const TestOptions& options) {
    ObservationPanel sub = subset_panel(panel, z_cell);
    if (sub.n == 0) throw std::invalid_argument("test: z_cell selects an empty subsample");
    // Under H0' the D_A moment is >= 0 and the D_B moment is <= 0 on xi^2 cells.
    return run_gated_max_test(sub, options, 2, "substitutability",
                              {{Good::A, +1}, {Good::B, -1}});
}

SabResult estimate_s_ab(const ObservationPanel& panel, const ZCell& z_cell, int price_coordinate,
                        const SabOptions& options) {
    if (price_coordinate < 0 || price_coordinate >= panel.d_x)
        throw std::invalid_argument("estimate_s_ab: price coordinate out of range");
    SabResult res;
    double num = 0.0, den = 0.0;
    std::vector<std::pair<double, double>> obs;  // (dp, dD)
    for (int i = 0; i < panel.n; ++i) {
        if (!z_cell.contains(panel.z[i])) continue;
        for (int s = 0; s < panel.t_len; ++s)
            for (int t = s + 1; t < panel.t_len; ++t) {
                bool matched = true;
                for (int k = 0; k < panel.d_x && matched; ++k) {
                    if (std::abs(panel.x[i][s][0][k] - panel.x[i][t][0][k]) > options.match_tol)
                        matched = false;
                    if (k != price_coordinate &&
                        std::abs(panel.x[i][s][1][k] - panel.x[i][t][1][k]) > options.match_tol)
                        matched = false;
                }
                if (!matched) continue;
                double dp = panel.x[i][s][1][price_coordinate] -
                            panel.x[i][t][1][price_coordinate];
                if (std::abs(dp) < 1e-12) continue;
                double dd = (in_demand_set(panel.y[i][s], Good::A) ? 1.0 : 0.0) -
                            (in_demand_set(panel.y[i][t], Good::A) ? 1.0 : 0.0);
                num += dd * dp;
                den += dp * dp;
                obs.emplace_back(dp, dd);
            }
    }
    res.pairs_used = static_cast<int>(obs.size());
    if (obs.empty() || den <= 0.0) {
        res.no_variation = true;
        return res;
    }
    res.slope = num / den;
    if (obs.size() >= 2) {
        double rss = 0.0;
        for (auto [dp, dd] : obs) {
            double r = dd - res.slope * dp;
            rss += r * r;
        }
        res.std_error = std::sqrt(rss / (obs.size() - 1) / den);
    } else {
        res.std_error = std::numeric_limits<double>::infinity();
    }
    if (std::abs(res.slope) <= options.noise_mult * res.std_error)
        res.sign = 0;
    else
        res.sign = res.slope > 0.0 ? 1 : -1;
    return res;
}

EtaBounds eta_bounds(const ObservationPanel& panel, const EtaBoundsOptions& options) {
    if (panel.t_len < 2) throw std::invalid_argument("eta_bounds: needs T >= 2");
    EtaBounds out;
    double best_lower = -std::numeric_limits<double>::infinity();
    double best_upper = std::numeric_limits<double>::infinity();
    bool any1 = false, any2 = false;

    for (int s = 0; s < panel.t_len; ++s)
        for (int t = s + 1; t < panel.t_len; ++t) {
            CcpModel model = fit_ccp(panel, s, t, options.ccp);
            for (int i = 0; i < panel.n; ++i) {
                Vec w = model.make_w(panel, i);
                auto ps = model.eval(w, s);
                auto pt = model.eval(w, t);
                // both ordered pairs
                for (int dir = 0; dir < 2; ++dir) {
                    const auto& a = dir == 0 ? ps : pt;
                    const auto& b = dir == 0 ? pt : ps;
                    double dda = (a[iA] + a[iAB]) - (b[iA] + b[iAB]);
                    double ddb = (a[iB] + a[iAB]) - (b[iB] + b[iAB]);
                    if (xi_indicator(a, b, 1)) {
                        any1 = true;
                        best_upper = std::min({best_upper, dda + 1.0, ddb + 1.0});
                    }
                    if (xi_indicator(a, b, 2)) {
                        any2 = true;
                        best_lower = std::max({best_lower, -dda, ddb});
                    }
                }
            }
        }

    out.lower_trivial = !any2;
    out.upper_trivial = !any1;
    out.lower = any2 ? std::clamp(best_lower, 0.0, 1.0) : 0.0;
    out.upper = any1 ? std::clamp(best_upper, 0.0, 1.0) : 1.0;
    out.valid = out.lower <= out.upper;
    return out;
}

}  // namespace bundlechoice
