#include "bundlechoice/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "bundlechoice/core_model.hpp"
#include "bundlechoice/optim.hpp"
#include "bundlechoice/rng.hpp"

namespace bundlechoice {

namespace {
constexpr int iO = 0, iA = 1, iB = 2, iAB = 3;

Theta assemble_theta(int d_x, int d_z, int sign_beta, int sign_gamma, const Vec& free) {
    Theta th;
    th.beta.assign(d_x, 0.0);
    th.gamma.assign(d_z, 0.0);
    th.beta[0] = sign_beta;
    th.gamma[0] = sign_gamma;
    for (int k = 1; k < d_x; ++k) th.beta[k] = free[k - 1];
    for (int k = 1; k < d_z; ++k) th.gamma[k] = free[d_x - 1 + k - 1];
    th.normalized = true;
    return th;
}
}  // namespace

CriterionData build_criterion_data(const ObservationPanel& panel, const CcpHyper& hyper) {
    panel.validate();
    CriterionData data;
    data.n = panel.n;
    data.z = panel.z;
    for (int s = 0; s < panel.t_len; ++s)
        for (int t = s + 1; t < panel.t_len; ++t) {
            CcpModel model = fit_ccp(panel, s, t, hyper);
            CriterionData::PairBlock pb;
            pb.s = s;
            pb.t = t;
            pb.p_s.resize(panel.n);
            pb.p_t.resize(panel.n);
            pb.dx_a.resize(panel.n);
            pb.dx_b.resize(panel.n);
            for (int i = 0; i < panel.n; ++i) {
                Vec w = model.make_w(panel, i);
                pb.p_s[i] = model.eval(w, s);
                pb.p_t[i] = model.eval(w, t);
                pb.dx_a[i].resize(panel.d_x);
                pb.dx_b[i].resize(panel.d_x);
                for (int k = 0; k < panel.d_x; ++k) {
                    pb.dx_a[i][k] = panel.x[i][s][0][k] - panel.x[i][t][0][k];
                    pb.dx_b[i][k] = panel.x[i][s][1][k] - panel.x[i][t][1][k];
                }
            }
            data.pairs.push_back(std::move(pb));
        }
    return data;
}

PointEstimate minimize_criterion(const CriterionData& data, int d_x, int d_z,
                                 const TwoStepOptions& opt) {
    if (d_x < 2 || d_z < 2)
        throw std::invalid_argument("minimize_criterion: needs d_x >= 2 and d_z >= 2");
    const int free_dims = (d_x - 1) + (d_z - 1);

    PointEstimate best;
    best.criterion_value = std::numeric_limits<double>::infinity();
    long evals = 0;

    for (int sign_beta : {1, -1})
        for (int sign_gamma : {1, -1}) {
            auto objective = [&](const Vec& free) {
                return criterion(data, assemble_theta(d_x, d_z, sign_beta, sign_gamma, free));
            };
            Vec lo(free_dims, opt.grid_lo), hi(free_dims, opt.grid_hi);
            GridResult g = grid_search(objective, lo, hi, opt.grid_points);
            evals += g.evals;

            NelderMeadOptions nm_opt;
            nm_opt.max_iter = opt.nm_max_iter;
            double step = (opt.grid_hi - opt.grid_lo) / std::max(1, opt.grid_points - 1);
            nm_opt.init_step = step;

            Vec x = g.x;
            double fx = g.f;
            RngStream rs(mix_seed(opt.seed, 7013, sign_beta + 2, sign_gamma + 2));
            for (int r = 0; r < opt.nm_restarts; ++r) {
                Vec start = x;
                if (r > 0)
                    for (auto& v : start) v += rs.uniform(-step, step);
                NelderMeadResult nm = nelder_mead(objective, start, nm_opt);
                evals += nm.evals;
                if (nm.f < fx) {
                    fx = nm.f;
                    x = nm.x;
                }
            }
            if (fx < best.criterion_value) {
                best.criterion_value = fx;
                best.theta_hat = assemble_theta(d_x, d_z, sign_beta, sign_gamma, x);
                best.trace.grid_minimum = g.f;
                best.trace.sign_beta = sign_beta;
                best.trace.sign_gamma = sign_gamma;
            }
        }
    best.trace.criterion_evals = evals;
    return best;
}

PointEstimate estimate_two_step(const ObservationPanel& panel, const TwoStepOptions& options) {
    if (panel.t_len < 2) throw std::invalid_argument("estimate_two_step: needs T >= 2");
    CriterionData data = build_criterion_data(panel, options.ccp);
    return minimize_criterion(data, panel.d_x, panel.d_z, options);
}

bool SetEstimate::hull_contains(const Theta& theta) const {
    Vec free;
    for (size_t k = 1; k < theta.beta.size(); ++k) free.push_back(theta.beta[k]);
    for (size_t k = 1; k < theta.gamma.size(); ++k) free.push_back(theta.gamma[k]);
    if (static_cast<int>(free.size()) != free_dims) return false;
    for (int d = 0; d < free_dims; ++d)
        if (free[d] < free_lower[d] || free[d] > free_upper[d]) return false;
    return true;
}

SetEstimate estimate_set_from_data(const CriterionData& data, int d_x, int d_z, int n,
                                   const GridSpec& grid) {
    if (grid.points < 1) throw std::invalid_argument("estimate_set: empty grid");
    if (n < 1) throw std::invalid_argument("estimate_set: empty panel");
    const int free_dims = (d_x - 1) + (d_z - 1);

    SetEstimate est;
    est.grid = grid;
    est.free_dims = free_dims;
    est.c_hat = 1e-4 * std::log(static_cast<double>(n));
    est.a_n = std::pow(static_cast<double>(n), 0.25);

    long total = 1;
    for (int d = 0; d < free_dims; ++d) total *= grid.points;
    std::vector<double> values(total);

    std::vector<int> idx(free_dims, 0);
    Vec free(free_dims);
    est.min_criterion = std::numeric_limits<double>::infinity();
    for (long p = 0; p < total; ++p) {
        for (int d = 0; d < free_dims; ++d)
            free[d] = grid.points == 1
                          ? grid.lo
                          : grid.lo + (grid.hi - grid.lo) * idx[d] / (grid.points - 1);
        values[p] = criterion(data, assemble_theta(d_x, d_z, 1, 1, free));
        est.min_criterion = std::min(est.min_criterion, values[p]);
        int d = 0;
        while (d < free_dims && ++idx[d] == grid.points) {
            idx[d] = 0;
            ++d;
        }
    }

    const double level = est.min_criterion + est.c_hat / est.a_n;
    est.accepted.assign(total, false);
    est.free_lower.assign(free_dims, std::numeric_limits<double>::infinity());
    est.free_upper.assign(free_dims, -std::numeric_limits<double>::infinity());
    std::fill(idx.begin(), idx.end(), 0);
    for (long p = 0; p < total; ++p) {
        if (values[p] <= level) {
            est.accepted[p] = true;
            for (int d = 0; d < free_dims; ++d) {
                double coord = grid.points == 1
                                   ? grid.lo
                                   : grid.lo + (grid.hi - grid.lo) * idx[d] / (grid.points - 1);
                est.free_lower[d] = std::min(est.free_lower[d], coord);
                est.free_upper[d] = std::max(est.free_upper[d], coord);
            }
        }
        int d = 0;
        while (d < free_dims && ++idx[d] == grid.points) {
            idx[d] = 0;
            ++d;
        }
    }
    return est;
}

SetEstimate estimate_set(const ObservationPanel& panel, const GridSpec& grid,
                         const CcpHyper& hyper) {
    CriterionData data = build_criterion_data(panel, hyper);
    return estimate_set_from_data(data, panel.d_x, panel.d_z, panel.n, grid);
}

// ---- simulated method of moments ----

namespace {

// Empirical moments, common random numbers and panel layout shared by every
// objective evaluation.
struct MsmProblem {
    const ObservationPanel* panel = nullptr;
    int n = 0, T = 0, d_x = 0, d_z = 0, S = 0;
    int moment_dim = 0, n_moments = 0;
    std::vector<double> emp;
    std::vector<double> v_draw, eps_draw;
    std::vector<Vec> xbar;

    int moment_offset(int t, int j) const { return (t * kNumChoices + j) * moment_dim; }

    double objective(const Vec& psi) const {
        const ObservationPanel& p = *panel;
        const double* beta = psi.data();
        const double* gamma = psi.data() + d_x;
        double eta0 = psi[d_x + d_z];
        const double* eta1 = psi.data() + d_x + d_z + 1;
        std::vector<double> sim_m(n_moments, 0.0);
        for (int i = 0; i < n; ++i) {
            double gz = 0.0;
            for (int k = 0; k < d_z; ++k) gz += p.z[i][k] * gamma[k];
            double fe_a = eta0, fe_b = eta0;
            for (int k = 0; k < d_x; ++k) {
                fe_a += xbar[i][k] * eta1[k];
                fe_b += xbar[i][d_x + k] * eta1[k];
            }
            for (int t = 0; t < T; ++t) {
                double ia = 0.0, ib = 0.0;
                for (int k = 0; k < d_x; ++k) {
                    ia += p.x[i][t][0][k] * beta[k];
                    ib += p.x[i][t][1][k] * beta[k];
                }
                const double* ea = &eps_draw[((static_cast<size_t>(i) * T + t) * 2 + 0) * S];
                const double* eb = &eps_draw[((static_cast<size_t>(i) * T + t) * 2 + 1) * S];
                const double* va = &v_draw[(static_cast<size_t>(i) * 2 + 0) * S];
                const double* vb = &v_draw[(static_cast<size_t>(i) * 2 + 1) * S];
                int counts[4] = {0, 0, 0, 0};
                for (int s = 0; s < S; ++s) {
                    double ua = ia + fe_a + va[s] + ea[s];
                    double ub = ib + fe_b + vb[s] + eb[s];
                    double uab = ua + ub + gz;
                    int arg = iO;
                    double um = 0.0;
                    if (ua > um) { um = ua; arg = iA; }
                    if (ub > um) { um = ub; arg = iB; }
                    if (uab > um) { arg = iAB; }
                    ++counts[arg];
                }
                for (int j = 0; j < 4; ++j) {
                    if (counts[j] == 0) continue;
                    double share = static_cast<double>(counts[j]) / S;
                    double* m = sim_m.data() + moment_offset(t, j);
                    m[0] += share;
                    for (int k = 0; k < d_x; ++k) {
                        m[1 + k] += share * p.x[i][t][0][k];
                        m[1 + d_x + k] += share * p.x[i][t][1][k];
                    }
                    for (int k = 0; k < d_z; ++k) m[1 + 2 * d_x + k] += share * p.z[i][k];
                }
            }
        }
        double q = 0.0;
        for (int m = 0; m < n_moments; ++m) {
            double diff = sim_m[m] / n - emp[m];
            q += diff * diff;  // identity weighting
        }
        return q;
    }
};

MsmProblem make_msm_problem(const ObservationPanel& panel, int sim_draws, uint64_t seed) {
    panel.validate();
    if (sim_draws < 100) throw std::invalid_argument("msm: sim_draws must be >= 100");
    if (panel.n < 1) throw std::invalid_argument("msm: empty panel");
    MsmProblem prob;
    prob.panel = &panel;
    prob.n = panel.n;
    prob.T = panel.t_len;
    prob.d_x = panel.d_x;
    prob.d_z = panel.d_z;
    prob.S = sim_draws;
    prob.moment_dim = 1 + 2 * panel.d_x + panel.d_z;
    prob.n_moments = kNumChoices * panel.t_len * prob.moment_dim;

    prob.emp.assign(prob.n_moments, 0.0);
    for (int i = 0; i < prob.n; ++i)
        for (int t = 0; t < prob.T; ++t) {
            int j = static_cast<int>(panel.y[i][t]);
            double* m = prob.emp.data() + prob.moment_offset(t, j);
            m[0] += 1.0;
            for (int k = 0; k < prob.d_x; ++k) {
                m[1 + k] += panel.x[i][t][0][k];
                m[1 + prob.d_x + k] += panel.x[i][t][1][k];
            }
            for (int k = 0; k < prob.d_z; ++k) m[1 + 2 * prob.d_x + k] += panel.z[i][k];
        }
    for (double& v : prob.emp) v /= prob.n;

    const int S = prob.S, T = prob.T;
    prob.v_draw.resize(static_cast<size_t>(prob.n) * 2 * S);
    prob.eps_draw.resize(static_cast<size_t>(prob.n) * T * 2 * S);
    for (int i = 0; i < prob.n; ++i) {
        RngStream rs(mix_seed(seed, 3301, i));
        for (int g = 0; g < 2; ++g)
            for (int s = 0; s < S; ++s)
                prob.v_draw[(static_cast<size_t>(i) * 2 + g) * S + s] = rs.normal();
        for (int t = 0; t < T; ++t)
            for (int g = 0; g < 2; ++g)
                for (int s = 0; s < S; ++s)
                    prob.eps_draw[((static_cast<size_t>(i) * T + t) * 2 + g) * S + s] = rs.gumbel();
    }

    prob.xbar.assign(prob.n, Vec(2 * prob.d_x, 0.0));
    for (int i = 0; i < prob.n; ++i)
        for (int t = 0; t < T; ++t)
            for (int g = 0; g < 2; ++g)
                for (int k = 0; k < prob.d_x; ++k)
                    prob.xbar[i][g * prob.d_x + k] += panel.x[i][t][g][k] / T;
    return prob;
}

}  // namespace

double msm_criterion(const ObservationPanel& panel, const Vec& psi, int sim_draws, uint64_t seed) {
    MsmProblem prob = make_msm_problem(panel, sim_draws, seed);
    const int psi_dim = panel.d_x + panel.d_z + 1 + panel.d_x;
    if (static_cast<int>(psi.size()) != psi_dim)
        throw std::invalid_argument("msm_criterion: psi has wrong length");
    return prob.objective(psi);
}

ParametricEstimate estimate_msm_parametric(const ObservationPanel& panel, int sim_draws,
                                           uint64_t seed) {
    MsmProblem prob = make_msm_problem(panel, sim_draws, seed);
    const int d_x = panel.d_x, d_z = panel.d_z;
    const int psi_dim = d_x + d_z + 1 + d_x;
    auto objective = [&](const Vec& psi) { return prob.objective(psi); };

    // Multistart Nelder-Mead; the simulated objective is a step function in
    // psi, smoothed by the S*N draws.
    NelderMeadOptions nm_opt;
    nm_opt.max_iter = 600;
    nm_opt.init_step = 0.5;
    std::vector<Vec> starts;
    {
        Vec s0(psi_dim, 0.0);
        for (int k = 0; k < d_x; ++k) s0[k] = 1.0;
        for (int k = 0; k < d_z; ++k) s0[d_x + k] = 1.0;
        starts.push_back(s0);
        Vec s1(psi_dim, 0.0);
        starts.push_back(s1);
        RngStream rs(mix_seed(seed, 3307));
        Vec s2(psi_dim);
        for (auto& v : s2) v = rs.uniform(-2.0, 2.0);
        starts.push_back(s2);
    }
    Vec best_x;
    double best_f = std::numeric_limits<double>::infinity();
    for (const auto& s0 : starts) {
        NelderMeadResult r = nelder_mead(objective, s0, nm_opt);
        // polish once from the incumbent with a smaller simplex
        NelderMeadOptions polish = nm_opt;
        polish.init_step = 0.1;
        NelderMeadResult r2 = nelder_mead(objective, r.x, polish);
        if (r2.f < best_f) {
            best_f = r2.f;
            best_x = r2.x;
        }
    }

    ParametricEstimate est;
    est.beta_raw.assign(best_x.begin(), best_x.begin() + d_x);
    est.gamma_raw.assign(best_x.begin() + d_x, best_x.begin() + d_x + d_z);
    est.eta0 = best_x[d_x + d_z];
    est.eta1.assign(best_x.begin() + d_x + d_z + 1, best_x.end());
    est.criterion_value = best_f;
    Theta raw{est.beta_raw, est.gamma_raw, false};
    est.theta_hat = normalize(raw);
    return est;
}

// ---- conditional fixed-effect logit ----

namespace {
// Enumerate distinct permutations of the observed no-bundle choice sequence.
void distinct_permutations(std::vector<int> seq, std::vector<std::vector<int>>& out) {
    std::sort(seq.begin(), seq.end());
    do {
        out.push_back(seq);
    } while (std::next_permutation(seq.begin(), seq.end()));
}

void solve_sym(std::vector<double>& h, Vec& g, int d) {
    // Solves h * x = g in place (Gaussian elimination with partial pivoting).
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::abs(h[r * d + c]) > std::abs(h[piv * d + c])) piv = r;
        if (std::abs(h[piv * d + c]) < 1e-12)
            throw std::runtime_error("fe_logit: singular Hessian (likelihood flat)");
        if (piv != c) {
            for (int k = 0; k < d; ++k) std::swap(h[c * d + k], h[piv * d + k]);
            std::swap(g[c], g[piv]);
        }
        for (int r = c + 1; r < d; ++r) {
            double f = h[r * d + c] / h[c * d + c];
            for (int k = c; k < d; ++k) h[r * d + k] -= f * h[c * d + k];
            g[r] -= f * g[c];
        }
    }
    for (int c = d - 1; c >= 0; --c) {
        for (int k = c + 1; k < d; ++k) g[c] -= h[c * d + k] * g[k];
        g[c] /= h[c * d + c];
    }
}
}  // namespace

PointEstimate estimate_fe_logit(const ObservationPanel& panel) {
    panel.validate();
    if (panel.t_len < 2) throw std::invalid_argument("fe_logit: needs T >= 2");
    const int d = panel.d_x;

    // Individuals with no bundle purchases and at least one switch.
    struct Obs {
        std::vector<int> y;                   // choice codes in {0=O,1=A,2=B}
        std::vector<std::array<Vec, 2>> x;    // per period
    };
    std::vector<Obs> usable;
    for (int i = 0; i < panel.n; ++i) {
        bool ok = true;
        for (int t = 0; t < panel.t_len && ok; ++t)
            if (panel.y[i][t] == Choice::Bundle) ok = false;
        if (!ok) continue;
        Obs o;
        bool switches = false;
        for (int t = 0; t < panel.t_len; ++t) {
            o.y.push_back(static_cast<int>(panel.y[i][t]));
            if (t > 0 && o.y[t] != o.y[0]) switches = true;
            o.x.push_back(panel.x[i][t]);
        }
        if (switches) usable.push_back(std::move(o));
    }
    if (usable.empty())
        throw std::runtime_error("fe_logit: no switching individuals (likelihood flat)");

    // delta_{c,t} = x_{c,t}'beta with x_{O,t} = 0.
    auto index_of = [&](const Obs& o, int code, int t, const Vec& beta) {
        if (code == iO) return 0.0;
        const Vec& x = o.x[t][code - 1];
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += x[k] * beta[k];
        return s;
    };

    Vec beta(d, 0.0);
    for (int iter = 0; iter < 100; ++iter) {
        Vec grad(d, 0.0);
        std::vector<double> hess(static_cast<size_t>(d) * d, 0.0);
        for (const auto& o : usable) {
            std::vector<std::vector<int>> perms;
            distinct_permutations(o.y, perms);
            // log-sum-exp over permutations
            std::vector<double> vals(perms.size());
            double vmax = -1e300;
            for (size_t p = 0; p < perms.size(); ++p) {
                double v = 0.0;
                for (int t = 0; t < panel.t_len; ++t) v += index_of(o, perms[p][t], t, beta);
                vals[p] = v;
                vmax = std::max(vmax, v);
            }
            double denom = 0.0;
            for (double v : vals) denom += std::exp(v - vmax);
            // feature vector of a permutation: sum_t x_{sigma(t), t}
            auto features = [&](const std::vector<int>& perm) {
                Vec f(d, 0.0);
                for (int t = 0; t < panel.t_len; ++t) {
                    if (perm[t] == iO) continue;
                    const Vec& x = o.x[t][perm[t] - 1];
                    for (int k = 0; k < d; ++k) f[k] += x[k];
                }
                return f;
            };
            Vec mean_f(d, 0.0);
            std::vector<double> mean_ff(static_cast<size_t>(d) * d, 0.0);
            for (size_t p = 0; p < perms.size(); ++p) {
                double w = std::exp(vals[p] - vmax) / denom;
                Vec f = features(perms[p]);
                for (int a = 0; a < d; ++a) {
                    mean_f[a] += w * f[a];
                    for (int b = 0; b < d; ++b) mean_ff[a * d + b] += w * f[a] * f[b];
                }
            }
            Vec f_obs = features(o.y);
            for (int a = 0; a < d; ++a) {
                grad[a] += f_obs[a] - mean_f[a];
                for (int b = 0; b < d; ++b)
                    hess[a * d + b] += mean_ff[a * d + b] - mean_f[a] * mean_f[b];
            }
        }
        double gnorm = 0.0;
        for (double v : grad) gnorm = std::max(gnorm, std::abs(v));
        if (gnorm < 1e-10) break;
        Vec step = grad;
        solve_sym(hess, step, d);  // Newton ascent: H is the information matrix
        double scale = 1.0;
        double snorm = 0.0;
        for (double v : step) snorm = std::max(snorm, std::abs(v));
        if (snorm > 2.0) scale = 2.0 / snorm;
        for (int k = 0; k < d; ++k) beta[k] += scale * step[k];
    }

    PointEstimate est;
    Theta raw{beta, Vec{1.0}, false};
    double sb = std::abs(beta[0]);
    if (sb == 0.0) throw std::runtime_error("fe_logit: leading coefficient estimated as zero");
    est.theta_hat.beta = beta;
    for (auto& v : est.theta_hat.beta) v /= sb;
    est.theta_hat.gamma = Vec{};
    est.theta_hat.normalized = true;
    return est;
}

// ---- no-bundle semiparametric estimator ----

double criterion_nobundle(const CriterionData& data, const Vec& beta, bool renormalize) {
    data.require_valid();
    if (data.n == 0) return 0.0;
    double total = 0.0;
    for (const auto& pb : data.pairs) {
        for (int i = 0; i < data.n; ++i) {
            double da = 0.0, db = 0.0;
            for (size_t k = 0; k < beta.size(); ++k) {
                da += pb.dx_a[i][k] * beta[k];
                db += pb.dx_b[i][k] * beta[k];
            }
            std::array<double, 3> ps{}, pt{};
            double denom_s = 1.0, denom_t = 1.0;
            if (renormalize) {
                denom_s = std::max(1e-12, 1.0 - pb.p_s[i][iAB]);
                denom_t = std::max(1e-12, 1.0 - pb.p_t[i][iAB]);
            }
            for (int j = 0; j < 3; ++j) {
                ps[j] = pb.p_s[i][j] / denom_s;
                pt[j] = pb.p_t[i][j] / denom_t;
            }
            const double delta3[3] = {0.0, da, db};
            for (int dir = 0; dir < 2; ++dir) {
                double sgn = dir == 0 ? 1.0 : -1.0;
                for (int j = 0; j < 3; ++j) {
                    bool lam = false;
                    for (int k = 0; k < 3 && !lam; ++k)
                        if (k != j && sgn * delta3[j] > sgn * delta3[k]) lam = true;
                    if (lam) continue;
                    double gj = dir == 0 ? ps[j] - pt[j] : pt[j] - ps[j];
                    if (gj > 0.0) total += gj;
                }
            }
        }
    }
    return total / data.n;
}

PointEstimate estimate_semi_nobundle(const ObservationPanel& panel,
                                     const SemiNoBundleOptions& options) {
    if (panel.t_len < 2) throw std::invalid_argument("semi_nobundle: needs T >= 2");
    if (panel.d_x < 2) throw std::invalid_argument("semi_nobundle: needs d_x >= 2");
    CriterionData data = build_criterion_data(panel, options.two_step.ccp);

    const TwoStepOptions& opt = options.two_step;
    PointEstimate best;
    best.criterion_value = std::numeric_limits<double>::infinity();
    long evals = 0;
    for (int sign_beta : {1, -1}) {
        auto objective = [&](const Vec& free) {
            Vec beta(panel.d_x);
            beta[0] = sign_beta;
            for (int k = 1; k < panel.d_x; ++k) beta[k] = free[k - 1];
            return criterion_nobundle(data, beta, options.renormalize_ccp);
        };
        Vec lo(panel.d_x - 1, opt.grid_lo), hi(panel.d_x - 1, opt.grid_hi);
        GridResult g = grid_search(objective, lo, hi, opt.grid_points);
        evals += g.evals;
        NelderMeadOptions nm_opt;
        nm_opt.max_iter = opt.nm_max_iter;
        nm_opt.init_step = (opt.grid_hi - opt.grid_lo) / std::max(1, opt.grid_points - 1);
        Vec x = g.x;
        double fx = g.f;
        RngStream rs(mix_seed(opt.seed, 7019, sign_beta + 2));
        for (int r = 0; r < opt.nm_restarts; ++r) {
            Vec start = x;
            if (r > 0)
                for (auto& v : start) v += rs.uniform(-nm_opt.init_step, nm_opt.init_step);
            NelderMeadResult nm = nelder_mead(objective, start, nm_opt);
            evals += nm.evals;
            if (nm.f < fx) {
                fx = nm.f;
                x = nm.x;
            }
        }
        if (fx < best.criterion_value) {
            best.criterion_value = fx;
            best.theta_hat.beta.assign(panel.d_x, 0.0);
            best.theta_hat.beta[0] = sign_beta;
            for (int k = 1; k < panel.d_x; ++k) best.theta_hat.beta[k] = x[k - 1];
            best.theta_hat.gamma = Vec{};
            best.theta_hat.normalized = true;
            best.trace.sign_beta = sign_beta;
        }
    }
    best.trace.criterion_evals = evals;
    return best;
}

}  // namespace bundlechoice
