#include "doctest.h"

#include <cmath>

#include "bundlechoice/ccp.hpp"
#include "bundlechoice/rng.hpp"

using namespace bundlechoice;

namespace {

// Panel on a small set of covariate cells with per-cell multinomial outcomes.
struct DiscretePanel {
    ObservationPanel panel;
    std::vector<int> cell_of;                       // individual -> cell
    std::vector<std::array<double, 4>> cell_p_s, cell_p_t;  // true cell CCPs
};

DiscretePanel make_discrete_panel(int n, uint64_t seed) {
    DiscretePanel dp;
    ObservationPanel& p = dp.panel;
    p.n = n;
    p.t_len = 2;
    p.d_x = 2;
    p.d_z = 2;
    const int n_cells = 4;
    std::vector<std::array<Vec, 2>> x_cells;
    std::vector<Vec> z_cells;
    RngStream cell_rs(mix_seed(seed, 1));
    for (int c = 0; c < n_cells; ++c) {
        x_cells.push_back({Vec{cell_rs.uniform(-1, 1), cell_rs.uniform(-1, 1)},
                           Vec{cell_rs.uniform(-1, 1), cell_rs.uniform(-1, 1)}});
        z_cells.push_back(Vec{cell_rs.uniform(-1, 1), cell_rs.uniform(-1, 1)});
        std::array<double, 4> ps, pt;
        double ss = 0, st = 0;
        for (int j = 0; j < 4; ++j) {
            ps[j] = cell_rs.uniform(0.05, 1.0);
            pt[j] = cell_rs.uniform(0.05, 1.0);
            ss += ps[j];
            st += pt[j];
        }
        for (int j = 0; j < 4; ++j) {
            ps[j] /= ss;
            pt[j] /= st;
        }
        dp.cell_p_s.push_back(ps);
        dp.cell_p_t.push_back(pt);
    }
    auto draw_choice = [](const std::array<double, 4>& probs, double u) {
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
            acc += probs[j];
            if (u < acc) return static_cast<Choice>(j);
        }
        return Choice::Bundle;
    };
    for (int i = 0; i < n; ++i) {
        int c = i % n_cells;
        dp.cell_of.push_back(c);
        p.x.push_back({x_cells[c], x_cells[c]});  // same covariates both periods, per cell
        p.z.push_back(z_cells[c]);
        RngStream rs(mix_seed(seed, 2, i));
        p.y.push_back({draw_choice(dp.cell_p_s[c], rs.u01()), draw_choice(dp.cell_p_t[c], rs.u01())});
    }
    return dp;
}

}  // namespace

TEST_CASE("constant-outcome panel is fit to near-degenerate CCPs") {
    ObservationPanel p;
    p.n = 1200;
    p.t_len = 2;
    p.d_x = 2;
    p.d_z = 2;
    RngStream rs(71);
    for (int i = 0; i < p.n; ++i) {
        p.x.push_back({{Vec{rs.normal(), rs.normal()}, Vec{rs.normal(), rs.normal()}},
                       {Vec{rs.normal(), rs.normal()}, Vec{rs.normal(), rs.normal()}}});
        p.z.push_back(Vec{rs.normal(), rs.normal()});
        p.y.push_back({Choice::Bundle, Choice::Bundle});
    }
    CcpHyper hyper;
    hyper.seed = 5;
    CcpModel model = fit_ccp(p, 0, 1, hyper);
    for (int i = 0; i < p.n; ++i) {
        Vec w = model.make_w(p, i);
        CHECK(model.eval(w, 1)[3] >= 0.99);
    }
}

TEST_CASE("neural fit recovers discrete cell frequencies") {
    auto dp = make_discrete_panel(100000, 72);
    CcpHyper hyper;
    hyper.seed = 6;
    CcpModel model = fit_ccp(dp.panel, 0, 1, hyper);
    // empirical cell frequencies as the oracle
    std::vector<std::array<double, 4>> freq_s(4, std::array<double, 4>{}),
        freq_t(4, std::array<double, 4>{});
    std::vector<int> count(4, 0);
    for (int i = 0; i < dp.panel.n; ++i) {
        int c = dp.cell_of[i];
        ++count[c];
        freq_s[c][static_cast<int>(dp.panel.y[i][0])] += 1.0;
        freq_t[c][static_cast<int>(dp.panel.y[i][1])] += 1.0;
    }
    for (int c = 0; c < 4; ++c)
        for (int j = 0; j < 4; ++j) {
            freq_s[c][j] /= count[c];
            freq_t[c][j] /= count[c];
        }
    for (int c = 0; c < 4; ++c) {
        int i = c;  // first individual of the cell
        Vec w = model.make_w(dp.panel, i);
        auto ps = model.eval(w, 0);
        auto pt = model.eval(w, 1);
        for (int j = 0; j < 4; ++j) {
            CHECK(std::abs(ps[j] - freq_s[c][j]) < 0.02);
            CHECK(std::abs(pt[j] - freq_t[c][j]) < 0.02);
        }
    }
}

TEST_CASE("kernel fit recovers discrete cell frequencies") {
    auto dp = make_discrete_panel(10000, 73);
    CcpHyper hyper;
    hyper.method = CcpMethod::Kernel;
    CcpModel model = fit_ccp(dp.panel, 0, 1, hyper);
    std::vector<std::array<double, 4>> freq_t(4, std::array<double, 4>{});
    std::vector<int> count(4, 0);
    for (int i = 0; i < dp.panel.n; ++i) {
        int c = dp.cell_of[i];
        ++count[c];
        freq_t[c][static_cast<int>(dp.panel.y[i][1])] += 1.0;
    }
    for (int c = 0; c < 4; ++c)
        for (int j = 0; j < 4; ++j) freq_t[c][j] /= count[c];
    for (int c = 0; c < 4; ++c) {
        Vec w = model.make_w(dp.panel, c);
        auto pt = model.eval(w, 1);
        for (int j = 0; j < 4; ++j) CHECK(std::abs(pt[j] - freq_t[c][j]) < 0.02);
    }
}

TEST_CASE("refit with the same seed is identical") {
    auto dp = make_discrete_panel(500, 74);
    CcpHyper hyper;
    hyper.seed = 7;
    CcpModel m1 = fit_ccp(dp.panel, 0, 1, hyper);
    CcpModel m2 = fit_ccp(dp.panel, 0, 1, hyper);
    CHECK(m1.dump_json() == m2.dump_json());
}

TEST_CASE("evaluated CCPs live on the simplex") {
    auto dp = make_discrete_panel(300, 75);
    for (CcpMethod method : {CcpMethod::Neural, CcpMethod::Kernel}) {
        CcpHyper hyper;
        hyper.method = method;
        hyper.seed = 8;
        CcpModel model = fit_ccp(dp.panel, 0, 1, hyper);
        RngStream rs(76);
        for (int rep = 0; rep < 50; ++rep) {
            Vec w(4 * dp.panel.d_x + dp.panel.d_z);
            for (auto& v : w) v = rs.normal(0.0, 2.0);
            auto p = model.eval(w, 0);
            double sum = 0.0;
            for (int j = 0; j < 4; ++j) {
                CHECK(p[j] >= 0.0);
                sum += p[j];
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("eval_set endpoints") {
    auto dp = make_discrete_panel(200, 77);
    CcpHyper hyper;
    hyper.seed = 9;
    CcpModel model = fit_ccp(dp.panel, 0, 1, hyper);
    Vec w = model.make_w(dp.panel, 0);
    CHECK(model.eval_set(w, 0, {}) == 0.0);
    CHECK(model.eval_set(w, 0, {Choice::O, Choice::OnlyA, Choice::OnlyB, Choice::Bundle}) == 1.0);
    double da = model.eval_set(w, 0, {Choice::OnlyA, Choice::Bundle});
    auto p = model.eval(w, 0);
    CHECK(da == doctest::Approx(p[1] + p[3]));
    // duplicate members do not double count
    CHECK(model.eval_set(w, 0, {Choice::OnlyA, Choice::OnlyA}) == doctest::Approx(p[1]));
}

TEST_CASE("fit_ccp input validation") {
    auto dp = make_discrete_panel(8, 78);
    CcpHyper hyper;
    CHECK_THROWS_AS(fit_ccp(dp.panel, 0, 1, hyper), std::invalid_argument);  // n < 10
    auto ok = make_discrete_panel(50, 79);
    CHECK_THROWS_AS(fit_ccp(ok.panel, 0, 0, hyper), std::invalid_argument);  // s == t
    CcpModel model = fit_ccp(ok.panel, 0, 1, hyper);
    Vec w = model.make_w(ok.panel, 0);
    CHECK_THROWS_AS(model.eval(w, 5), std::invalid_argument);
}

TEST_CASE("json dump/load round trip preserves evaluations") {
    auto dp = make_discrete_panel(400, 80);
    for (CcpMethod method : {CcpMethod::Neural, CcpMethod::Kernel}) {
        CcpHyper hyper;
        hyper.method = method;
        hyper.seed = 10;
        CcpModel model = fit_ccp(dp.panel, 0, 1, hyper);
        CcpModel loaded = CcpModel::load_json(model.dump_json());
        for (int i = 0; i < 5; ++i) {
            Vec w = model.make_w(dp.panel, i);
            CHECK(model.eval(w, 0) == loaded.eval(w, 0));
            CHECK(model.eval(w, 1) == loaded.eval(w, 1));
        }
    }
}
