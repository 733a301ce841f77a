// Monotone-consistency check for the first-step estimator on discrete
// designs: as n grows through {1e3, 1e4, 1e5}, the worst cell error against
// the exact cell probabilities should be nonincreasing in at least 90% of
// seeded runs.

#include <array>
#include <cmath>
#include <cstdio>
#include <vector>

#include "bundlechoice/ccp.hpp"
#include "bundlechoice/rng.hpp"

using namespace bundlechoice;

namespace {

struct CellDesign {
    std::vector<std::array<Vec, 2>> x_cells;
    std::vector<Vec> z_cells;
    std::vector<std::array<double, 4>> p_s, p_t;
};

CellDesign make_design(uint64_t seed) {
    CellDesign d;
    RngStream rs(mix_seed(seed, 1));
    for (int c = 0; c < 4; ++c) {
        d.x_cells.push_back({Vec{rs.uniform(-1, 1), rs.uniform(-1, 1)},
                             Vec{rs.uniform(-1, 1), rs.uniform(-1, 1)}});
        d.z_cells.push_back(Vec{rs.uniform(-1, 1), rs.uniform(-1, 1)});
        std::array<double, 4> ps, pt;
        double ss = 0, st = 0;
        for (int j = 0; j < 4; ++j) {
            ps[j] = rs.uniform(0.05, 1.0);
            pt[j] = rs.uniform(0.05, 1.0);
            ss += ps[j];
            st += pt[j];
        }
        for (int j = 0; j < 4; ++j) {
            ps[j] /= ss;
            pt[j] /= st;
        }
        d.p_s.push_back(ps);
        d.p_t.push_back(pt);
    }
    return d;
}

double max_cell_error(const CellDesign& d, int n, uint64_t seed) {
    ObservationPanel p;
    p.n = n;
    p.t_len = 2;
    p.d_x = 2;
    p.d_z = 2;
    auto draw_choice = [](const std::array<double, 4>& probs, double u) {
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
            acc += probs[j];
            if (u < acc) return static_cast<Choice>(j);
        }
        return Choice::Bundle;
    };
    for (int i = 0; i < n; ++i) {
        int c = i % 4;
        p.x.push_back({d.x_cells[c], d.x_cells[c]});
        p.z.push_back(d.z_cells[c]);
        RngStream rs(mix_seed(seed, 2, i));
        p.y.push_back({draw_choice(d.p_s[c], rs.u01()), draw_choice(d.p_t[c], rs.u01())});
    }
    CcpHyper hyper;
    hyper.seed = mix_seed(seed, 3);
    CcpModel model = fit_ccp(p, 0, 1, hyper);
    double worst = 0.0;
    for (int c = 0; c < 4; ++c) {
        Vec w = CcpModel::make_w(p, c, 0, 1);
        auto ps = model.eval(w, 0);
        auto pt = model.eval(w, 1);
        for (int j = 0; j < 4; ++j) {
            worst = std::max(worst, std::abs(ps[j] - d.p_s[c][j]));
            worst = std::max(worst, std::abs(pt[j] - d.p_t[c][j]));
        }
    }
    return worst;
}

}  // namespace

int main() {
    const int runs = 10;
    int monotone = 0;
    for (int r = 0; r < runs; ++r) {
        CellDesign d = make_design(7000 + r);
        double e3 = max_cell_error(d, 1000, 7100 + r);
        double e4 = max_cell_error(d, 10000, 7200 + r);
        double e5 = max_cell_error(d, 100000, 7300 + r);
        bool ok = e3 >= e4 && e4 >= e5;
        monotone += ok;
        std::printf("run %d: err(1e3)=%.4f err(1e4)=%.4f err(1e5)=%.4f %s\n", r, e3, e4, e5,
                    ok ? "monotone" : "NOT monotone");
    }
    std::printf("monotone in %d/%d runs\n", monotone, runs);
    if (monotone * 10 >= runs * 9) {
        std::printf("[PASS] ccp consistency\n");
        return 0;
    }
    std::printf("[FAIL] ccp consistency\n");
    return 1;
}
