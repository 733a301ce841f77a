#include "bundlechoice/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bundlechoice {

GridResult grid_search(const Objective& f, const Vec& lo, const Vec& hi, int points_per_axis) {
    const int dims = static_cast<int>(lo.size());
    if (dims == 0 || hi.size() != lo.size())
        throw std::invalid_argument("grid_search: empty or mismatched bounds");
    if (points_per_axis < 1) throw std::invalid_argument("grid_search: empty grid");

    GridResult best;
    best.f = std::numeric_limits<double>::infinity();
    std::vector<int> idx(dims, 0);
    Vec x(dims);
    while (true) {
        for (int d = 0; d < dims; ++d) {
            x[d] = points_per_axis == 1
                       ? lo[d]
                       : lo[d] + (hi[d] - lo[d]) * idx[d] / (points_per_axis - 1);
        }
        double v = f(x);
        ++best.evals;
        if (v < best.f) {
            best.f = v;
            best.x = x;
        }
        int d = 0;
        while (d < dims && ++idx[d] == points_per_axis) {
            idx[d] = 0;
            ++d;
        }
        if (d == dims) break;
    }
    return best;
}

NelderMeadResult nelder_mead(const Objective& f, const Vec& x0, const NelderMeadOptions& opt) {
    const int n = static_cast<int>(x0.size());
    if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    std::vector<Vec> simplex(n + 1, x0);
    for (int d = 0; d < n; ++d) simplex[d + 1][d] += opt.init_step;

    NelderMeadResult res;
    std::vector<double> fv(n + 1);
    for (int i = 0; i <= n; ++i) {
        fv[i] = f(simplex[i]);
        ++res.evals;
    }

    std::vector<int> order(n + 1);
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        int best = order[0], worst = order[n], second = order[n - 1];

        double spread = fv[worst] - fv[best];
        double width = 0.0;
        for (int d = 0; d < n; ++d)
            width = std::max(width, std::abs(simplex[worst][d] - simplex[best][d]));
        if (spread <= opt.f_tol && width <= opt.x_tol) break;

        Vec centroid(n, 0.0);
        for (int i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (int d = 0; d < n; ++d) centroid[d] += simplex[i][d] / n;
        }

        Vec xr(n);
        for (int d = 0; d < n; ++d) xr[d] = centroid[d] + alpha * (centroid[d] - simplex[worst][d]);
        double fr = f(xr);
        ++res.evals;

        if (fr < fv[best]) {
            Vec xe(n);
            for (int d = 0; d < n; ++d)
                xe[d] = centroid[d] + gamma * (centroid[d] - simplex[worst][d]);
            double fe = f(xe);
            ++res.evals;
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            Vec xc(n);
            bool outside = fr < fv[worst];
            const Vec& base = outside ? xr : simplex[worst];
            for (int d = 0; d < n; ++d) xc[d] = centroid[d] + rho * (base[d] - centroid[d]);
            double fc = f(xc);
            ++res.evals;
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (int d = 0; d < n; ++d)
                        simplex[i][d] = simplex[best][d] + sigma * (simplex[i][d] - simplex[best][d]);
                    fv[i] = f(simplex[i]);
                    ++res.evals;
                }
            }
        }
    }

    int arg = 0;
    for (int i = 1; i <= n; ++i)
        if (fv[i] < fv[arg]) arg = i;
    res.x = simplex[arg];
    res.f = fv[arg];
    return res;
}

}  // namespace bundlechoice
