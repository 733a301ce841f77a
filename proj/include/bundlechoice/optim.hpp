#pragma once

#include <functional>

#include "bundlechoice/types.hpp"

namespace bundlechoice {

using Objective = std::function<double(const Vec&)>;

struct GridResult {
    Vec x;
    double f = 0.0;
    long evals = 0;
};

// Exhaustive search over a regular grid: points_per_axis values per
// coordinate, inclusive endpoints, fixed iteration order.
GridResult grid_search(const Objective& f, const Vec& lo, const Vec& hi, int points_per_axis);

struct NelderMeadOptions {
    int max_iter = 400;
    double init_step = 0.25;
    double f_tol = 1e-12;
    double x_tol = 1e-9;
};

struct NelderMeadResult {
    Vec x;
    double f = 0.0;
    long evals = 0;
};

// Downhill simplex; suited to the piecewise-constant criterion where
// gradients carry no information.
NelderMeadResult nelder_mead(const Objective& f, const Vec& x0, const NelderMeadOptions& options);

}  // namespace bundlechoice
