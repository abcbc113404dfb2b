#pragma once

#include <Eigen/Dense>
#include <functional>

namespace pomsim {

// Derivative-free minimization utilities used by the sweep module. All are
// deterministic: no randomness, fixed iteration orders.

struct OptimizeResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int evaluations = 0;
};

// Nelder-Mead simplex with standard coefficients (reflect 1, expand 2,
// contract 1/2, shrink 1/2). Initial simplex perturbs each coordinate by 5%
// (or an absolute step for zero coordinates). Stops when the simplex spread
// satisfies both x and f tolerances, or at max_evals.
OptimizeResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0,
                                    double xatol, double fatol, int max_evals);

// Golden-section search on a bracketed unimodal 1-D function.
OptimizeResult golden_section_minimize(const std::function<double(double)>& f,
                                       double lo, double hi, double xatol,
                                       int max_evals = 200);

// Index of the smallest value of f on a uniform inclusive grid of n points.
int coarse_grid_argmin(const std::function<double(double)>& f,
                       double lo, double hi, int n);

}  // namespace pomsim
