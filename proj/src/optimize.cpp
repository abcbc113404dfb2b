#include "pomsim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace pomsim {

OptimizeResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0,
                                    double xatol, double fatol, int max_evals) {
    const int n = static_cast<int>(x0.size());
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        return f(x);
    };

    // Initial simplex: perturb each coordinate by 5% (absolute step for
    // zeros), the conventional choice for unscaled problems.
    std::vector<Eigen::VectorXd> xs(n + 1, x0);
    for (int i = 0; i < n; ++i) {
        if (x0(i) != 0.0)
            xs[i + 1](i) *= 1.05;
        else
            xs[i + 1](i) = 0.00025;
    }
    std::vector<double> fs(n + 1);
    for (int i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

    auto order = [&] {
        std::vector<int> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return fs[a] < fs[b]; });
        std::vector<Eigen::VectorXd> xs2(n + 1);
        std::vector<double> fs2(n + 1);
        for (int i = 0; i <= n; ++i) {
            xs2[i] = xs[idx[i]];
            fs2[i] = fs[idx[i]];
        }
        xs.swap(xs2);
        fs.swap(fs2);
    };
    order();

    while (evals < max_evals) {
        // Convergence: simplex collapsed in both x and f.
        double xspread = 0.0, fspread = 0.0;
        for (int i = 1; i <= n; ++i) {
            xspread = std::max(xspread, (xs[i] - xs[0]).cwiseAbs().maxCoeff());
            fspread = std::max(fspread, std::abs(fs[i] - fs[0]));
        }
        if (xspread <= xatol && fspread <= fatol) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += xs[i];
        centroid /= n;

        const Eigen::VectorXd reflected = centroid + (centroid - xs[n]);
        const double fr = eval(reflected);
        if (fr < fs[0]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[n]);
            const double fe = eval(expanded);
            if (fe < fr) {
                xs[n] = expanded;
                fs[n] = fe;
            } else {
                xs[n] = reflected;
                fs[n] = fr;
            }
        } else if (fr < fs[n - 1]) {
            xs[n] = reflected;
            fs[n] = fr;
        } else {
            // Contract toward the better of the worst point and its mirror.
            const bool outside = fr < fs[n];
            const double direction = outside ? 0.5 : -0.5;
            const Eigen::VectorXd contracted = centroid + direction * (centroid - xs[n]);
            const double fc = eval(contracted);
            if (fc < (outside ? fr : fs[n])) {
                xs[n] = contracted;
                fs[n] = fc;
            } else {
                // Shrink everything toward the best vertex.
                for (int i = 1; i <= n; ++i) {
                    xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
                    fs[i] = eval(xs[i]);
                }
            }
        }
        order();
    }

    return {xs[0], fs[0], evals};
}

OptimizeResult golden_section_minimize(const std::function<double(double)>& f,
                                       double lo, double hi, double xatol,
                                       int max_evals) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    int evals = 0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    evals += 2;
    while (b - a > xatol && evals < max_evals) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++evals;
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(xm);
    ++evals;
    OptimizeResult result;
    result.x = Eigen::VectorXd::Constant(1, xm);
    result.f = fm;
    if (fc < result.f) {
        result.x(0) = c;
        result.f = fc;
    }
    if (fd < result.f) {
        result.x(0) = d;
        result.f = fd;
    }
    result.evaluations = evals;
    return result;
}

int coarse_grid_argmin(const std::function<double(double)>& f,
                       double lo, double hi, int n) {
    int best = 0;
    double fbest = f(lo);
    for (int i = 1; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        const double fi = f(x);
        if (fi < fbest) {
            fbest = fi;
            best = i;
        }
    }
    return best;
}

}  // namespace pomsim
