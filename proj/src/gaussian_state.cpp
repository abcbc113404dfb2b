#include "pomsim/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pomsim {

namespace {

// Relative symmetry check used before any spectral computation.
bool nearly_symmetric(const Eigen::MatrixXd& m, double rtol) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= rtol * scale;
}

}  // namespace

Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int i = 0; i < n_modes; ++i) {
        omega(2 * i, 2 * i + 1) = 1.0;
        omega(2 * i + 1, 2 * i) = -1.0;
    }
    return omega;
}

Eigen::Matrix4d beamsplitter() {
    const double s = 1.0 / std::numbers::sqrt2;
    Eigen::Matrix4d b;
    b << s, 0, s, 0,
         0, s, 0, s,
         s, 0, -s, 0,
         0, s, 0, -s;
    return b;
}

BasisMap collective_basis_map(int n_modes) {
    if (n_modes != 2 && n_modes != 3)
        throw std::invalid_argument("collective_basis_map: supports 2 or 3 modes");
    BasisMap map;
    map.label = BasisLabel::collective;
    if (n_modes == 2) {
        map.matrix = beamsplitter();
    } else {
        map.matrix = Eigen::MatrixXd::Identity(6, 6);
        map.matrix.topLeftCorner<4, 4>() = beamsplitter();
    }
    return map;
}

GaussianState thermal_state(double n1, double n2) {
    if (n1 < 0.5 - 1e-12 || n2 < 0.5 - 1e-12)
        throw std::invalid_argument(
            "thermal_state: total occupations must be >= 1/2 (vacuum)");
    GaussianState state;
    state.n_modes = 2;
    state.mean = Eigen::VectorXd::Zero(4);
    state.cov = Eigen::Vector4d(n1, n1, n2, n2).asDiagonal();
    return state;
}

GaussianState attach_vacuum_optical_mode(const GaussianState& state) {
    if (state.n_modes != 2)
        throw std::invalid_argument("attach_vacuum_optical_mode: expects a 2-mode state");
    GaussianState out;
    out.n_modes = 3;
    out.mean = Eigen::VectorXd::Zero(6);
    out.mean.head(4) = state.mean;
    out.cov = Eigen::MatrixXd::Zero(6, 6);
    out.cov.topLeftCorner(4, 4) = state.cov;
    out.cov(4, 4) = 0.5;
    out.cov(5, 5) = 0.5;
    return out;
}

GaussianState partial_trace(const GaussianState& state, const std::vector<int>& keep) {
    if (keep.empty())
        throw std::invalid_argument("partial_trace: keep set must not be empty");
    std::vector<int> quads;
    for (int mode : keep) {
        if (mode < 1 || mode > state.n_modes)
            throw std::invalid_argument("partial_trace: mode index out of range");
        quads.push_back(2 * (mode - 1));
        quads.push_back(2 * (mode - 1) + 1);
    }
    GaussianState out;
    out.n_modes = static_cast<int>(keep.size());
    out.mean = Eigen::VectorXd(quads.size());
    out.cov = Eigen::MatrixXd(quads.size(), quads.size());
    for (std::size_t i = 0; i < quads.size(); ++i) {
        out.mean(i) = state.mean(quads[i]);
        for (std::size_t j = 0; j < quads.size(); ++j)
            out.cov(i, j) = state.cov(quads[i], quads[j]);
    }
    return out;
}

GaussianState change_basis(const GaussianState& state, const BasisMap& map) {
    if (map.matrix.rows() != state.dim() || map.matrix.cols() != state.dim())
        throw std::invalid_argument("change_basis: dimension mismatch");
    GaussianState out;
    out.n_modes = state.n_modes;
    out.mean = map.matrix * state.mean;
    out.cov = map.matrix * state.cov * map.matrix.transpose();
    return out;
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols() || cov.rows() % 2 != 0)
        throw std::invalid_argument("symplectic_eigenvalues: need an even square matrix");
    if (!nearly_symmetric(cov, 1e-9))
        throw std::invalid_argument("symplectic_eigenvalues: matrix is not symmetric");
    const int n = static_cast<int>(cov.rows()) / 2;
    // Guard against tiny asymmetries before the spectral step.
    const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    const Eigen::MatrixXd m = symplectic_form(n) * sym;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    std::vector<double> mags(2 * n);
    for (int i = 0; i < 2 * n; ++i) mags[i] = std::abs(solver.eigenvalues()(i));
    // Eigenvalues of Omega*cov come in +-i*nu pairs; keep one per pair.
    std::sort(mags.begin(), mags.end());
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = mags[2 * i];
    return out;
}

bool is_bona_fide(const GaussianState& state, double tol) {
    if (!nearly_symmetric(state.cov, 1e-12)) return false;
    for (double nu : symplectic_eigenvalues(state.cov))
        if (nu < 0.5 - tol) return false;
    return true;
}

double ppt_minimum_eigenvalue(const Eigen::MatrixXd& cov) {
    if (cov.rows() != 4 || cov.cols() != 4)
        throw std::invalid_argument("ppt_minimum_eigenvalue: expects a 4x4 covariance");
    const Eigen::Vector4d flip(1.0, 1.0, 1.0, -1.0);  // momentum flip of mode 2
    const Eigen::Matrix4d transposed =
        flip.asDiagonal() * cov * flip.asDiagonal();
    return symplectic_eigenvalues(transposed).front();
}

double log_negativity(const GaussianState& state) {
    if (state.n_modes != 2)
        throw std::invalid_argument("log_negativity: expects a 2-mode state");
    const double nu = ppt_minimum_eigenvalue(state.cov);
    return std::max(0.0, -std::log2(2.0 * nu));
}

WignerGrid wigner_marginal_grid(const GaussianState& state, int qa, int qb,
                                const GridSpec& spec) {
    if (qa == qb || qa < 0 || qb < 0 || qa >= state.dim() || qb >= state.dim())
        throw std::invalid_argument("wigner_marginal_grid: need two distinct quadrature indices");
    if (spec.x_count < 2 || spec.y_count < 2)
        throw std::invalid_argument("wigner_marginal_grid: grid needs at least 2x2 points");

    Eigen::Matrix2d block;
    block << state.cov(qa, qa), state.cov(qa, qb),
             state.cov(qb, qa), state.cov(qb, qb);
    const double det = block.determinant();
    if (det <= 0.0)
        throw std::invalid_argument("wigner_marginal_grid: marginal covariance is singular");
    const Eigen::Matrix2d inv = block.inverse();
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
    const Eigen::Vector2d mu(state.mean(qa), state.mean(qb));

    WignerGrid grid;
    grid.spec = spec;
    grid.x.resize(spec.x_count);
    grid.y.resize(spec.y_count);
    for (int i = 0; i < spec.x_count; ++i)
        grid.x[i] = spec.x_min + (spec.x_max - spec.x_min) * i / (spec.x_count - 1);
    for (int j = 0; j < spec.y_count; ++j)
        grid.y[j] = spec.y_min + (spec.y_max - spec.y_min) * j / (spec.y_count - 1);
    grid.values.resize(spec.y_count, spec.x_count);
    for (int j = 0; j < spec.y_count; ++j) {
        for (int i = 0; i < spec.x_count; ++i) {
            const Eigen::Vector2d d(grid.x[i] - mu(0), grid.y[j] - mu(1));
            grid.values(j, i) = norm * std::exp(-0.5 * d.dot(inv * d));
        }
    }
    return grid;
}

}  // namespace pomsim
