#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace pomsim {

// Gaussian state of N bosonic modes: first and second moments in a fixed
// quadrature ordering (X1, P1, X2, P2, ...). Vacuum variance is 1/2 per
// quadrature. Covariances fully determine entanglement; means are kept so
// conditional displacements and phase-space plots are possible.
struct GaussianState {
    int n_modes = 0;
    Eigen::VectorXd mean;   // length 2N
    Eigen::MatrixXd cov;    // 2N x 2N, symmetric

    int dim() const { return 2 * n_modes; }
};

enum class BasisLabel { canonical, collective, eigen };

// Explicit orthogonal-symplectic change of basis. States never change basis
// implicitly; every transform is carried by one of these.
struct BasisMap {
    Eigen::MatrixXd matrix;  // acts as v' = M v
    BasisLabel label = BasisLabel::canonical;
};

// Symplectic form for N modes in (X1,P1,...) ordering: block-diagonal copies
// of [[0,1],[-1,0]].
Eigen::MatrixXd symplectic_form(int n_modes);

// 4x4 balanced beamsplitter mixing two modes into collective ones:
// X+=(X1+X2)/sqrt2, P+=(P1+P2)/sqrt2, X-=(X1-X2)/sqrt2, P-=(P1-P2)/sqrt2.
// Rows are ordered (X+,P+,X-,P-); the map is its own inverse transpose
// (orthogonal and symmetric), so the same matrix converts either way.
Eigen::Matrix4d beamsplitter();

// BasisMap from canonical to collective ordering for a 2-mode state, or for
// the mechanical pair of a 3-mode state (optical block untouched).
BasisMap collective_basis_map(int n_modes = 2);

// Two-mode thermal state. Arguments are total occupations including
// zero-point motion, i.e. the quadrature variances; vacuum is 1/2.
GaussianState thermal_state(double n1, double n2);

// Append an optical mode in vacuum as mode N+1.
GaussianState attach_vacuum_optical_mode(const GaussianState& state);

// Keep only the listed modes (1-based indices); discards the rest.
GaussianState partial_trace(const GaussianState& state, const std::vector<int>& keep);

// Congruence transform: mean' = M mean, cov' = M cov M^T.
GaussianState change_basis(const GaussianState& state, const BasisMap& map);

// Moduli of the eigenvalues of i*Omega*cov, deduplicated to N values,
// ascending. Physical states have all values >= 1/2.
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cov);

// True when cov is symmetric and every symplectic eigenvalue is at least
// 1/2 - tol (Heisenberg bound).
bool is_bona_fide(const GaussianState& state, double tol = 1e-9);

// Smallest symplectic eigenvalue of the partial transpose (momentum flip of
// mode 2) of a two-mode covariance.
double ppt_minimum_eigenvalue(const Eigen::MatrixXd& cov);

// Logarithmic negativity of a two-mode state in canonical ordering:
// max(0, -log2(2*nu)) with nu the smallest partial-transpose symplectic
// eigenvalue. Invariant under local symplectic transforms.
double log_negativity(const GaussianState& state);

// Rectangular evaluation grid for phase-space slices.
struct GridSpec {
    double x_min = -6.0, x_max = 6.0;
    int x_count = 201;
    double y_min = -6.0, y_max = 6.0;
    int y_count = 201;
};

struct WignerGrid {
    GridSpec spec;
    std::vector<double> x;   // x_count abscissae
    std::vector<double> y;   // y_count ordinates
    Eigen::MatrixXd values;  // y_count rows, x_count cols
};

// Phase-space density of the 2x2 marginal picked out by a pair of quadrature
// indices (0-based). For Gaussian states this equals the Wigner-function
// marginal; it integrates to 1 over the plane.
WignerGrid wigner_marginal_grid(const GaussianState& state, int qa, int qb,
                                const GridSpec& spec);

}  // namespace pomsim
