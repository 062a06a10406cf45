#pragma once

#include <stdexcept>
#include <vector>

#include "sgcis/errors.hpp"
#include "sgcis/spin_algebra.hpp"

namespace sgcis {

namespace constants {
/// Reduced Planck constant, J s (CODATA 2018 exact).
inline constexpr double hbar = 1.054571817e-34;
}  // namespace constants

/// Inputs of the free evolution along the unperturbed trajectory.
/// omega0 = mu0 * B'_0 / hbar is passed in directly; hbar defaults to 1
/// (reduced units) and can be set to constants::hbar for SI inputs.
struct EvolutionParams {
    double omega0 = 1.0;  // rad/s
    double t0 = 0.0;      // s
    double tf = 1.0;      // s
    double mass = 1.0;    // kg
    double mu0 = 1.0;     // J/T
    double b1 = 1.0;      // T/m
    double hbar = 1.0;    // J s

    void validate() const;
    double theta() const { return omega0 * (tf - t0); }
};

/// First-order cross-section correction operator on the spin space,
/// represented in the z' (field-aligned) basis, descending m'.
///
/// `matrix` is dimensionless: the double time integral evaluated in units
/// of the precession phase theta = omega0*(tf-t0), Hermitized.  The full
/// operator is prefactor * matrix with
/// prefactor = (mu0*b1)^2 / (2*hbar*mass*omega0^3).
struct DeltaMatrix {
    Spin s = Spin::from_twice(0);
    double theta = 0.0;
    Matrix matrix;
    double prefactor = 0.0;
    int nodes = 0;           // converged Gauss-Legendre node count per axis
    double achieved_tol = 0.0;

    double max_offdiagonal() const;
    double norm() const;  // max absolute entry
};

/// Diagonal of U_0(t_b, t_a) in the z' basis: exp(-i*omega0*(t_b-t_a)*m).
Vector free_propagator_diag(const EvolutionParams& p, Spin s, double t_a, double t_b);

/// Dimensionless shape of the diagonal entries as a function of
/// theta = omega0*(tf-t0):  f(theta) = 2 - 2cos(theta) - theta*sin(theta).
double delta_shape_factor(double theta);

/// Numerical evaluation of the correction operator by nested Gauss-Legendre
/// quadrature over the triangle t0 <= t' <= t <= tf, node count doubled
/// until successive refinements agree to rel_tol.
DeltaMatrix delta_numeric(const EvolutionParams& p, Spin s, double rel_tol = 1e-8,
                          int max_nodes = 1024);

/// Coherent Internal States at frame angle beta: lab-basis spin states with
/// definite projection m' along the local field direction.
struct CISBasis {
    double beta = 0.0;
    std::vector<SpinState> states;   // descending m'
    std::vector<int> twice_m_labels;
};

/// Extracts the CIS as eigenvectors of the correction operator, matched to
/// the rotated I_z eigenstates by maximal overlap (re-orthonormalized within
/// degenerate eigenspaces).  Throws if any overlap falls below 0.999.
CISBasis find_cis(const DeltaMatrix& delta, Spin s, double beta);

/// Amplitudes d^I_{m',m_lab}(beta) of a lab-frame projection state over the
/// CIS, ordered by descending m'.
Eigen::VectorXd decompose_lab_state(Spin s, int twice_m_lab, double beta);

/// p(m, m') = |d^I_{m',m}(beta)|^2, ordered by descending m'. Sums to 1.
Eigen::VectorXd branch_probabilities(Spin s, int twice_m_lab, double beta);

/// Same, reusing a precomputed d matrix (hot path).
Eigen::VectorXd branch_probabilities_from(const WignerSmallD& d, Spin s, int twice_m_lab);

/// Second-order small-angle expansion of p(m, m'): the diagonal term
/// 1 - (I(I+1)-m^2)/2 * beta^2, the m+-1 terms (I(I+1)-m(m+-1))/4 * beta^2,
/// zero for all other transitions.
double small_angle_probability(Spin s, int twice_m_lab, int twice_m_branch, double beta);

/// Small-angle probability of reading the wrong projection,
/// (I(I+1)-m^2)/2 * beta^2.
double error_probability_small_angle(Spin s, int twice_m_lab, double beta);

/// Exact variant, 1 - p(m, m).
double error_probability_exact(Spin s, int twice_m_lab, double beta);

/// Beam-averaged small-angle error, (I(I+1)-m^2)/2 * ratio^2/2,
/// with ratio = a*B1/B0.
double mean_error_probability_closed_form(Spin s, int twice_m_lab, double ratio);

/// Beam-averaged exact error by Gauss-Hermite quadrature of 1 - p(m,m) over
/// the Gaussian beam with the full nonlinear beta(x, z).
double mean_error_probability_exact(Spin s, int twice_m_lab, double ratio, int gh_order = 64);

}  // namespace sgcis
