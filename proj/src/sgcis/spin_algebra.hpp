#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sgcis {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Spin quantum number I, stored as 2I so that half-integer spins stay exact.
class Spin {
public:
    static Spin from_twice(int twice_i);
    static Spin from_dim(int dim);

    int twice() const { return twice_i_; }
    int dim() const { return twice_i_ + 1; }
    double value() const { return 0.5 * twice_i_; }

    /// Magnetic quantum numbers as 2m, descending: 2I, 2I-2, ..., -2I.
    std::vector<int> twice_m_values() const;
    int twice_m_at(int index) const;
    int index_of_twice_m(int twice_m) const;

    bool operator==(const Spin&) const = default;

private:
    explicit Spin(int twice_i) : twice_i_(twice_i) {}
    int twice_i_;
};

/// Angular momentum matrices in the I_z eigenbasis, spin in units of hbar.
/// Basis order is descending m everywhere: index 0 is m = +I.
struct SpinMatrices {
    Spin s;
    Matrix ix, iy, iz;
};

SpinMatrices build_spin_matrices(Spin s);

/// Normalized internal state in the descending-m basis.
struct SpinState {
    Vector amplitudes;

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double norm() const { return amplitudes.norm(); }
};

/// Real rotation matrix d^I_{m',m}(beta) = <m'| exp(-i beta I_y) |m>.
struct WignerSmallD {
    double beta = 0.0;
    Eigen::MatrixXd matrix;
};

/// Evaluates d(beta) from the spectral decomposition of I_y, computed once.
/// Cheap per call; use one instance for hot loops over many angles.
class WignerEvaluator {
public:
    explicit WignerEvaluator(Spin s);

    WignerSmallD operator()(double beta) const;
    Spin spin() const { return s_; }

private:
    Spin s_;
    Eigen::VectorXd eigenvalues_;  // m values of I_y, ascending
    Matrix eigenvectors_;
};

WignerSmallD wigner_small_d(Spin s, double beta);

/// I'_z = I_z cos(beta) + I_x sin(beta); I'_x = -I_z sin(beta) + I_x cos(beta).
std::pair<Matrix, Matrix> rotate_frame_operators(const SpinMatrices& ops, double beta);

/// <state|op|state> for Hermitian op. Throws on dimension mismatch,
/// non-Hermitian op, or an imaginary residue above 1e-9.
double expectation(const SpinState& state, const Matrix& op);

/// The I_z eigenstate |m> rotated by d(beta): column m of the d matrix.
/// Satisfies <I_z> = m cos(beta), <I_x> = m sin(beta).
SpinState rotated_eigenstate(const WignerSmallD& d, Spin s, int twice_m);

}  // namespace sgcis
