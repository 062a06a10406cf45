#include "sgcis/spin_algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sgcis {

namespace {

constexpr Complex kImag{0.0, 1.0};

}  // namespace

Spin Spin::from_twice(int twice_i) {
    if (twice_i < 0)
        throw std::invalid_argument("spin: 2I must be non-negative, got " + std::to_string(twice_i));
    return Spin(twice_i);
}

Spin Spin::from_dim(int dim) {
    if (dim < 1)
        throw std::invalid_argument("spin: dimension must be >= 1, got " + std::to_string(dim));
    return Spin(dim - 1);
}

std::vector<int> Spin::twice_m_values() const {
    std::vector<int> values(dim());
    for (int k = 0; k < dim(); ++k)
        values[k] = twice_i_ - 2 * k;
    return values;
}

int Spin::twice_m_at(int index) const {
    if (index < 0 || index >= dim())
        throw std::out_of_range("spin: basis index " + std::to_string(index) + " out of range");
    return twice_i_ - 2 * index;
}

int Spin::index_of_twice_m(int twice_m) const {
    if ((twice_m & 1) != (twice_i_ & 1) || twice_m > twice_i_ || twice_m < -twice_i_)
        throw std::invalid_argument("spin: invalid 2m = " + std::to_string(twice_m) +
                                    " for 2I = " + std::to_string(twice_i_));
    return (twice_i_ - twice_m) / 2;
}

SpinMatrices build_spin_matrices(Spin s) {
    const int dim = s.dim();
    const double i_val = s.value();

    Matrix iz = Matrix::Zero(dim, dim);
    Matrix iplus = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        const double m = 0.5 * s.twice_m_at(k);
        iz(k, k) = m;
        // Raising element <m+1|I+|m> = sqrt(I(I+1) - m(m+1)); descending
        // basis puts m+1 one row above m.
        if (k > 0)
            iplus(k - 1, k) = std::sqrt(i_val * (i_val + 1.0) - m * (m + 1.0));
    }
    const Matrix iminus = iplus.adjoint();

    SpinMatrices out{s, {}, {}, {}};
    out.ix = 0.5 * (iplus + iminus);
    out.iy = (iplus - iminus) / (2.0 * kImag);
    out.iz = std::move(iz);
    return out;
}

WignerEvaluator::WignerEvaluator(Spin s) : s_(s) {
    const SpinMatrices ops = build_spin_matrices(s);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(ops.iy);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("wigner: eigendecomposition of I_y failed");
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();

    // I_y must have the same spectrum as I_z: m = -I ... +I ascending.
    for (int k = 0; k < s.dim(); ++k) {
        const double expected = -s.value() + k;
        if (std::abs(eigenvalues_[k] - expected) > 1e-10)
            throw std::runtime_error("wigner: I_y spectrum deviates from {-I..I}; algebra construction broken");
    }
}

WignerSmallD WignerEvaluator::operator()(double beta) const {
    if (!std::isfinite(beta))
        throw std::invalid_argument("wigner: beta must be finite");

    const int dim = s_.dim();
    Vector phases(dim);
    for (int k = 0; k < dim; ++k)
        phases[k] = std::polar(1.0, -beta * eigenvalues_[k]);
    const Matrix d = eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();

    const double residue = d.imag().cwiseAbs().maxCoeff();
    if (residue > 1e-9)
        throw std::runtime_error("wigner: imaginary residue " + std::to_string(residue) +
                                 " exceeds 1e-9; algebra construction broken");

    WignerSmallD out;
    out.beta = beta;
    out.matrix = d.real();
    return out;
}

WignerSmallD wigner_small_d(Spin s, double beta) {
    return WignerEvaluator(s)(beta);
}

std::pair<Matrix, Matrix> rotate_frame_operators(const SpinMatrices& ops, double beta) {
    const double c = std::cos(beta);
    const double sn = std::sin(beta);
    return {ops.iz * c + ops.ix * sn, -ops.iz * sn + ops.ix * c};
}

double expectation(const SpinState& state, const Matrix& op) {
    if (op.rows() != op.cols() || op.rows() != state.dim())
        throw std::invalid_argument("expectation: dimension mismatch");
    const double scale = 1.0 + op.cwiseAbs().maxCoeff();
    if ((op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("expectation: operator is not Hermitian");

    const Complex value = state.amplitudes.dot(op * state.amplitudes);
    if (std::abs(value.imag()) > 1e-9 * (1.0 + std::abs(value.real())))
        throw std::runtime_error("expectation: imaginary residue exceeds 1e-9");
    return value.real();
}

SpinState rotated_eigenstate(const WignerSmallD& d, Spin s, int twice_m) {
    const int col = s.index_of_twice_m(twice_m);
    if (d.matrix.rows() != s.dim())
        throw std::invalid_argument("rotated_eigenstate: d matrix dimension mismatch");
    SpinState state;
    state.amplitudes = d.matrix.col(col).cast<Complex>();
    return state;
}

}  // namespace sgcis
