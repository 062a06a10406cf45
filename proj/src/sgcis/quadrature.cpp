#include "sgcis/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace sgcis {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix of the
// orthogonal-polynomial recurrence, weights mu0 * (first eigenvector row)^2.
QuadratureRule golub_welsch(int n, const std::function<double(int)>& offdiag, double mu0) {
    if (n < 1)
        throw std::invalid_argument("quadrature: order must be >= 1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = offdiag(k);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("quadrature: Jacobi eigendecomposition failed");

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = solver.eigenvalues()[k];
        const double v0 = solver.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
    return golub_welsch(
        n, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0);
}

QuadratureRule gauss_legendre_on(int n, double a, double b) {
    QuadratureRule rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = mid + half * rule.nodes[k];
        rule.weights[k] *= half;
    }
    return rule;
}

QuadratureRule gauss_hermite(int n) {
    return golub_welsch(
        n, [](int k) { return std::sqrt(0.5 * k); }, std::sqrt(std::numbers::pi));
}

double beam_average(const std::function<double(double, double)>& g, int order) {
    const QuadratureRule rule = gauss_hermite(order);
    KahanSum sum;
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j)
            sum.add(rule.weights[i] * rule.weights[j] * g(rule.nodes[i], rule.nodes[j]));
    return sum.value() / std::numbers::pi;
}

}  // namespace sgcis
