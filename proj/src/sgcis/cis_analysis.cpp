#include "sgcis/cis_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "sgcis/quadrature.hpp"

namespace sgcis {

void EvolutionParams::validate() const {
    if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be positive");
    if (!(tf > t0)) throw std::invalid_argument("tf must exceed t0");
    if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
    if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be positive");
    if (b1 < 0.0) throw std::invalid_argument("b1 must be nonnegative");
}

double DeltaMatrix::max_offdiagonal() const {
    double worst = 0.0;
    for (int r = 0; r < matrix.rows(); ++r)
        for (int c = 0; c < matrix.cols(); ++c)
            if (r != c) worst = std::max(worst, std::abs(matrix(r, c)));
    return worst;
}

double DeltaMatrix::norm() const {
    return matrix.size() == 0 ? 0.0 : matrix.cwiseAbs().maxCoeff();
}

Vector free_propagator_diag(const EvolutionParams& p, Spin s, double t_a, double t_b) {
    const double dt = t_b - t_a;
    Vector out(s.dim());
    for (int k = 0; k < s.dim(); ++k)
        out[k] = std::polar(1.0, -p.omega0 * dt * 0.5 * s.twice_m_at(k));
    return out;
}

double delta_shape_factor(double theta) {
    return 2.0 - 2.0 * std::cos(theta) - theta * std::sin(theta);
}

namespace {

// Double time integral over t0 <= t' <= t <= tf of
// (t - t') U0(t0,t) X U0(t,t') X U0(t',t0), X in {Ix, Iz}, in units of the
// precession phase (s = omega0*(t-t0)), with n-node Gauss-Legendre per axis.
Matrix delta_double_integral(Spin s, double theta, int n) {
    const int dim = s.dim();
    const SpinMatrices ops = build_spin_matrices(s);

    Eigen::VectorXd mvals(dim);
    for (int k = 0; k < dim; ++k) mvals[k] = 0.5 * s.twice_m_at(k);

    // The Iz part of the kernel telescopes to diag(m^2): the three phase
    // factors around each diagonal operator multiply to unity.
    Matrix iz_part = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) iz_part(k, k) = mvals[k] * mvals[k];

    const QuadratureRule outer = gauss_legendre_on(n, 0.0, theta);
    const QuadratureRule base = gauss_legendre(n);

    Matrix v = Matrix::Zero(dim, dim);
    Vector left(dim), mid(dim), right(dim);
    for (int i = 0; i < n; ++i) {
        const double si = outer.nodes[i];
        const double wi = outer.weights[i];
        for (int k = 0; k < dim; ++k) left[k] = std::polar(1.0, si * mvals[k]);
        for (int j = 0; j < n; ++j) {
            const double sj = 0.5 * si * (base.nodes[j] + 1.0);
            const double wj = 0.5 * si * base.weights[j];
            for (int k = 0; k < dim; ++k) {
                mid[k] = std::polar(1.0, -(si - sj) * mvals[k]);
                right[k] = std::polar(1.0, -sj * mvals[k]);
            }
            Matrix ix_part = left.asDiagonal() *
                             (ops.ix * mid.asDiagonal() * ops.ix).eval() *
                             right.asDiagonal();
            v.noalias() += (wi * wj * (si - sj)) * (ix_part + iz_part);
        }
    }
    return v;
}

}  // namespace

DeltaMatrix delta_numeric(const EvolutionParams& p, Spin s, double rel_tol, int max_nodes) {
    p.validate();
    if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
    if (max_nodes < 16) throw std::invalid_argument("max_nodes must be at least 16");

    const double theta = p.theta();
    Matrix prev;
    Matrix cur;
    int nodes = 0;
    double achieved = 0.0;
    bool converged = false;
    for (int n = 16; n <= max_nodes; n *= 2) {
        cur = delta_double_integral(s, theta, n);
        nodes = n;
        if (prev.size() != 0) {
            const double diff = (cur - prev).cwiseAbs().maxCoeff();
            const double scale = std::max(cur.cwiseAbs().maxCoeff(), 1e-30);
            achieved = diff / scale;
            if (diff <= rel_tol * scale + 1e-15) {
                converged = true;
                break;
            }
        }
        prev = cur;
    }
    if (!converged)
        throw ConvergenceError("correction operator quadrature did not converge within max_nodes");

    DeltaMatrix out;
    out.s = s;
    out.theta = theta;
    out.matrix = Complex(0.0, 1.0) * (cur - cur.adjoint().eval());
    out.prefactor = (p.mu0 * p.b1) * (p.mu0 * p.b1) /
                    (2.0 * p.hbar * p.mass * p.omega0 * p.omega0 * p.omega0);
    out.nodes = nodes;
    out.achieved_tol = achieved;
    return out;
}

CISBasis find_cis(const DeltaMatrix& delta, Spin s, double beta) {
    const int dim = s.dim();
    if (delta.matrix.rows() != dim || delta.matrix.cols() != dim)
        throw std::invalid_argument("correction operator dimension does not match spin");

    const Matrix h = 0.5 * (delta.matrix + delta.matrix.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    const Eigen::VectorXd evals = es.eigenvalues();
    const Matrix evecs = es.eigenvectors();

    // Consecutive eigenvalues closer than deg_tol form one degenerate group.
    const double deg_tol = 1e-8 * std::max(1.0, evals.cwiseAbs().maxCoeff());
    std::vector<std::vector<int>> groups;
    for (int k = 0; k < dim; ++k) {
        if (k > 0 && evals[k] - evals[k - 1] <= deg_tol) {
            groups.back().push_back(k);
        } else {
            groups.push_back({k});
        }
    }

    // Each z' unit vector is matched to the group carrying most of its weight,
    // then projected into that eigenspace.
    std::vector<Vector> matched(dim);
    std::vector<std::vector<int>> assigned(groups.size());
    for (int a = 0; a < dim; ++a) {
        double best_weight = -1.0;
        std::size_t best_group = 0;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            double w = 0.0;
            for (int k : groups[g]) w += std::norm(evecs(a, k));
            if (w > best_weight) {
                best_weight = w;
                best_group = g;
            }
        }
        assigned[best_group].push_back(a);
        Vector proj = Vector::Zero(dim);
        for (int k : groups[best_group]) proj += evecs.col(k) * std::conj(evecs(a, k));
        matched[a] = proj;
    }

    // Gram-Schmidt within each group keeps the basis orthonormal when a
    // degenerate eigenspace received several targets.
    for (const auto& members : assigned) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            Vector& v = matched[members[i]];
            for (std::size_t j = 0; j < i; ++j) {
                const Vector& u = matched[members[j]];
                v -= u * u.dot(v);
            }
            const double nrm = v.norm();
            if (nrm < 1e-6)
                throw std::runtime_error(
                    "eigenspace matching collapsed; operator eigenvectors do not "
                    "track the rotated projection states");
            v /= nrm;
        }
    }

    const WignerSmallD d = wigner_small_d(s, beta);
    CISBasis basis;
    basis.beta = beta;
    basis.states.reserve(dim);
    basis.twice_m_labels.reserve(dim);
    for (int a = 0; a < dim; ++a) {
        Vector& v = matched[a];
        const Complex overlap = v[a];
        if (std::abs(overlap) < 0.999)
            throw std::runtime_error(
                "operator eigenvector overlap with rotated projection state below 0.999");
        v *= std::conj(overlap) / std::abs(overlap);
        SpinState lab;
        lab.amplitudes = d.matrix * v;
        basis.states.push_back(std::move(lab));
        basis.twice_m_labels.push_back(s.twice_m_at(a));
    }
    return basis;
}

Eigen::VectorXd decompose_lab_state(Spin s, int twice_m_lab, double beta) {
    const int col = s.index_of_twice_m(twice_m_lab);
    return wigner_small_d(s, beta).matrix.col(col);
}

Eigen::VectorXd branch_probabilities(Spin s, int twice_m_lab, double beta) {
    return decompose_lab_state(s, twice_m_lab, beta).cwiseAbs2();
}

Eigen::VectorXd branch_probabilities_from(const WignerSmallD& d, Spin s, int twice_m_lab) {
    const int col = s.index_of_twice_m(twice_m_lab);
    if (d.matrix.rows() != s.dim())
        throw std::invalid_argument("rotation matrix dimension does not match spin");
    return d.matrix.col(col).cwiseAbs2();
}

double small_angle_probability(Spin s, int twice_m_lab, int twice_m_branch, double beta) {
    s.index_of_twice_m(twice_m_lab);
    s.index_of_twice_m(twice_m_branch);
    const double casimir = s.value() * (s.value() + 1.0);
    const double m = 0.5 * twice_m_lab;
    const int dm = twice_m_branch - twice_m_lab;
    if (dm == 0) return 1.0 - 0.5 * (casimir - m * m) * beta * beta;
    if (dm == 2 || dm == -2) {
        const double mp = 0.5 * twice_m_branch;
        return 0.25 * (casimir - m * mp) * beta * beta;
    }
    return 0.0;
}

double error_probability_small_angle(Spin s, int twice_m_lab, double beta) {
    const double casimir = s.value() * (s.value() + 1.0);
    const double m = 0.5 * twice_m_lab;
    s.index_of_twice_m(twice_m_lab);
    return 0.5 * (casimir - m * m) * beta * beta;
}

double error_probability_exact(Spin s, int twice_m_lab, double beta) {
    const int idx = s.index_of_twice_m(twice_m_lab);
    return 1.0 - branch_probabilities(s, twice_m_lab, beta)[idx];
}

double mean_error_probability_closed_form(Spin s, int twice_m_lab, double ratio) {
    s.index_of_twice_m(twice_m_lab);
    if (ratio < 0.0) throw std::invalid_argument("ratio must be nonnegative");
    const double casimir = s.value() * (s.value() + 1.0);
    const double m = 0.5 * twice_m_lab;
    // <beta^2> over the beam = ratio^2 * <xi^2> = ratio^2 / 2.
    return 0.25 * (casimir - m * m) * ratio * ratio;
}

double mean_error_probability_exact(Spin s, int twice_m_lab, double ratio, int gh_order) {
    const int idx = s.index_of_twice_m(twice_m_lab);
    if (ratio < 0.0) throw std::invalid_argument("ratio must be nonnegative");
    const WignerEvaluator evaluator(s);
    auto integrand = [&](double xi, double zeta) {
        const double beta = std::atan2(ratio * xi, 1.0 - ratio * zeta);
        const WignerSmallD d = evaluator(beta);
        const double amp = d.matrix(idx, idx);
        return 1.0 - amp * amp;
    };
    return beam_average(integrand, gh_order);
}

}  // namespace sgcis
