#include "sgcis/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "sgcis/errors.hpp"
#include "sgcis/quadrature.hpp"

namespace sgcis {

void KinematicParams::validate() const {
    if (!(t0 < tf)) throw std::invalid_argument("tf must exceed t0");
    if (!(tf <= td)) throw std::invalid_argument("td must not precede tf");
    if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
    if (!(v_y > 0.0)) throw std::invalid_argument("v_y must be positive");
    if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be positive");
    if (!(field.b0 > 0.0)) throw std::invalid_argument("field b0 must be positive");
    if (field.b1 < 0.0) throw std::invalid_argument("field b1 must be nonnegative");
}

void ReducedParams::validate() const {
    if (b_over_a < 0.0) throw std::invalid_argument("b_over_a must be nonnegative");
    if (ratio < 0.0) throw std::invalid_argument("ratio must be nonnegative");
    if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
}

LinearSGField ReducedParams::unit_field() const {
    validate();
    LinearSGField f;
    f.b0 = 1.0;
    f.b1 = ratio / a;
    return f;
}

double deflection_scale(const KinematicParams& k) {
    k.validate();
    return k.mu0 * k.field.b1 * (k.tf - k.t0) * (2.0 * k.td - k.tf - k.t0) / (2.0 * k.mass);
}

TrajectorySolution analytic_trajectory(const KinematicParams& k, Spin s, double x0, double z0,
                                       int twice_m_branch) {
    k.validate();
    s.index_of_twice_m(twice_m_branch);
    const double beta = beta_angle(k.field, x0, z0);
    const double mprime = 0.5 * twice_m_branch;

    const double fx = k.mu0 * k.field.b1 * mprime * std::sin(beta);
    const double fz = -k.mu0 * k.field.b1 * mprime * std::cos(beta);
    const double ax = fx / k.mass;
    const double az = fz / k.mass;
    const double tmag = k.tf - k.t0;
    const double tdrift = k.td - k.tf;

    TrajectorySolution sol;
    sol.branch_twice_m = twice_m_branch;
    sol.initial = {x0, z0};
    sol.beta = beta;
    sol.at_exit.x = x0 + 0.5 * ax * tmag * tmag;
    sol.at_exit.z = z0 + 0.5 * az * tmag * tmag;
    sol.at_exit.vx = ax * tmag;
    sol.at_exit.vz = az * tmag;
    sol.at_detector.x = sol.at_exit.x + sol.at_exit.vx * tdrift;
    sol.at_detector.z = sol.at_exit.z + sol.at_exit.vz * tdrift;

    const QuadratureRule rule = gauss_legendre_on(64, k.t0, k.tf);
    KahanSum field_integral;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double tau = rule.nodes[i] - k.t0;
        const double xs = x0 + 0.5 * ax * tau * tau;
        const double zs = z0 + 0.5 * az * tau * tau;
        field_integral.add(rule.weights[i] * field_magnitude(k.field, xs, zs));
    }
    const double phase = k.mu0 * mprime / k.hbar * field_integral.value();

    const WignerSmallD d = wigner_small_d(s, beta);
    SpinState cis = rotated_eigenstate(d, s, twice_m_branch);
    sol.spinor_final.amplitudes = std::polar(1.0, phase) * cis.amplitudes;
    return sol;
}

TrajectorySolution analytic_trajectory(const ReducedParams& r, Spin s, double x0, double z0,
                                       int twice_m_branch) {
    r.validate();
    s.index_of_twice_m(twice_m_branch);
    const LinearSGField field = r.unit_field();
    const double beta = beta_angle(field, x0, z0);
    const double mprime = 0.5 * twice_m_branch;
    const double b = r.b_over_a * r.a;

    TrajectorySolution sol;
    sol.branch_twice_m = twice_m_branch;
    sol.initial = {x0, z0};
    sol.beta = beta;
    sol.at_detector.x = x0 + b * mprime * std::sin(beta);
    sol.at_detector.z = z0 - b * mprime * std::cos(beta);
    sol.at_exit.x = sol.at_detector.x;
    sol.at_exit.z = sol.at_detector.z;
    sol.at_exit.vx = 2.0 * (sol.at_detector.x - x0);
    sol.at_exit.vz = 2.0 * (sol.at_detector.z - z0);
    sol.spinor_final = rotated_eigenstate(wigner_small_d(s, beta), s, twice_m_branch);
    return sol;
}

namespace {

struct PhaseSpace {
    double x, z, vx, vz;
    Vector chi;
};

PhaseSpace axpy(const PhaseSpace& base, double h, const PhaseSpace& slope) {
    return {base.x + h * slope.x, base.z + h * slope.z, base.vx + h * slope.vx,
            base.vz + h * slope.vz, base.chi + h * slope.chi};
}

}  // namespace

TrajectorySolution integrate_trajectory(const KinematicParams& k, Spin s, double x0, double z0,
                                        const SpinState& initial_spinor, double dt) {
    k.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (initial_spinor.dim() != s.dim())
        throw std::invalid_argument("spinor dimension does not match spin");
    if (std::abs(initial_spinor.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("initial spinor must be normalized");

    const SpinMatrices ops = build_spin_matrices(s);
    const Complex ic(0.0, k.mu0 / k.hbar);

    // Expectations here use the raw quadratic form: Runge-Kutta stage states
    // sit slightly off the unit sphere and must not be gated on norm.
    auto derivative = [&](const PhaseSpace& st) -> PhaseSpace {
        const FieldVector bv = field_at(k.field, st.x, st.z);
        const double ex = st.chi.dot(ops.ix * st.chi).real();
        const double ez = st.chi.dot(ops.iz * st.chi).real();
        PhaseSpace d;
        d.x = st.vx;
        d.z = st.vz;
        d.vx = k.mu0 * k.field.b1 * ex / k.mass;
        d.vz = -k.mu0 * k.field.b1 * ez / k.mass;
        d.chi = ic * (bv.bx * (ops.ix * st.chi) + bv.bz * (ops.iz * st.chi));
        return d;
    };

    const double span = k.tf - k.t0;
    const long n_steps = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-12)));
    const double h = span / static_cast<double>(n_steps);

    PhaseSpace st{x0, z0, 0.0, 0.0, initial_spinor.amplitudes};
    for (long step = 0; step < n_steps; ++step) {
        const PhaseSpace k1 = derivative(st);
        const PhaseSpace k2 = derivative(axpy(st, 0.5 * h, k1));
        const PhaseSpace k3 = derivative(axpy(st, 0.5 * h, k2));
        const PhaseSpace k4 = derivative(axpy(st, h, k3));
        st.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        st.z += h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
        st.vx += h / 6.0 * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx);
        st.vz += h / 6.0 * (k1.vz + 2.0 * k2.vz + 2.0 * k3.vz + k4.vz);
        st.chi += h / 6.0 * (k1.chi + 2.0 * k2.chi + 2.0 * k3.chi + k4.chi);
        if (std::abs(st.chi.norm() - 1.0) > 1e-8)
            throw ConvergenceError("spinor norm drift exceeded 1e-8; reduce dt");
    }

    TrajectorySolution sol;
    sol.branch_twice_m = 0;
    sol.initial = {x0, z0};
    sol.beta = beta_angle(k.field, x0, z0);
    sol.at_exit = {st.x, st.z, st.vx, st.vz};
    const double tdrift = k.td - k.tf;
    sol.at_detector.x = st.x + st.vx * tdrift;
    sol.at_detector.z = st.z + st.vz * tdrift;
    sol.spinor_final.amplitudes = std::move(st.chi);
    return sol;
}

double default_time_step(const KinematicParams& k) {
    k.validate();
    return 0.05 / k.omega0();
}

}  // namespace sgcis
