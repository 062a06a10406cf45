#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "sgcis/errors.hpp"
#include "sgcis/trajectory.hpp"

using namespace sgcis;
using doctest::Approx;

namespace {

KinematicParams reference_kinematics() {
    KinematicParams k;
    k.mass = 1.0;
    k.mu0 = 1.0;
    k.v_y = 1.0;
    k.t0 = 0.0;
    k.tf = 2.0;
    k.td = 3.0;
    k.field = LinearSGField::make(1.0, 0.25);
    k.hbar = 1.0;
    return k;
}

double transverse_energy(const KinematicParams& k, double x, double z, double vx, double vz,
                         double mprime) {
    const double kinetic = 0.5 * k.mass * (vx * vx + vz * vz);
    return kinetic - k.mu0 * mprime * field_magnitude(k.field, x, z);
}

}  // namespace

TEST_CASE("kinematic parameters validate their physical ranges") {
    CHECK_NOTHROW(reference_kinematics().validate());

    KinematicParams k = reference_kinematics();
    k.tf = k.t0;
    CHECK_THROWS_AS(k.validate(), std::invalid_argument);

    k = reference_kinematics();
    k.td = k.tf - 0.5;
    CHECK_THROWS_AS(k.validate(), std::invalid_argument);

    k = reference_kinematics();
    k.mass = 0.0;
    CHECK_THROWS_AS(k.validate(), std::invalid_argument);

    k = reference_kinematics();
    k.v_y = -1.0;
    CHECK_THROWS_AS(k.validate(), std::invalid_argument);

    k = reference_kinematics();
    k.field.b0 = 0.0;
    CHECK_THROWS_AS(k.validate(), std::invalid_argument);
}

TEST_CASE("reduced parameters validate their physical ranges") {
    CHECK_NOTHROW(ReducedParams{4.0, 0.25, 1.0}.validate());
    CHECK_THROWS_AS((ReducedParams{-1.0, 0.25, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((ReducedParams{4.0, -0.25, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((ReducedParams{4.0, 0.25, 0.0}).validate(), std::invalid_argument);

    const LinearSGField f = ReducedParams{4.0, 0.25, 2.0}.unit_field();
    CHECK(f.b0 == Approx(1.0).margin(0.0));
    CHECK(f.b1 == Approx(0.125).margin(1e-15));
}

TEST_CASE("the deflection scale combines gradient, pulse length, and drift") {
    KinematicParams k = reference_kinematics();
    CHECK(deflection_scale(k) == Approx(1.0).margin(1e-15));

    k.mass = 4.0;
    k.mu0 = 2.0;
    k.field.b1 = 0.5;
    k.t0 = 1.0;
    k.tf = 4.0;
    k.td = 6.0;
    CHECK(deflection_scale(k) == Approx(2.0 * 0.5 * 3.0 * 7.0 / 8.0).margin(1e-12));
}

TEST_CASE("a reduced branch lands at the launch point plus the radial deflection") {
    const Spin s = Spin::from_twice(2);
    const ReducedParams r{4.0, 0.25, 1.0};
    const double beta = std::atan(0.25);
    const double sb = std::sin(beta);
    const double cb = std::cos(beta);

    const TrajectorySolution up = analytic_trajectory(r, s, 1.0, 0.0, 2);
    CHECK(up.beta == Approx(beta).margin(1e-15));
    CHECK(up.at_detector.x == Approx(1.0 + 4.0 * sb).margin(1e-12));
    CHECK(up.at_detector.z == Approx(-4.0 * cb).margin(1e-12));
    CHECK(up.at_exit.vx == Approx(2.0 * (up.at_detector.x - 1.0)).margin(1e-12));
    CHECK(up.spinor_final.norm() == Approx(1.0).margin(1e-12));

    const TrajectorySolution middle = analytic_trajectory(r, s, 1.0, 0.0, 0);
    CHECK(middle.at_detector.x == Approx(1.0).margin(0.0));
    CHECK(middle.at_detector.z == Approx(0.0).margin(0.0));

    const TrajectorySolution down = analytic_trajectory(r, s, 1.0, 0.0, -2);
    CHECK(down.at_detector.x == Approx(1.0 - 4.0 * sb).margin(1e-12));
    CHECK(down.at_detector.z == Approx(4.0 * cb).margin(1e-12));
}

TEST_CASE("reduced trajectories scale with the beam size at fixed dimensionless knobs") {
    const Spin s = Spin::from_twice(2);
    const TrajectorySolution unit = analytic_trajectory(ReducedParams{4.0, 0.25, 1.0}, s, 1.0,
                                                        -0.5, 2);
    const TrajectorySolution doubled = analytic_trajectory(ReducedParams{4.0, 0.25, 2.0}, s, 2.0,
                                                           -1.0, 2);
    CHECK(doubled.beta == Approx(unit.beta).margin(1e-14));
    CHECK(doubled.at_detector.x == Approx(2.0 * unit.at_detector.x).margin(1e-12));
    CHECK(doubled.at_detector.z == Approx(2.0 * unit.at_detector.z).margin(1e-12));
}

TEST_CASE("a kinematic branch follows the uniformly accelerated closed form") {
    const Spin s = Spin::from_twice(2);
    const KinematicParams k = reference_kinematics();
    const double beta = std::atan(0.25);
    const double acc = k.mu0 * k.field.b1 / k.mass;

    const TrajectorySolution sol = analytic_trajectory(k, s, 1.0, 0.0, 2);
    CHECK(sol.beta == Approx(beta).margin(1e-15));
    CHECK(sol.at_exit.x == Approx(1.0 + 0.5 * acc * 4.0 * std::sin(beta)).margin(1e-13));
    CHECK(sol.at_exit.z == Approx(-0.5 * acc * 4.0 * std::cos(beta)).margin(1e-13));
    CHECK(sol.at_exit.vx == Approx(acc * 2.0 * std::sin(beta)).margin(1e-13));
    CHECK(sol.at_exit.vz == Approx(-acc * 2.0 * std::cos(beta)).margin(1e-13));
    CHECK(sol.at_detector.x ==
          Approx(1.0 + deflection_scale(k) * std::sin(beta)).margin(1e-12));
    CHECK(sol.at_detector.z ==
          Approx(-deflection_scale(k) * std::cos(beta)).margin(1e-12));
    CHECK_THROWS_AS(analytic_trajectory(k, s, 1.0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("the frame angle is unchanged between launch and detector") {
    const Spin s = Spin::from_twice(2);
    const KinematicParams k = reference_kinematics();
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const double x0 = coord(gen);
        const double z0 = coord(gen);
        for (const int twice_m : {2, 0, -2}) {
            const TrajectorySolution sol = analytic_trajectory(k, s, x0, z0, twice_m);
            CHECK(beta_angle(k.field, sol.at_detector.x, sol.at_detector.z) ==
                  Approx(sol.beta).margin(1e-12));
        }
    }
}

TEST_CASE("deflections lie on the line through the launch point and the field zero") {
    const Spin s = Spin::from_twice(2);
    const KinematicParams k = reference_kinematics();
    const Point2 c = convergence_point(k.field);
    std::mt19937_64 gen(59);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::uniform_int_distribution<int> pick(0, 2);
    const int branches[3] = {2, 0, -2};
    int checked = 0;
    while (checked < 1000) {
        const double x0 = coord(gen);
        const double z0 = coord(gen);
        if (field_magnitude(k.field, x0, z0) < 0.05) continue;
        const int twice_m = branches[pick(gen)];
        const TrajectorySolution sol = analytic_trajectory(k, s, x0, z0, twice_m);
        const double dx = sol.at_detector.x - x0;
        const double dz = sol.at_detector.z - z0;
        const double rx = c.x - x0;
        const double rz = c.z - z0;
        const double r_norm = std::hypot(rx, rz);
        if (twice_m == 0) {
            CHECK(std::hypot(dx, dz) == Approx(0.0).margin(0.0));
        } else {
            const double cross = (dx * rz - dz * rx) / (std::hypot(dx, dz) * r_norm);
            const double along = dx * rx + dz * rz;
            CHECK(std::abs(cross) < 1e-10);
            // Positive projections run away from the field zero, negative toward it.
            CHECK(along * twice_m < 0.0);
        }
        ++checked;
    }
}

TEST_CASE("the integrator reproduces the closed form detector points") {
    const Spin s = Spin::from_twice(2);
    const KinematicParams k = reference_kinematics();
    const double b = deflection_scale(k);
    const double dt = 0.01;
    for (const double x0 : {-1.0, 1.0})
        for (const double z0 : {-1.0, 0.5})
            for (const int twice_m : {2, 0, -2}) {
                const TrajectorySolution exact = analytic_trajectory(k, s, x0, z0, twice_m);
                const SpinState cis =
                    rotated_eigenstate(wigner_small_d(s, exact.beta), s, twice_m);
                const TrajectorySolution ode = integrate_trajectory(k, s, x0, z0, cis, dt);
                const double err = std::hypot(ode.at_detector.x - exact.at_detector.x,
                                              ode.at_detector.z - exact.at_detector.z);
                CHECK(err < 1e-8 * b);
                CHECK(std::abs(ode.spinor_final.norm() - 1.0) < 1e-8);

                const Complex overlap =
                    ode.spinor_final.amplitudes.dot(exact.spinor_final.amplitudes);
                CHECK(std::abs(overlap - 1.0) < 1e-6);
            }
}

TEST_CASE("the integrator converges at fourth order in the step size") {
    const Spin s = Spin::from_twice(2);
    KinematicParams k = reference_kinematics();
    k.field = LinearSGField::make(1.0, 0.0);
    k.td = k.tf;

    SpinState initial;
    initial.amplitudes = Vector::Constant(3, Complex(1.0 / std::sqrt(3.0), 0.0));

    // Uniform field: each component advances by a pure phase omega0 * t * m.
    auto exact_final = [&]() {
        Vector out(3);
        const double angle = k.omega0() * (k.tf - k.t0);
        out[0] = std::polar(1.0 / std::sqrt(3.0), angle);
        out[1] = Complex(1.0 / std::sqrt(3.0), 0.0);
        out[2] = std::polar(1.0 / std::sqrt(3.0), -angle);
        return out;
    }();

    auto spinor_error = [&](double dt) {
        const TrajectorySolution sol = integrate_trajectory(k, s, 0.3, -0.2, initial, dt);
        return (sol.spinor_final.amplitudes - exact_final).norm();
    };

    const double coarse = spinor_error(0.04);
    const double fine = spinor_error(0.02);
    REQUIRE(coarse > 1e-12);
    const double order_ratio = coarse / fine;
    CHECK(order_ratio > 12.0);
    CHECK(order_ratio < 20.0);
}

TEST_CASE("transverse energy is conserved along both solution paths") {
    const Spin s = Spin::from_twice(2);
    const KinematicParams k = reference_kinematics();
    const double scale = k.mu0 * k.field.b0;
    for (const int twice_m : {2, -2}) {
        const double mprime = 0.5 * twice_m;
        const TrajectorySolution exact = analytic_trajectory(k, s, 1.0, 0.0, twice_m);
        const double e0 = transverse_energy(k, 1.0, 0.0, 0.0, 0.0, mprime);
        const double e_exit = transverse_energy(k, exact.at_exit.x, exact.at_exit.z,
                                                exact.at_exit.vx, exact.at_exit.vz, mprime);
        CHECK(std::abs(e_exit - e0) < 1e-12 * scale);

        const SpinState cis = rotated_eigenstate(wigner_small_d(s, exact.beta), s, twice_m);
        const TrajectorySolution ode = integrate_trajectory(k, s, 1.0, 0.0, cis, 0.01);
        const double e_ode = transverse_energy(k, ode.at_exit.x, ode.at_exit.z, ode.at_exit.vx,
                                               ode.at_exit.vz, mprime);
        CHECK(std::abs(e_ode - e0) < 1e-8 * scale);
    }
}

TEST_CASE("the integrator rejects bad inputs and flags norm drift") {
    const Spin s = Spin::from_twice(2);
    const KinematicParams k = reference_kinematics();
    const SpinState cis = rotated_eigenstate(wigner_small_d(s, 0.1), s, 2);

    CHECK_THROWS_AS(integrate_trajectory(k, s, 0.0, 0.0, cis, 0.0), std::invalid_argument);

    SpinState short_state;
    short_state.amplitudes = Vector::Zero(2);
    short_state.amplitudes[0] = 1.0;
    CHECK_THROWS_AS(integrate_trajectory(k, s, 0.0, 0.0, short_state, 0.01),
                    std::invalid_argument);

    SpinState unnormalized;
    unnormalized.amplitudes = Vector::Zero(3);
    unnormalized.amplitudes[0] = 0.7;
    CHECK_THROWS_AS(integrate_trajectory(k, s, 0.0, 0.0, unnormalized, 0.01),
                    std::invalid_argument);

    CHECK_THROWS_AS(integrate_trajectory(k, s, 1.0, 0.0, cis, 0.5), ConvergenceError);
}

TEST_CASE("the default step size resolves the precession frequency") {
    KinematicParams k = reference_kinematics();
    k.mu0 = 3.0;
    k.field.b0 = 2.0;
    k.hbar = 1.5;
    CHECK(k.omega0() == Approx(4.0).margin(1e-15));
    CHECK(default_time_step(k) == Approx(0.05 / 4.0).margin(1e-15));
}
