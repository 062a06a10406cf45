#pragma once

#include "sgcis/field_model.hpp"
#include "sgcis/spin_algebra.hpp"

namespace sgcis {

/// Physical (SI) description of one pass through the magnet: field on during
/// [t0, tf], free drift until detection at td.  v_y is the inertial beam
/// velocity; magnet length = (tf - t0) * v_y.  hbar defaults to 1 for
/// reduced-unit runs and can be set to constants::hbar for SI inputs.
struct KinematicParams {
    double mass = 1.0;   // kg
    double mu0 = 1.0;    // J/T
    double v_y = 1.0;    // m/s
    double t0 = 0.0;     // s
    double tf = 1.0;     // s
    double td = 1.0;     // s
    LinearSGField field;
    double hbar = 1.0;   // J s

    void validate() const;
    double omega0() const { return mu0 * field.b0 / hbar; }
};

/// Dimensionless description sufficient for the beam geometry: lengths in
/// units of the beam size a, deflections via b/a, field shape via
/// ratio = a*B1/B0.  b/a and ratio are independent knobs so the B1 -> 0
/// limit can be taken at fixed deflection.
struct ReducedParams {
    double b_over_a = 0.0;
    double ratio = 0.0;
    double a = 1.0;  // meters

    void validate() const;
    /// Field with B0 = 1 reproducing beta(x, z) for x, z in meters.
    LinearSGField unit_field() const;
};

struct ExitState {
    double x = 0.0;
    double z = 0.0;
    double vx = 0.0;
    double vz = 0.0;
};

struct TrajectorySolution {
    int branch_twice_m = 0;
    Point2 initial{};
    ExitState at_exit{};
    Point2 at_detector{};
    double beta = 0.0;  // frame angle at the launch point
    SpinState spinor_final;
};

/// Detector-plane separation between adjacent branches at beta = 0:
/// b = mu0*B1*(tf-t0)*(2*td-tf-t0)/(2*mass).
double deflection_scale(const KinematicParams& k);

/// Closed-form uniformly accelerated branch trajectory.  The frame angle is
/// evaluated once at the launch point and held constant, so the force is
/// constant with magnitude mu0*B1*|m'| directed radially through the field
/// zero.  Final spinor is the branch CIS times the accumulated dynamical
/// phase (integral of mu0*m'*|B|/hbar along the path, fixed-order
/// Gauss-Legendre; no phase accumulates during the field-free drift).
TrajectorySolution analytic_trajectory(const KinematicParams& k, Spin s, double x0, double z0,
                                       int twice_m_branch);

/// Reduced-unit variant.  Exit is reported at the detector (td = tf
/// convention) with velocities for a unit traversal time; the final spinor
/// carries no dynamical phase, the reduced form having no time scale.
TrajectorySolution analytic_trajectory(const ReducedParams& r, Spin s, double x0, double z0,
                                       int twice_m_branch);

/// Fourth-order Runge-Kutta co-integration of position, velocity, and the
/// spinor under dchi/dt = +(i/hbar)*mu0*(B(r)*I)*chi, force from the
/// instantaneous spin expectations, then free drift to td.  The spinor is
/// never renormalized; norm drift beyond 1e-8 aborts with ConvergenceError
/// as the step-size rejection signal.  branch_twice_m is left at 0: the
/// integrator tracks a state, not a labeled branch.
TrajectorySolution integrate_trajectory(const KinematicParams& k, Spin s, double x0, double z0,
                                        const SpinState& initial_spinor, double dt);

/// Step size resolving the fastest scale: omega0 * dt = 0.05.
double default_time_step(const KinematicParams& k);

}  // namespace sgcis
