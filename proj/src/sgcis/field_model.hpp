#pragma once

#include <stdexcept>

#include "sgcis/spin_algebra.hpp"

namespace sgcis {

/// Raised where the local field magnitude is below the configured floor and
/// the frame angle beta is undefined.
class FieldZeroError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linearized magnet field: B_z = b0 - b1*z, B_x = b1*x (y-independent).
struct LinearSGField {
    double b0 = 1.0;  // tesla, field at the beam center
    double b1 = 0.0;  // tesla/meter, gradient magnitude

    static LinearSGField make(double b0, double b1);
};

struct FieldVector {
    double bx = 0.0;
    double bz = 0.0;
};

struct Force {
    double fx = 0.0;
    double fz = 0.0;
};

FieldVector field_at(const LinearSGField& f, double x, double z);

/// Angle between the local field and the lab z axis,
/// beta = atan2(b1*x, b0 - b1*z) in (-pi, pi].
/// Throws FieldZeroError when |B| < eps_abs (default 1e-12 * b0).
double beta_angle(const LinearSGField& f, double x, double z, double eps_abs = -1.0);

double field_magnitude(const LinearSGField& f, double x, double z);

/// Point (0, b0/b1) where the field vanishes; every branch deflection lies
/// on the ray through it. Requires b1 > 0.
struct Point2 {
    double x = 0.0;
    double z = 0.0;
};
Point2 convergence_point(const LinearSGField& f);

/// Classical force on a normalized spin state in the linear field:
/// fx = +mu0*b1*<I_x>, fz = -mu0*b1*<I_z>.  The sign is fixed so that a
/// state with positive projection along the local field deflects toward
/// -z when the field points along +z (force = +grad(mu.B) for H with -mu.B).
Force force_on_state(const LinearSGField& f, double mu0, const SpinState& state,
                     const SpinMatrices& ops);

}  // namespace sgcis
