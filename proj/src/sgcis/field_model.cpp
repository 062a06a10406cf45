#include "sgcis/field_model.hpp"

#include <cmath>
#include <string>

namespace sgcis {

LinearSGField LinearSGField::make(double b0, double b1) {
    if (!(b0 > 0.0))
        throw std::invalid_argument("field: b0 must be positive");
    if (!(b1 >= 0.0))
        throw std::invalid_argument("field: b1 must be non-negative");
    return LinearSGField{b0, b1};
}

FieldVector field_at(const LinearSGField& f, double x, double z) {
    return FieldVector{f.b1 * x, f.b0 - f.b1 * z};
}

double beta_angle(const LinearSGField& f, double x, double z, double eps_abs) {
    const FieldVector b = field_at(f, x, z);
    if (eps_abs < 0.0)
        eps_abs = 1e-12 * f.b0;
    if (std::hypot(b.bx, b.bz) < eps_abs)
        throw FieldZeroError("beta_angle: field magnitude below " + std::to_string(eps_abs) +
                             " tesla, frame angle undefined");
    return std::atan2(b.bx, b.bz);
}

double field_magnitude(const LinearSGField& f, double x, double z) {
    const FieldVector b = field_at(f, x, z);
    return std::hypot(b.bx, b.bz);
}

Point2 convergence_point(const LinearSGField& f) {
    if (!(f.b1 > 0.0))
        throw std::invalid_argument("convergence_point: undefined for b1 = 0");
    return Point2{0.0, f.b0 / f.b1};
}

Force force_on_state(const LinearSGField& f, double mu0, const SpinState& state,
                     const SpinMatrices& ops) {
    if (std::abs(state.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("force_on_state: state is not normalized");
    return Force{+mu0 * f.b1 * expectation(state, ops.ix),
                 -mu0 * f.b1 * expectation(state, ops.iz)};
}

}  // namespace sgcis
