#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace sgcis {

/// Compensated accumulator (Kahan with Neumaier's correction, so a small
/// term swamped by a large one survives); summation order fixed by the caller.
class KahanSum {
public:
    void add(double value) {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            compensation_ += (sum_ - t) + value;
        else
            compensation_ += (value - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1], Golub-Welsch construction.
QuadratureRule gauss_legendre(int n);

/// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre_on(int n, double a, double b);

/// Gauss-Hermite rule for weight exp(-x^2) on the real line.
QuadratureRule gauss_hermite(int n);

/// Average of g(x/a, z/a) over the beam density exp(-(x^2+z^2)/a^2)/(pi a^2),
/// in units of the beam size a. Tensor Gauss-Hermite with Kahan accumulation.
double beam_average(const std::function<double(double, double)>& g, int order);

}  // namespace sgcis
