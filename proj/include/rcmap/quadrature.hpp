#pragma once

#include <functional>
#include <span>

namespace rcmap::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

using Integrand = std::function<double(double)>;

/// Adaptive 15-point Gauss-Kronrod over [a, b], split at any breakpoints that
/// fall strictly inside the interval. `tolerance` is relative to the L1 norm
/// of the integrand.
Result integrate(const Integrand& f, double a, double b, double tolerance,
                 std::span<const double> breakpoints = {});

/// Cauchy principal value of  PV int_a^b f(x) / (x - pole) dx.
///
/// The singular part is removed by subtraction,
///   int_a^b [f(x) - f(pole)] / (x - pole) dx + f(pole) log((b - pole) / (pole - a)),
/// and the regular remainder is integrated adaptively on both sides of the
/// pole. Poles outside (a, b) fall back to a plain integral.
Result principal_value(const Integrand& f, double a, double b, double pole,
                       double tolerance);

/// Fixed n-point Gauss-Legendre nodes/weights on [-1, 1] (n = 4 or 8).
std::span<const double> legendre_nodes(int n);
std::span<const double> legendre_weights(int n);

}  // namespace rcmap::quadrature
