#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial reference
// implementation built from a different route; tests check one against the
// other and bench/ times both.

#include <span>
#include <vector>

#include "rcmap/linalg.hpp"
#include "rcmap/spectral.hpp"

namespace rcmap::kernels {

/// Re W0+(w) for every w in `points`, integrating the monotone cubic
/// interpolant exactly per piece after subtracting the pole. Points on a
/// support edge with nonzero J give +-infinity. OpenMP over points.
std::vector<double> cauchy_real(const spectral::Tabulated& table, std::span<const double> points);

/// Reference: adaptive Gauss-Kronrod principal value on the interpolant, one
/// point at a time.
std::vector<double> cauchy_real_reference(const spectral::Tabulated& table,
                                          std::span<const double> points,
                                          double tolerance = 1e-12);

/// Dense D^2 x D^2 superoperator of `terms` acting on column-major vec(rho).
/// Assembled block by block, OpenMP over blocks.
Matrix assemble_superoperator(const GeneratorTerms& terms);

/// Reference: explicit Kronecker products, kron(B^T, A) per sandwich.
Matrix assemble_superoperator_reference(const GeneratorTerms& terms);

}  // namespace rcmap::kernels
