#include "rcmap/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rcmap/error.hpp"
#include "rcmap/quadrature.hpp"

namespace rcmap::kernels {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// PV int over piece i of p_i(t) / (t - x). Near the piece, splitting off
// p_i(x) leaves a quadratic, which 8-point Gauss-Legendre integrates exactly,
// plus a log. Far away the plain rule is accurate and avoids extrapolating
// the cubic.
double piece_integral(const spectral::Tabulated& table, std::size_t i, double x) {
  const double a = table.omega()[i];
  const double b = table.omega()[i + 1];
  const auto nodes = quadrature::legendre_nodes(8);
  const auto weights = quadrature::legendre_weights(8);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const bool near = std::abs(x - mid) < 8.0 * half;
  const double px = near ? table.eval_piece(i, x) : 0.0;
  double sum = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double t = mid + half * nodes[q];
    sum += weights[q] * (table.eval_piece(i, t) - px) / (t - x);
  }
  sum *= half;
  // On a node the coefficient vanishes by continuity.
  if (near && x != a && x != b) sum += px * std::log(std::abs((b - x) / (a - x)));
  return sum;
}

double cauchy_real_at(const spectral::Tabulated& table, double x) {
  const double jx = table(x);
  if ((x == table.lower() || x == table.upper()) && jx > 0.0) return x == table.lower() ? kInf : -kInf;
  double sum = 0.0;
  for (std::size_t i = 0; i < table.pieces(); ++i) sum += piece_integral(table, i, x);
  return sum / kPi;
}

}  // namespace

std::vector<double> cauchy_real(const spectral::Tabulated& table, std::span<const double> points) {
  std::vector<double> out(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static) if (n > 16)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = cauchy_real_at(table, points[static_cast<std::size_t>(k)]);
  }
  return out;
}

std::vector<double> cauchy_real_reference(const spectral::Tabulated& table,
                                          std::span<const double> points, double tolerance) {
  std::vector<double> out;
  out.reserve(points.size());
  const std::function<double(double)> f = [&](double t) { return table(t); };
  for (double x : points) {
    const double jx = table(x);
    if ((x == table.lower() || x == table.upper()) && jx > 0.0) {
      out.push_back(x == table.lower() ? kInf : -kInf);
      continue;
    }
    const auto r = quadrature::principal_value(f, table.lower(), table.upper(), x, tolerance);
    if (!r.converged) throw QuadratureError("reference Cauchy quadrature did not converge", r.value, r.error);
    out.push_back(r.value / kPi);
  }
  return out;
}

Matrix assemble_superoperator(const GeneratorTerms& terms) {
  const Eigen::Index d = terms.dimension();
  const Eigen::Index n = d * d;
  Matrix out = Matrix::Zero(n, n);

  // Block (j, b) maps column b of rho into column j of the result:
  //   delta_jb * left + right(b, j) * I + sum_s B_s(b, j) * A_s.
#pragma omp parallel for collapse(2) schedule(static) if (d > 4)
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index b = 0; b < d; ++b) {
      auto block = out.block(j * d, b * d, d, d);
      if (j == b) block += terms.left;
      const Complex r = terms.right(b, j);
      if (r != Complex{}) block.diagonal().array() += r;
      for (const auto& s : terms.sandwiches) {
        const Complex coef = s.right(b, j);
        if (coef != Complex{}) block += coef * s.left;
      }
    }
  }
  return out;
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

Matrix assemble_superoperator_reference(const GeneratorTerms& terms) {
  const Eigen::Index d = terms.dimension();
  const Matrix id = Matrix::Identity(d, d);
  Matrix out = kron(id, terms.left) + kron(terms.right.transpose(), id);
  for (const auto& s : terms.sandwiches) out += kron(s.right.transpose(), s.left);
  return out;
}

}  // namespace rcmap::kernels
