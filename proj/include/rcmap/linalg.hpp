#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace rcmap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// A linear map on density matrices written as
///   rho -> left * rho + rho * right + sum_s A_s * rho * B_s.
/// Every generator in this library (Hamiltonian part, dissipators, their
/// secular variants) is stored in this form.
struct GeneratorTerms {
  struct Sandwich {
    Matrix left;
    Matrix right;
  };

  Matrix left;
  Matrix right;
  std::vector<Sandwich> sandwiches;

  explicit GeneratorTerms(Eigen::Index dim = 0)
      : left(Matrix::Zero(dim, dim)), right(Matrix::Zero(dim, dim)) {}

  Eigen::Index dimension() const { return left.rows(); }

  Matrix apply(const Matrix& rho) const {
    Matrix out = left * rho + rho * right;
    for (const auto& s : sandwiches) out.noalias() += s.left * rho * s.right;
    return out;
  }

  GeneratorTerms& operator+=(const GeneratorTerms& other) {
    left += other.left;
    right += other.right;
    sandwiches.insert(sandwiches.end(), other.sandwiches.begin(), other.sandwiches.end());
    return *this;
  }
};

/// Column-major vectorization index of rho(row, col).
inline Eigen::Index vec_index(Eigen::Index row, Eigen::Index col, Eigen::Index dim) {
  return row + col * dim;
}

}  // namespace rcmap
