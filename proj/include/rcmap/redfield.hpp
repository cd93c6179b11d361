#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rcmap/fock.hpp"
#include "rcmap/linalg.hpp"

namespace rcmap::redfield {

/// Eigensystem of the impurity Hamiltonian, H = V diag(E) V^dag.
struct EigenFrame {
  Eigen::VectorXd energies;
  Matrix vectors;

  double bohr(Eigen::Index k, Eigen::Index l) const { return energies(k) - energies(l); }
  /// Largest |E_k|, used to scale degeneracy tolerances.
  double scale() const;

  Matrix to_eigen(const Matrix& op) const { return vectors.adjoint() * op * vectors; }
  Matrix from_eigen(const Matrix& op) const { return vectors * op * vectors.adjoint(); }
};

EigenFrame diagonalize(const Matrix& hamiltonian);

/// 1 / (exp(beta (w - mu)) + 1) without overflow.
double fermi(double beta, double mu, double w);

struct GeneratorFlags {
  bool lamb_shift = false;
  bool secular = false;
};

/// Part of a coupling operator whose eigenbasis elements d_kl all share one
/// Bohr frequency w_lk (up to the degeneracy tolerance), together with the
/// matching parts of chi and theta.
struct FrequencyComponent {
  double frequency;
  Matrix coupling;
  Matrix chi;
  Matrix theta;
};

struct ReservoirPiece {
  std::size_t attachment;
  fock::Reservoir reservoir;
  Matrix coupling;
  Matrix chi;
  Matrix theta;
  std::vector<FrequencyComponent> components;
};

struct DissipatorPieces {
  EigenFrame frame;
  std::vector<ReservoirPiece> reservoirs;
  GeneratorFlags flags;
};

/// chi = sum_kl J(w_lk)/2 f(w_lk) d_kl |k><l|, theta the same with 1 - f,
/// built in the eigenbasis and rotated back. With `lamb_shift` each
/// coefficient also receives -(i/2pi) PV int J(w) f(w) / (w - w_lk) dw
/// (and the 1 - f analogue for theta).
std::pair<Matrix, Matrix> build_chi_theta(const EigenFrame& frame, const Matrix& coupling,
                                          const fock::Reservoir& reservoir, bool lamb_shift = false,
                                          double tolerance = 1e-10);

/// Degeneracy tolerance for grouping Bohr frequencies: 1e-9 * ||H||.
double degeneracy_tolerance(const EigenFrame& frame);

/// Pieces of every attachment of `model` without Lamb shift or secular
/// approximation.
DissipatorPieces build_pieces(const fock::ImpurityModel& model);
DissipatorPieces build_pieces(const fock::ImpurityModel& model, const EigenFrame& frame);

/// Recomputes chi/theta with or without the principal-value terms and
/// records whether the generator is to be taken secular.
DissipatorPieces apply_variant(DissipatorPieces pieces, GeneratorFlags flags);

/// Generator terms of one reservoir:
///   [chi^dag rho, d] + [d^dag, rho chi] + [theta rho, d^dag] + [d, rho theta^dag],
/// summed over frequency components separately when `secular` is set.
GeneratorTerms dissipator_terms(const ReservoirPiece& piece, bool secular);

/// -i[H, rho]
GeneratorTerms hamiltonian_terms(const Matrix& hamiltonian);

class Liouvillian {
 public:
  Liouvillian(const fock::ImpurityModel& model, DissipatorPieces pieces);

  Eigen::Index dimension() const { return hamiltonian_.dimension(); }
  std::size_t reservoirs() const { return dissipators_.size(); }
  const std::string& label(std::size_t nu) const { return labels_[nu]; }
  const GeneratorFlags& flags() const { return pieces_.flags; }
  const DissipatorPieces& pieces() const { return pieces_; }

  /// Dense superoperator on column-major vec(rho).
  const Matrix& superoperator() const { return superoperator_; }
  Matrix piece_superoperator(std::size_t nu) const;

  Matrix apply(const Matrix& rho) const;
  /// L_nu rho for reservoir nu alone.
  Matrix apply_piece(std::size_t nu, const Matrix& rho) const;

  const GeneratorTerms& hamiltonian_terms() const { return hamiltonian_; }
  const GeneratorTerms& piece_terms(std::size_t nu) const { return dissipators_[nu]; }

 private:
  DissipatorPieces pieces_;
  GeneratorTerms hamiltonian_;
  std::vector<GeneratorTerms> dissipators_;
  std::vector<std::string> labels_;
  Matrix superoperator_;
};

Liouvillian build_liouvillian(const fock::ImpurityModel& model, GeneratorFlags flags = {});

}  // namespace rcmap::redfield
