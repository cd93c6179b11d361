#include "rcmap/redfield.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <gsl/gsl_sf_psi.h>

#include "rcmap/error.hpp"
#include "rcmap/kernels.hpp"
#include "rcmap/quadrature.hpp"

namespace rcmap::redfield {

double EigenFrame::scale() const { return energies.size() == 0 ? 0.0 : energies.cwiseAbs().maxCoeff(); }

EigenFrame diagonalize(const Matrix& hamiltonian) {
  if (hamiltonian.rows() != hamiltonian.cols()) throw Error("Hamiltonian must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian);
  if (solver.info() != Eigen::Success) throw Error("Hamiltonian diagonalization failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double fermi(double beta, double mu, double w) {
  const double x = beta * (w - mu);
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double degeneracy_tolerance(const EigenFrame& frame) {
  return std::max(1e-9 * frame.scale(), 1e-14);
}

namespace {

struct Coefficients {
  Complex chi;
  Complex theta;
};

// Transition coefficients at Bohr frequency w, cached per distinct w.
class CoefficientTable {
 public:
  CoefficientTable(const fock::Reservoir& r, bool lamb_shift, double tolerance)
      : res_(r), lamb_(lamb_shift), tol_(tolerance) {}

  Coefficients at(double w) {
    if (auto it = cache_.find(w); it != cache_.end()) return it->second;
    const double j = res_.sd(w);
    const double f = fermi(res_.beta, res_.mu, w);
    Coefficients c{0.5 * j * f, 0.5 * j * (1.0 - f)};
    if (lamb_) {
      const auto [pv_f, pv_h] = principal_parts(w);
      c.chi -= Complex(0.0, pv_f / (2.0 * std::numbers::pi));
      c.theta -= Complex(0.0, pv_h / (2.0 * std::numbers::pi));
    }
    cache_.emplace(w, c);
    return c;
  }

 private:
  std::pair<double, double> principal_parts(double w) const {
    if (const auto* flat = res_.sd.as<spectral::Flat>(); flat && std::isinf(flat->lower) && std::isinf(flat->upper)) {
      // Each integral diverges logarithmically, but the divergent constants
      // enter chi and theta with opposite signs and cancel in the generator
      // (d d^dag + d^dag d = 1). What remains is the digamma term.
      gsl_sf_result re, im;
      gsl_sf_complex_psi_e(0.5, res_.beta * (w - res_.mu) / (2.0 * std::numbers::pi), &re, &im);
      return {flat->height * re.val, -flat->height * re.val};
    }
    const auto win = res_.sd.window();
    if (!win.finite()) throw Error("Lamb shift of reservoir '" + res_.label + "' needs a finite SD window");
    const quadrature::Integrand jf = [this](double x) { return res_.sd(x) * fermi(res_.beta, res_.mu, x); };
    const quadrature::Integrand jh = [this](double x) {
      return res_.sd(x) * (1.0 - fermi(res_.beta, res_.mu, x));
    };
    if (w == win.lower || w == win.upper) {
      throw Error("Bohr frequency on the edge of the SD window of reservoir '" + res_.label + "'");
    }
    const auto a = quadrature::principal_value(jf, win.lower, win.upper, w, tol_);
    const auto b = quadrature::principal_value(jh, win.lower, win.upper, w, tol_);
    if (!a.converged) throw QuadratureError("Lamb shift quadrature did not converge", a.value, a.error);
    if (!b.converged) throw QuadratureError("Lamb shift quadrature did not converge", b.value, b.error);
    return {a.value, b.value};
  }

  const fock::Reservoir& res_;
  bool lamb_;
  double tol_;
  std::map<double, Coefficients> cache_;
};

void fill_piece(ReservoirPiece& piece, const EigenFrame& frame, bool lamb_shift) {
  const Eigen::Index n = frame.energies.size();
  const Matrix d = frame.to_eigen(piece.coupling);
  CoefficientTable table(piece.reservoir, lamb_shift, 1e-10);

  Matrix chi = Matrix::Zero(n, n);
  Matrix theta = Matrix::Zero(n, n);
  const double cutoff = 1e-13 * std::max(d.cwiseAbs().maxCoeff(), 1.0);
  const double tol = degeneracy_tolerance(frame);

  struct Group {
    double frequency;
    Matrix d, chi, theta;
  };
  std::vector<Group> groups;

  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(d(k, l)) <= cutoff) continue;
      const double w = frame.bohr(l, k);
      const auto c = table.at(w);
      chi(k, l) = c.chi * d(k, l);
      theta(k, l) = c.theta * d(k, l);

      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const Group& g) { return std::abs(g.frequency - w) < tol; });
      if (it == groups.end()) {
        groups.push_back({w, Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)});
        it = groups.end() - 1;
      }
      it->d(k, l) = d(k, l);
      it->chi(k, l) = chi(k, l);
      it->theta(k, l) = theta(k, l);
    }
  }

  piece.chi = frame.from_eigen(chi);
  piece.theta = frame.from_eigen(theta);
  piece.components.clear();
  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.frequency < b.frequency; });
  for (auto& g : groups) {
    piece.components.push_back(
        {g.frequency, frame.from_eigen(g.d), frame.from_eigen(g.chi), frame.from_eigen(g.theta)});
  }
}

void add_dissipator(GeneratorTerms& t, const Matrix& d, const Matrix& chi, const Matrix& theta) {
  const Matrix dd = d.adjoint();
  const Matrix chid = chi.adjoint();
  const Matrix thetad = theta.adjoint();
  // [chi^dag rho, d]
  t.left.noalias() -= d * chid;
  t.sandwiches.push_back({chid, d});
  // [d^dag, rho chi]
  t.right.noalias() -= chi * dd;
  t.sandwiches.push_back({dd, chi});
  // [theta rho, d^dag]
  t.left.noalias() -= dd * theta;
  t.sandwiches.push_back({theta, dd});
  // [d, rho theta^dag]
  t.right.noalias() -= thetad * d;
  t.sandwiches.push_back({d, thetad});
}

}  // namespace

std::pair<Matrix, Matrix> build_chi_theta(const EigenFrame& frame, const Matrix& coupling,
                                          const fock::Reservoir& reservoir, bool lamb_shift,
                                          double tolerance) {
  if (coupling.rows() != frame.energies.size() || coupling.cols() != frame.energies.size()) {
    throw Error("coupling operator does not match the Hamiltonian dimension");
  }
  const Eigen::Index n = frame.energies.size();
  const Matrix d = frame.to_eigen(coupling);
  CoefficientTable table(reservoir, lamb_shift, tolerance);
  Matrix chi = Matrix::Zero(n, n);
  Matrix theta = Matrix::Zero(n, n);
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (d(k, l) == Complex{}) continue;
      const auto c = table.at(frame.bohr(l, k));
      chi(k, l) = c.chi * d(k, l);
      theta(k, l) = c.theta * d(k, l);
    }
  }
  return {frame.from_eigen(chi), frame.from_eigen(theta)};
}

DissipatorPieces build_pieces(const fock::ImpurityModel& model) {
  return build_pieces(model, diagonalize(model.hamiltonian));
}

DissipatorPieces build_pieces(const fock::ImpurityModel& model, const EigenFrame& frame) {
  DissipatorPieces out{frame, {}, {}};
  for (std::size_t i = 0; i < model.attachments.size(); ++i) {
    const auto& a = model.attachments[i];
    if (a.coupling.rows() != model.dimension() || a.coupling.cols() != model.dimension()) {
      throw Error("attachment '" + a.reservoir.label + "' does not match the Hamiltonian dimension");
    }
    ReservoirPiece piece{i, a.reservoir, a.coupling, {}, {}, {}};
    fill_piece(piece, out.frame, false);
    out.reservoirs.push_back(std::move(piece));
  }
  return out;
}

DissipatorPieces apply_variant(DissipatorPieces pieces, GeneratorFlags flags) {
  if (flags.lamb_shift != pieces.flags.lamb_shift) {
    for (auto& p : pieces.reservoirs) fill_piece(p, pieces.frame, flags.lamb_shift);
  }
  pieces.flags = flags;
  return pieces;
}

GeneratorTerms dissipator_terms(const ReservoirPiece& piece, bool secular) {
  GeneratorTerms t(piece.coupling.rows());
  if (!secular) {
    add_dissipator(t, piece.coupling, piece.chi, piece.theta);
    return t;
  }
  for (const auto& c : piece.components) add_dissipator(t, c.coupling, c.chi, c.theta);
  return t;
}

GeneratorTerms hamiltonian_terms(const Matrix& hamiltonian) {
  GeneratorTerms t(hamiltonian.rows());
  t.left = Complex(0.0, -1.0) * hamiltonian;
  t.right = Complex(0.0, 1.0) * hamiltonian;
  return t;
}

Liouvillian::Liouvillian(const fock::ImpurityModel& model, DissipatorPieces pieces)
    : pieces_(std::move(pieces)), hamiltonian_(redfield::hamiltonian_terms(model.hamiltonian)) {
  if (pieces_.reservoirs.empty()) throw Error("Liouvillian needs at least one reservoir attachment");
  GeneratorTerms total = hamiltonian_;
  for (const auto& p : pieces_.reservoirs) {
    dissipators_.push_back(dissipator_terms(p, pieces_.flags.secular));
    labels_.push_back(p.reservoir.label);
    total += dissipators_.back();
  }
  superoperator_ = kernels::assemble_superoperator(total);
}

Matrix Liouvillian::piece_superoperator(std::size_t nu) const {
  return kernels::assemble_superoperator(dissipators_.at(nu));
}

Matrix Liouvillian::apply(const Matrix& rho) const {
  Matrix out = hamiltonian_.apply(rho);
  for (const auto& d : dissipators_) out += d.apply(rho);
  return out;
}

Matrix Liouvillian::apply_piece(std::size_t nu, const Matrix& rho) const { return dissipators_.at(nu).apply(rho); }

Liouvillian build_liouvillian(const fock::ImpurityModel& model, GeneratorFlags flags) {
  return Liouvillian(model, apply_variant(build_pieces(model), flags));
}

}  // namespace rcmap::redfield
