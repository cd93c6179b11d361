#include <cmath>
#include <random>

#include <doctest.h>

#include "rcmap/error.hpp"
#include "rcmap/fock.hpp"
#include "rcmap/redfield.hpp"

using namespace rcmap;
using namespace rcmap::redfield;
using spectral::SpectralDensity;

namespace {

const double inf = std::numeric_limits<double>::infinity();

fock::ImpurityModel single_dot(double eps, fock::Reservoir r) {
  fock::ModelBuilder b;
  b.attach(b.add_mode("d", eps), std::move(r));
  return b.build("dot");
}

// Two interacting, tunnel-coupled dots with a reservoir on each.
fock::ImpurityModel pair_model(spectral::SpectralDensity sd, double beta = 2.0) {
  fock::ModelBuilder b;
  const int a = b.add_mode("a", 0.4);
  const int c = b.add_mode("b", 0.9);
  b.add_tunneling(a, c, 0.15);
  b.add_coulomb(a, c, 0.3);
  b.attach(a, {"L", beta, 0.8, sd});
  b.attach(c, {"R", beta, 0.2, sd});
  return b.build("pair");
}

Matrix random_hermitian(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return m + m.adjoint();
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("fermi function") {
  CHECK(fermi(3.0, 0.7, 0.7) == 0.5);
  CHECK(fermi(1.0, 0.0, 1.0) == doctest::Approx(1.0 / (std::exp(1.0) + 1.0)).epsilon(1e-15));
  CHECK(fermi(1.0, 0.0, 1e6) == 0.0);
  CHECK(fermi(1.0, 0.0, -1e6) == 1.0);
  CHECK(std::isfinite(fermi(1e3, 0.0, 1e4)));
}

TEST_CASE("eigen frame is unitary and reproduces H") {
  const auto m = fock::build_model(fock::ModelVariant::model3, {});
  const auto f = diagonalize(m.hamiltonian);
  const Eigen::Index n = m.dimension();
  CHECK(max_abs(f.vectors.adjoint() * f.vectors - Matrix::Identity(n, n)) < 1e-10);
  Matrix diag = Matrix::Zero(n, n);
  diag.diagonal() = f.energies.cast<Complex>();
  CHECK(max_abs(f.from_eigen(diag) - m.hamiltonian) < 1e-10);
}

TEST_CASE("chi and theta in the high-temperature limit") {
  const double delta = 0.05;
  const auto m = single_dot(0.3, {"L", 1e-12, 0.0, SpectralDensity::flat(2 * delta, -inf, inf)});
  const auto [chi, theta] = build_chi_theta(diagonalize(m.hamiltonian), m.attachments[0].coupling,
                                            m.attachments[0].reservoir);
  const Matrix& d = m.attachments[0].coupling;
  CHECK(max_abs(chi - 0.5 * delta * d) < 1e-14);
  CHECK(max_abs(theta - 0.5 * delta * d) < 1e-14);
}

TEST_CASE("chi coefficient at a Lorentzian peak") {
  const double eps = 0.8, gamma = 0.02;
  const fock::Reservoir r{"L", 2.0, 0.5, SpectralDensity::lorentzian(gamma, 0.1, eps)};
  const auto m = single_dot(eps, r);
  const auto [chi, theta] = build_chi_theta(diagonalize(m.hamiltonian), m.attachments[0].coupling, r);
  CHECK(chi(0, 1).real() == doctest::Approx(0.5 * gamma * fermi(2.0, 0.5, eps)).epsilon(1e-14));
  CHECK(theta(0, 1).real() == doctest::Approx(0.5 * gamma * (1 - fermi(2.0, 0.5, eps))).epsilon(1e-14));
}

TEST_CASE("chi + theta does not depend on beta or mu") {
  const auto sd = SpectralDensity::lorentzian(0.1, 0.3, 0.5);
  const auto m = pair_model(sd);
  const auto frame = diagonalize(m.hamiltonian);
  const Matrix& d = m.attachments[0].coupling;
  const auto [c1, t1] = build_chi_theta(frame, d, {"L", 0.3, -1.0, sd});
  const auto [c2, t2] = build_chi_theta(frame, d, {"L", 40.0, 0.7, sd});
  CHECK(max_abs((c1 + t1) - (c2 + t2)) < 1e-15);
}

TEST_CASE("generators preserve trace and Hermiticity") {
  std::mt19937 rng(3);
  const GeneratorFlags variants[] = {{false, false}, {true, false}, {false, true}, {true, true}};
  for (const auto flags : variants) {
    for (const auto& m : {fock::build_model(fock::ModelVariant::model2, {}), pair_model(SpectralDensity::flat(0.1, -inf, inf))}) {
      const auto L = build_liouvillian(m, flags);
      const Eigen::Index n = L.dimension();
      const Matrix& s = L.superoperator();
      Eigen::RowVectorXcd trace_row = Eigen::RowVectorXcd::Zero(n * n);
      for (Eigen::Index i = 0; i < n; ++i) trace_row += s.row(i * n + i);
      CHECK(trace_row.cwiseAbs().maxCoeff() < 1e-10);
      for (int k = 0; k < 3; ++k) {
        const Matrix a = random_hermitian(n, rng);
        const Matrix la = L.apply(a);
        CHECK(max_abs(la - la.adjoint()) < 1e-10);
      }
    }
  }
}

TEST_CASE("superoperator agrees with direct application") {
  std::mt19937 rng(11);
  const auto m = pair_model(SpectralDensity::lorentzian(0.05, 0.2, 0.6));
  const auto L = build_liouvillian(m, {true, false});
  const Matrix rho = random_hermitian(m.dimension(), rng);
  const Vector v = L.superoperator() * Eigen::Map<const Vector>(rho.data(), rho.size());
  const Matrix back = Eigen::Map<const Matrix>(v.data(), rho.rows(), rho.cols());
  CHECK(max_abs(back - L.apply(rho)) < 1e-12);
  Matrix pieces = L.hamiltonian_terms().apply(rho);
  for (std::size_t nu = 0; nu < L.reservoirs(); ++nu) pieces += L.apply_piece(nu, rho);
  CHECK(max_abs(pieces - L.apply(rho)) < 1e-12);
}

TEST_CASE("dissipators scale linearly with the SD height") {
  for (const bool lamb : {false, true}) {
    const auto a = build_liouvillian(pair_model(SpectralDensity::flat(0.02, -inf, inf)), {lamb, false});
    const auto b = build_liouvillian(pair_model(SpectralDensity::flat(0.06, -inf, inf)), {lamb, false});
    for (std::size_t nu = 0; nu < 2; ++nu) {
      CHECK(max_abs(b.piece_superoperator(nu) - 3.0 * a.piece_superoperator(nu)) < 1e-14);
    }
  }
}

TEST_CASE("Lamb shift vanishes for a symmetric SD at infinite temperature") {
  const auto m = single_dot(0.5, {"L", 1e-9, 0.0, SpectralDensity::semicircle(0.5, 0.3)});
  const auto off = build_liouvillian(m, {false, false});
  const auto on = build_liouvillian(m, {true, false});
  CHECK(max_abs(on.superoperator() - off.superoperator()) < 1e-9);
}

TEST_CASE("wide-band Lamb shift is the limit of wide finite bands") {
  const double h = 0.05;
  const auto wide = build_liouvillian(pair_model(SpectralDensity::flat(h, -inf, inf)), {true, false});
  double previous = inf;
  for (double w : {1e2, 1e3, 1e4}) {
    const auto finite = build_liouvillian(pair_model(SpectralDensity::flat(h, -w, w)), {true, false});
    const double diff = max_abs(finite.superoperator() - wide.superoperator());
    CAPTURE(w);
    CHECK(diff < 0.2 * previous);
    previous = diff;
  }
  CHECK(previous < 1e-5);
}

TEST_CASE("secular generator separates populations from coherences") {
  const auto m = pair_model(SpectralDensity::lorentzian(0.05, 0.2, 0.6));
  const auto frame = diagonalize(m.hamiltonian);
  const Eigen::Index n = m.dimension();
  const auto sec = build_liouvillian(m, {false, true});
  const auto full = build_liouvillian(m, {false, false});
  auto coherence_leak = [&](const Liouvillian& L) {
    double leak = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      Matrix p = Matrix::Zero(n, n);
      p(k, k) = 1.0;
      const Matrix out = frame.to_eigen(L.apply(frame.from_eigen(p)));
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (i != j) leak = std::max(leak, std::abs(out(i, j)));
        }
      }
    }
    return leak;
  };
  CHECK(coherence_leak(sec) < 1e-13);
  CHECK(coherence_leak(full) > 1e-6);
}

TEST_CASE("frequency components add up to the full coupling") {
  const auto m = fock::build_model(fock::ModelVariant::model3, {});
  const auto pieces = build_pieces(m);
  for (const auto& p : pieces.reservoirs) {
    Matrix d = Matrix::Zero(m.dimension(), m.dimension());
    Matrix chi = d;
    for (const auto& c : p.components) {
      d += c.coupling;
      chi += c.chi;
    }
    CHECK(max_abs(d - p.coupling) < 1e-12);
    CHECK(max_abs(chi - p.chi) < 1e-15 + 1e-12 * max_abs(p.chi));
  }
}

TEST_CASE("malformed models are rejected") {
  auto m = single_dot(0.3, {"L", 1.0, 0.0, SpectralDensity::flat(0.1, -inf, inf)});
  auto bad = m;
  bad.attachments[0].coupling = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(build_pieces(bad), Error);
  auto none = m;
  none.attachments.clear();
  CHECK_THROWS_AS(build_liouvillian(none), Error);
}
