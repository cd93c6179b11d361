#include "rcmap/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rcmap/error.hpp"

namespace rcmap::dynamics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// True when every coherence between states of different particle number
// decouples from the populations.
bool number_conserving(const fock::ImpurityModel& model) {
  const Matrix& h = model.hamiltonian;
  const Matrix& n = model.number;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h * n - n * h).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
  for (const auto& a : model.attachments) {
    if ((n * a.coupling - a.coupling * n + a.coupling).cwiseAbs().maxCoeff() > 1e-12) return false;
  }
  return true;
}

Matrix finish(Matrix rho, bool project_positive) {
  rho = 0.5 * (rho + rho.adjoint()).eval();
  if (project_positive) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
    rho = es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  }
  const double tr = rho.trace().real();
  if (!(std::abs(tr) > 0.0) || !std::isfinite(tr)) throw Error("no steady state found (zero trace)");
  rho /= tr;
  // Put the rounding of the normalization into the last population.
  const Eigen::Index d = rho.rows();
  double head = 0.0;
  for (Eigen::Index k = 0; k + 1 < d; ++k) {
    rho(k, k) = rho(k, k).real();
    head += rho(k, k).real();
  }
  rho(d - 1, d - 1) = 1.0 - head;
  return rho;
}

SteadyState solve_indices(const redfield::Liouvillian& l, const std::vector<Eigen::Index>& idx) {
  const Eigen::Index d = l.dimension();
  const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
  const Matrix a = l.superoperator()(idx, idx);

  std::vector<Eigen::Index> diagonal;
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index full = idx[static_cast<std::size_t>(r)];
    if (full % d == full / d) diagonal.push_back(r);
  }
  // The trace row of a trace-preserving generator is zero, so any one
  // population row is redundant; replace it by the normalization.
  Matrix b = a;
  const Eigen::Index pinned = diagonal.front();
  b.row(pinned).setZero();
  for (Eigen::Index r : diagonal) b(pinned, r) = 1.0;
  Vector rhs = Vector::Zero(m);
  rhs(pinned) = 1.0;

  Eigen::FullPivLU<Matrix> lu(b);
  lu.setThreshold(1e-14);

  SteadyState out;
  out.unknowns = m;
  Vector x;
  if (lu.isInvertible()) {
    x = lu.solve(rhs);
    for (int it = 0; it < 3; ++it) x += lu.solve(rhs - b * x);
  } else {
    Eigen::FullPivLU<Matrix> kernel_lu(a);
    kernel_lu.setThreshold(1e-14);
    const Matrix kernel = kernel_lu.kernel();
    if (kernel.cols() == 0 || kernel.norm() == 0.0) throw Error("no steady state found");
    out.kernel_dimension = static_cast<int>(kernel.cols());
    // Pick the kernel vector with the largest trace.
    Eigen::Index best = 0;
    double best_tr = -1.0;
    for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
      Complex tr = 0.0;
      for (Eigen::Index r : diagonal) tr += kernel(r, c);
      if (std::abs(tr) > best_tr) {
        best_tr = std::abs(tr);
        best = c;
      }
    }
    x = kernel.col(best);
  }

  Matrix rho = Matrix::Zero(d, d);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index full = idx[static_cast<std::size_t>(r)];
    rho(full % d, full / d) = x(r);
  }
  out.rho = finish(std::move(rho), out.degenerate());
  out.residual = l.apply(out.rho).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace

SteadyState steady_state(const redfield::Liouvillian& liouvillian) {
  const Eigen::Index d = liouvillian.dimension();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d * d));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  return solve_indices(liouvillian, idx);
}

SteadyState steady_state(const redfield::Liouvillian& liouvillian, const fock::ImpurityModel& model) {
  if (model.dimension() != liouvillian.dimension()) throw Error("model and generator dimensions differ");
  if (!number_conserving(model)) return steady_state(liouvillian);
  const Eigen::Index d = liouvillian.dimension();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index col = 0; col < d; ++col) {
    for (Eigen::Index row = 0; row < d; ++row) {
      if (model.number(row, row) == model.number(col, col)) idx.push_back(vec_index(row, col, d));
    }
  }
  return solve_indices(liouvillian, idx);
}

Currents currents(const redfield::Liouvillian& liouvillian, std::size_t nu, const Matrix& rho,
                  const Matrix& hamiltonian, const Matrix& number) {
  const Matrix drho = liouvillian.apply_piece(nu, rho);
  return {(hamiltonian * drho).trace().real(), (number * drho).trace().real()};
}

double von_neumann_entropy(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double p : es.eigenvalues()) {
    if (p > 1e-14) s -= p * std::log(p);
  }
  return s;
}

Matrix partial_trace(const Matrix& rho, int n_modes, std::span<const int> keep) {
  if (rho.rows() != (Eigen::Index{1} << n_modes) || rho.cols() != rho.rows()) {
    throw Error("density matrix does not match the number of modes");
  }
  std::vector<int> rest;
  for (int i = 0; i < n_modes; ++i) {
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) rest.push_back(i);
  }
  for (int k : keep) {
    if (k < 0 || k >= n_modes) throw Error("partial trace: mode index out of range");
  }
  const Eigen::Index nk = Eigen::Index{1} << keep.size();
  const Eigen::Index nr = Eigen::Index{1} << rest.size();
  auto compose = [&](Eigen::Index r, Eigen::Index e) {
    Eigen::Index s = 0;
    for (std::size_t i = 0; i < keep.size(); ++i) s |= ((r >> i) & 1) << keep[i];
    for (std::size_t i = 0; i < rest.size(); ++i) s |= ((e >> i) & 1) << rest[i];
    return s;
  };
  Matrix out = Matrix::Zero(nk, nk);
  for (Eigen::Index e = 0; e < nr; ++e) {
    for (Eigen::Index c = 0; c < nk; ++c) {
      const Eigen::Index sc = compose(c, e);
      for (Eigen::Index r = 0; r < nk; ++r) out(r, c) += rho(compose(r, e), sc);
    }
  }
  return out;
}

double mutual_information(const Matrix& rho, int n_modes, std::span<const int> a, std::span<const int> b,
                          bool require_cover) {
  if (a.empty() || b.empty()) throw Error("partition malformed: empty side");
  std::vector<int> both(a.begin(), a.end());
  both.insert(both.end(), b.begin(), b.end());
  std::vector<int> sorted = both;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error("partition malformed: a mode appears twice");
  }
  if (sorted.front() < 0 || sorted.back() >= n_modes) throw Error("partition malformed: mode out of range");
  if (require_cover && static_cast<int>(sorted.size()) != n_modes) {
    throw Error("partition malformed: modes not covered");
  }
  const Matrix joint = static_cast<int>(sorted.size()) == n_modes ? rho : partial_trace(rho, n_modes, both);
  return von_neumann_entropy(partial_trace(rho, n_modes, a)) + von_neumann_entropy(partial_trace(rho, n_modes, b)) -
         von_neumann_entropy(joint);
}

const ReservoirFlow& SteadyReport::flow(std::string_view label) const {
  for (const auto& f : flows) {
    if (f.label == label) return f;
  }
  throw Error("no reservoir labelled '" + std::string(label) + "'");
}

double SteadyReport::largest_matter_current() const {
  double m = 0.0;
  for (const auto& f : flows) m = std::max(m, std::abs(f.matter_current));
  return m;
}

double SteadyReport::largest_energy_current() const {
  double m = 0.0;
  for (const auto& f : flows) m = std::max(m, std::abs(f.energy_current));
  return m;
}

SteadyReport thermo_report(const fock::ImpurityModel& model, const redfield::Liouvillian& liouvillian,
                           const SteadyState& state) {
  SteadyReport r;
  r.model = model.name;
  r.flags = liouvillian.flags();
  r.rho = state.rho;
  r.degenerate = state.degenerate();
  r.solve_residual = state.residual;

  for (std::size_t nu = 0; nu < liouvillian.reservoirs(); ++nu) {
    const auto& res = liouvillian.pieces().reservoirs[nu].reservoir;
    const auto c = currents(liouvillian, nu, state.rho, model.hamiltonian, model.number);
    r.flows.push_back({res.label, res.beta, res.mu, c.energy, c.matter, c.energy - res.mu * c.matter});
    r.entropy_production -= res.beta * r.flows.back().heat;
    r.matter_balance += c.matter;
    r.energy_balance += c.energy;
  }

  r.energy = (model.hamiltonian * state.rho).trace().real();
  r.entropy = von_neumann_entropy(state.rho);
  Eigen::SelfAdjointEigenSolver<Matrix> es(state.rho, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();

  const int n = model.algebra.modes();
  r.mutual_information = model.system_modes.empty() || model.demon_modes.empty()
                             ? kNaN
                             : mutual_information(state.rho, n, model.system_modes, model.demon_modes);
  if (n >= 2) {
    const int s[] = {0};
    const int d[] = {1};
    r.dot_mutual_information = mutual_information(state.rho, n, s, d, false);
  } else {
    r.dot_mutual_information = kNaN;
  }

  const int il = model.attachment_index("L");
  const int ir = model.attachment_index("R");
  const int id = model.attachment_index("D");
  if (il >= 0 && ir >= 0 && id >= 0) {
    const auto& fl = r.flows[static_cast<std::size_t>(il)];
    const auto& fr = r.flows[static_cast<std::size_t>(ir)];
    const auto& fd = r.flows[static_cast<std::size_t>(id)];
    DemonSummary s{};
    s.matter_current = fl.matter_current;
    s.energy_current = -fd.energy_current;
    s.imbalance_ratio = fl.energy_current != 0.0 ? std::abs(s.energy_current / fl.energy_current) : kNaN;
    const double beta = fl.beta;
    s.entropy_production = beta * (fl.mu - fr.mu) * s.matter_current + (fd.beta - beta) * s.energy_current;
    const double scale = std::max(std::abs(s.entropy_production), std::abs(r.entropy_production));
    s.entropy_production_mismatch =
        scale > 0.0 ? std::abs(s.entropy_production - r.entropy_production) / scale : 0.0;
    r.demon = s;
  }
  return r;
}

SteadyReport solve(const fock::ImpurityModel& model, redfield::GeneratorFlags flags) {
  const auto l = redfield::build_liouvillian(model, flags);
  return thermo_report(model, l, steady_state(l, model));
}

nlohmann::json to_json(const SteadyReport& r, bool include_rho) {
  using nlohmann::json;
  auto num = [](double x) -> json { return std::isfinite(x) ? json(x) : json(nullptr); };
  json flows = json::array();
  for (const auto& f : r.flows) {
    flows.push_back({{"label", f.label},
                     {"beta", f.beta},
                     {"mu", f.mu},
                     {"energy_current", f.energy_current},
                     {"matter_current", f.matter_current},
                     {"heat", f.heat}});
  }
  json j{{"model", r.model},
         {"flags", {{"lamb_shift", r.flags.lamb_shift}, {"secular", r.flags.secular}}},
         {"reservoirs", flows},
         {"entropy_production", r.entropy_production},
         {"energy", r.energy},
         {"entropy", r.entropy},
         {"mutual_information", num(r.mutual_information)},
         {"dot_mutual_information", num(r.dot_mutual_information)},
         {"min_eigenvalue", r.min_eigenvalue},
         {"degenerate", r.degenerate},
         {"matter_balance", r.matter_balance},
         {"energy_balance", r.energy_balance},
         {"solve_residual", r.solve_residual},
         {"conventions",
          {{"reservoir currents", "tr{X L_nu rho}; positive when the impurity gains from reservoir nu"},
           {"demon.matter_current", "matter flow from L through the system dot (= L reservoir value)"},
           {"demon.energy_current", "energy flow into reservoir D (= minus the D reservoir value)"}}}};
  if (r.demon) {
    j["demon"] = {{"matter_current", r.demon->matter_current},
                  {"energy_current", r.demon->energy_current},
                  {"imbalance_ratio", num(r.demon->imbalance_ratio)},
                  {"entropy_production", r.demon->entropy_production},
                  {"entropy_production_mismatch", r.demon->entropy_production_mismatch}};
  }
  if (include_rho) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < r.rho.rows(); ++i) {
      std::vector<double> a, b;
      for (Eigen::Index k = 0; k < r.rho.cols(); ++k) {
        a.push_back(r.rho(i, k).real());
        b.push_back(r.rho(i, k).imag());
      }
      re.push_back(a);
      im.push_back(b);
    }
    j["rho"] = {{"real", re}, {"imag", im}};
  }
  return j;
}

}  // namespace rcmap::dynamics
