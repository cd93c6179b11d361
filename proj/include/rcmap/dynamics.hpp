#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcmap/fock.hpp"
#include "rcmap/linalg.hpp"
#include "rcmap/redfield.hpp"

namespace rcmap::dynamics {

struct SteadyState {
  Matrix rho;
  /// Dimension of the numerical null space; 1 for a unique steady state.
  int kernel_dimension = 1;
  bool degenerate() const { return kernel_dimension > 1; }
  /// Size of the linear system actually solved (the number-conserving
  /// sector when the model allows it).
  Eigen::Index unknowns = 0;
  /// max |L rho| after refinement.
  double residual = 0.0;
};

/// Solves L rho = 0 with tr rho = 1. When `number` commutes with the
/// Hamiltonian and every coupling operator lowers it by one, only the
/// coherences between states of equal particle number are solved for; the
/// others vanish in the steady state.
SteadyState steady_state(const redfield::Liouvillian& liouvillian, const fock::ImpurityModel& model);
/// Plain solve on the full superoperator.
SteadyState steady_state(const redfield::Liouvillian& liouvillian);

struct Currents {
  double energy;  ///< tr{H L_nu rho}
  double matter;  ///< tr{N L_nu rho}
};

/// Positive values mean the impurity gains energy / particles from reservoir nu.
Currents currents(const redfield::Liouvillian& liouvillian, std::size_t nu, const Matrix& rho,
                  const Matrix& hamiltonian, const Matrix& number);

/// -sum p ln p over eigenvalues above 1e-14.
double von_neumann_entropy(const Matrix& rho);

/// Reduced state on `keep`, tracing out every other mode in the occupation
/// basis. Bit i of the reduced index is the occupation of keep[i].
Matrix partial_trace(const Matrix& rho, int n_modes, std::span<const int> keep);

/// S(rho_a) + S(rho_b) - S(rho_ab). With `require_cover`, a and b must
/// together contain every mode exactly once.
double mutual_information(const Matrix& rho, int n_modes, std::span<const int> a, std::span<const int> b,
                          bool require_cover = true);

struct ReservoirFlow {
  std::string label;
  double beta;
  double mu;
  double energy_current;  ///< tr{H L_nu rho}
  double matter_current;  ///< tr{N L_nu rho}
  double heat;            ///< energy_current - mu * matter_current
};

/// Observables in the sign convention of the circuit picture: matter flowing
/// from L through the system dot and energy flowing into reservoir D.
struct DemonSummary {
  double matter_current;      ///< I_M = tr{N L_L rho}
  double energy_current;      ///< I_E = -tr{H L_D rho}
  double imbalance_ratio;     ///< |I_E / I_E^(L)|
  double entropy_production;  ///< beta V I_M + (beta_D - beta) I_E
  /// |difference| / max(|value|) between this and the general expression.
  double entropy_production_mismatch;
};

struct SteadyReport {
  std::string model;
  redfield::GeneratorFlags flags;
  Matrix rho;
  std::vector<ReservoirFlow> flows;
  double entropy_production = 0.0;  ///< -sum beta_nu Qdot_nu
  double energy = 0.0;              ///< tr{H rho}
  double entropy = 0.0;             ///< S(rho)
  /// Between the model's system and demon partitions (NaN if unset).
  double mutual_information = 0.0;
  /// Between the occupations of modes 0 and 1 (NaN for single-mode models).
  double dot_mutual_information = 0.0;
  double min_eigenvalue = 0.0;
  bool degenerate = false;
  double matter_balance = 0.0;  ///< sum_nu tr{N L_nu rho}
  double energy_balance = 0.0;  ///< sum_nu tr{H L_nu rho}
  double solve_residual = 0.0;
  std::optional<DemonSummary> demon;

  const ReservoirFlow& flow(std::string_view label) const;
  /// Largest |individual current| of either kind, for relative balance checks.
  double largest_matter_current() const;
  double largest_energy_current() const;
};

SteadyReport thermo_report(const fock::ImpurityModel& model, const redfield::Liouvillian& liouvillian,
                           const SteadyState& state);

/// Builds the generator, solves and reports.
SteadyReport solve(const fock::ImpurityModel& model, redfield::GeneratorFlags flags = {});

nlohmann::json to_json(const SteadyReport& report, bool include_rho = false);

}  // namespace rcmap::dynamics
