#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rcmap/linalg.hpp"
#include "rcmap/spectral.hpp"

namespace rcmap::fock {

/// Annihilation operators of n fermionic modes in the occupation-number basis.
///
/// Basis states are ordered by binary counting with mode 0 as the least
/// significant bit. Mode i carries the Jordan-Wigner string over modes
/// 0..i-1, so the anticommutation relations hold exactly.
class ModeAlgebra {
 public:
  static constexpr int kMaxModes = 12;

  explicit ModeAlgebra(int n_modes);

  int modes() const { return static_cast<int>(annihilators_.size()); }
  Eigen::Index dimension() const { return Eigen::Index{1} << modes(); }

  const Matrix& annihilator(int mode) const;
  Matrix creator(int mode) const { return annihilator(mode).adjoint(); }
  Matrix number(int mode) const;
  Matrix total_number() const;

  static bool occupied(Eigen::Index state, int mode) { return (state >> mode) & 1; }

 private:
  std::vector<Matrix> annihilators_;
};

ModeAlgebra build_algebra(int n_modes);

struct Reservoir {
  std::string label;
  double beta;
  double mu;
  spectral::SpectralDensity sd;
};

/// A reservoir coupled through the annihilator of one mode.
struct Attachment {
  int mode;
  Matrix coupling;
  Reservoir reservoir;
};

struct ImpurityModel {
  std::string name;
  ModeAlgebra algebra;
  std::vector<std::string> mode_names;
  Matrix hamiltonian;
  Matrix number;
  std::vector<Attachment> attachments;
  /// Bipartition used for the mutual information (both empty when unset).
  std::vector<int> system_modes;
  std::vector<int> demon_modes;

  Eigen::Index dimension() const { return hamiltonian.rows(); }
  int mode_index(std::string_view mode_name) const;
  /// Index of the attachment with this label, or -1.
  int attachment_index(std::string_view label) const;
};

/// Collects single-particle energies, tunnel couplings, density-density
/// terms and reservoir attachments, then assembles the many-body operators.
class ModelBuilder {
 public:
  int add_mode(std::string name, double energy);
  /// t (c_i^dag c_j + c_j^dag c_i)
  void add_tunneling(int i, int j, double t);
  /// u n_i n_j
  void add_coulomb(int i, int j, double u);
  std::size_t attach(int mode, Reservoir reservoir);

  /// Replaces attachment `index` by an explicit reaction-coordinate mode
  /// tunnel-coupled to the original mode; the reservoir keeps its label,
  /// temperature and chemical potential but now sees the residual density.
  /// Returns the index of the new mode.
  int add_reaction_coordinate(std::size_t index, std::string name,
                              const spectral::MapOptions& options = {});

  void set_partition(std::vector<int> system, std::vector<int> demon);

  int modes() const { return static_cast<int>(modes_.size()); }

  ImpurityModel build(std::string name) const;

 private:
  struct Mode {
    std::string name;
    double energy;
  };
  struct Tunneling {
    int i, j;
    double t;
  };
  struct Coulomb {
    int i, j;
    double u;
  };
  struct PendingAttachment {
    int mode;
    Reservoir reservoir;
  };

  void check_mode(int i) const;

  std::vector<Mode> modes_;
  std::vector<Tunneling> tunneling_;
  std::vector<Coulomb> coulomb_;
  std::vector<PendingAttachment> attachments_;
  std::vector<int> system_;
  std::vector<int> demon_;
};

/// eps_s n_s + eps_d n_d + U n_s n_d on modes (d_s, d_d); no reservoirs.
ImpurityModel build_double_dot(double eps_s, double eps_d, double coulomb);

enum class ModelVariant { dqdmd, model1, model2, model3 };

ModelVariant parse_variant(std::string_view name);
std::string_view to_string(ModelVariant v);

/// Parameters of the two-dot demon device. Energies in units of the dot
/// energy; the lead chemical potentials and Lorentzian centers follow from
/// eps_s, eps_d, U and V.
struct DemonParams {
  double eps_s = 1.0;
  double eps_d = 1.0;
  double coulomb = 0.015;
  double bias = 0.01;
  double beta = 1.0;
  double beta_ratio = 300.0;   ///< beta_D / beta
  double gamma_s = 1e-5;
  double gamma_ratio = 100.0;  ///< Gamma_D / Gamma_S
  double delta_s = 0.01;
  double delta_d = 0.01;
  double cutoff = 50.0;

  double gamma_d() const { return gamma_ratio * gamma_s; }
  double beta_d() const { return beta_ratio * beta; }
  double mu_l() const { return eps_s + 0.5 * bias; }
  double mu_r() const { return eps_s - 0.5 * bias; }
  double mu_d() const { return eps_d + 0.5 * coulomb; }
  double center_l() const { return eps_s; }
  double center_r() const { return eps_s + coulomb; }
  double center_d() const { return eps_d + 0.5 * coulomb; }
};

DemonParams demon_params_from_json(const nlohmann::json& j, DemonParams base = {});
nlohmann::json to_json(const DemonParams& p);

/// Demon presets. Mode order is (d_s, d_d, C_l, C_r, C_d) with absent modes
/// skipped; reservoirs are labelled L, R, D.
ImpurityModel build_model(ModelVariant variant, const DemonParams& params);
ImpurityModel build_model(std::string_view variant, const DemonParams& params);

/// J_L(eps_s) / J_L(eps_s + U) = 1 + U^2 / Delta_S^2.
double sd_imbalance(const DemonParams& params);

/// Custom model from JSON:
/// {"name", "modes": [{"name", "energy"}], "tunneling": [{"i", "j", "t"}],
///  "coulomb": [{"i", "j", "u"}],
///  "attachments": [{"mode", "label", "beta", "mu", "sd", "reaction_coordinate"?}],
///  "partition": {"system": [...], "demon": [...]}}
/// Mode references may be indices or names.
ImpurityModel model_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});

}  // namespace rcmap::fock
