#include "rcmap/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "rcmap/error.hpp"
#include "rcmap/spectral_io.hpp"

namespace rcmap::fock {

ModeAlgebra::ModeAlgebra(int n_modes) {
  if (n_modes < 1 || n_modes > kMaxModes) {
    throw Error("number of modes must be in [1, " + std::to_string(kMaxModes) + "], got " +
                std::to_string(n_modes));
  }
  const Eigen::Index dim = Eigen::Index{1} << n_modes;
  annihilators_.reserve(static_cast<std::size_t>(n_modes));
  for (int i = 0; i < n_modes; ++i) {
    Matrix d = Matrix::Zero(dim, dim);
    const Eigen::Index below = (Eigen::Index{1} << i) - 1;
    for (Eigen::Index s = 0; s < dim; ++s) {
      if (!occupied(s, i)) continue;
      const int string = std::popcount(static_cast<unsigned long>(s & below));
      d(s ^ (Eigen::Index{1} << i), s) = (string % 2 == 0) ? 1.0 : -1.0;
    }
    annihilators_.push_back(std::move(d));
  }
}

const Matrix& ModeAlgebra::annihilator(int mode) const {
  if (mode < 0 || mode >= modes()) throw Error("mode index " + std::to_string(mode) + " out of range");
  return annihilators_[static_cast<std::size_t>(mode)];
}

Matrix ModeAlgebra::number(int mode) const {
  const auto& d = annihilator(mode);
  return d.adjoint() * d;
}

Matrix ModeAlgebra::total_number() const {
  Matrix n = Matrix::Zero(dimension(), dimension());
  for (Eigen::Index s = 0; s < dimension(); ++s) {
    n(s, s) = std::popcount(static_cast<unsigned long>(s));
  }
  return n;
}

ModeAlgebra build_algebra(int n_modes) { return ModeAlgebra(n_modes); }

int ImpurityModel::mode_index(std::string_view mode_name) const {
  const auto it = std::find(mode_names.begin(), mode_names.end(), mode_name);
  if (it == mode_names.end()) throw Error("unknown mode '" + std::string(mode_name) + "'");
  return static_cast<int>(it - mode_names.begin());
}

int ImpurityModel::attachment_index(std::string_view label) const {
  for (std::size_t i = 0; i < attachments.size(); ++i) {
    if (attachments[i].reservoir.label == label) return static_cast<int>(i);
  }
  return -1;
}

void ModelBuilder::check_mode(int i) const {
  if (i < 0 || i >= modes()) throw Error("mode index " + std::to_string(i) + " out of range");
}

int ModelBuilder::add_mode(std::string name, double energy) {
  if (modes() >= ModeAlgebra::kMaxModes) throw Error("too many modes");
  modes_.push_back({std::move(name), energy});
  return modes() - 1;
}

void ModelBuilder::add_tunneling(int i, int j, double t) {
  check_mode(i);
  check_mode(j);
  if (i == j) throw Error("tunneling needs two distinct modes");
  tunneling_.push_back({i, j, t});
}

void ModelBuilder::add_coulomb(int i, int j, double u) {
  check_mode(i);
  check_mode(j);
  if (i == j) throw Error("spinless modes cannot carry an on-site interaction");
  coulomb_.push_back({i, j, u});
}

std::size_t ModelBuilder::attach(int mode, Reservoir reservoir) {
  check_mode(mode);
  if (!(reservoir.beta > 0.0)) throw Error("reservoir '" + reservoir.label + "' needs beta > 0");
  attachments_.push_back({mode, std::move(reservoir)});
  return attachments_.size() - 1;
}

int ModelBuilder::add_reaction_coordinate(std::size_t index, std::string name,
                                          const spectral::MapOptions& options) {
  if (index >= attachments_.size()) throw Error("attachment index out of range");
  auto& a = attachments_[index];
  auto level = spectral::rc_map(a.reservoir.sd, options);
  const int rc = add_mode(std::move(name), level.energy);
  add_tunneling(rc, a.mode, level.coupling);
  a.mode = rc;
  a.reservoir.sd = std::move(level.residual);
  return rc;
}

void ModelBuilder::set_partition(std::vector<int> system, std::vector<int> demon) {
  for (int i : system) check_mode(i);
  for (int i : demon) check_mode(i);
  system_ = std::move(system);
  demon_ = std::move(demon);
}

ImpurityModel ModelBuilder::build(std::string name) const {
  ModeAlgebra algebra(modes());
  const Eigen::Index dim = algebra.dimension();
  Matrix h = Matrix::Zero(dim, dim);
  for (int i = 0; i < modes(); ++i) h += modes_[static_cast<std::size_t>(i)].energy * algebra.number(i);
  for (const auto& t : tunneling_) {
    const Matrix hop = algebra.creator(t.i) * algebra.annihilator(t.j);
    h += t.t * (hop + hop.adjoint());
  }
  for (const auto& c : coulomb_) h += c.u * algebra.number(c.i) * algebra.number(c.j);

  std::vector<Attachment> attachments;
  for (const auto& a : attachments_) {
    attachments.push_back({a.mode, algebra.annihilator(a.mode), a.reservoir});
  }
  std::vector<std::string> names;
  for (const auto& m : modes_) names.push_back(m.name);
  Matrix number = algebra.total_number();
  return ImpurityModel{std::move(name), std::move(algebra), std::move(names), std::move(h),
                       std::move(number), std::move(attachments), system_, demon_};
}

ImpurityModel build_double_dot(double eps_s, double eps_d, double coulomb) {
  ModelBuilder b;
  const int s = b.add_mode("d_s", eps_s);
  const int d = b.add_mode("d_d", eps_d);
  b.add_coulomb(s, d, coulomb);
  b.set_partition({s}, {d});
  return b.build("double_dot");
}

ModelVariant parse_variant(std::string_view name) {
  if (name == "dqdmd") return ModelVariant::dqdmd;
  if (name == "model1") return ModelVariant::model1;
  if (name == "model2") return ModelVariant::model2;
  if (name == "model3") return ModelVariant::model3;
  throw Error("invalid model variant '" + std::string(name) +
              "' (expected dqdmd, model1, model2 or model3)");
}

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::dqdmd: return "dqdmd";
    case ModelVariant::model1: return "model1";
    case ModelVariant::model2: return "model2";
    case ModelVariant::model3: return "model3";
  }
  return "?";
}

DemonParams demon_params_from_json(const nlohmann::json& j, DemonParams p) {
  for (const auto& [key, value] : j.items()) {
    if (key == "eps_s") p.eps_s = value.get<double>();
    else if (key == "eps_d") p.eps_d = value.get<double>();
    else if (key == "U" || key == "coulomb") p.coulomb = value.get<double>();
    else if (key == "V" || key == "bias") p.bias = value.get<double>();
    else if (key == "beta") p.beta = value.get<double>();
    else if (key == "beta_ratio") p.beta_ratio = value.get<double>();
    else if (key == "gamma_s") p.gamma_s = value.get<double>();
    else if (key == "gamma_ratio") p.gamma_ratio = value.get<double>();
    else if (key == "delta_s") p.delta_s = value.get<double>();
    else if (key == "delta_d") p.delta_d = value.get<double>();
    else if (key == "cutoff") p.cutoff = value.get<double>();
    else throw Error("unknown demon parameter '" + key + "'");
  }
  return p;
}

nlohmann::json to_json(const DemonParams& p) {
  return {{"eps_s", p.eps_s},         {"eps_d", p.eps_d},       {"U", p.coulomb},
          {"V", p.bias},              {"beta", p.beta},         {"beta_ratio", p.beta_ratio},
          {"gamma_s", p.gamma_s},     {"gamma_ratio", p.gamma_ratio},
          {"delta_s", p.delta_s},     {"delta_d", p.delta_d},   {"cutoff", p.cutoff}};
}

namespace {

void validate(const DemonParams& p) {
  if (!(p.beta > 0.0) || !(p.beta_ratio > 0.0)) throw Error("demon parameters need beta, beta_ratio > 0");
  if (!(p.gamma_s > 0.0) || !(p.gamma_ratio > 0.0)) throw Error("demon parameters need gamma_s, gamma_ratio > 0");
  if (!(p.delta_s > 0.0) || !(p.delta_d > 0.0)) throw Error("demon parameters need delta_s, delta_d > 0");
}

}  // namespace

ImpurityModel build_model(ModelVariant variant, const DemonParams& p) {
  validate(p);
  using spectral::SpectralDensity;
  ModelBuilder b;
  const int s = b.add_mode("d_s", p.eps_s);
  const int d = b.add_mode("d_d", p.eps_d);
  b.add_coulomb(s, d, p.coulomb);

  const auto left = b.attach(
      s, {"L", p.beta, p.mu_l(), SpectralDensity::lorentzian(p.gamma_s, p.delta_s, p.center_l(), p.cutoff)});
  const auto right = b.attach(
      s, {"R", p.beta, p.mu_r(), SpectralDensity::lorentzian(p.gamma_s, p.delta_s, p.center_r(), p.cutoff)});
  const auto demon = b.attach(
      d, {"D", p.beta_d(), p.mu_d(), SpectralDensity::lorentzian(p.gamma_d(), p.delta_d, p.center_d(), p.cutoff)});

  std::vector<int> system{s}, demon_side{d};
  if (variant == ModelVariant::model1 || variant == ModelVariant::model3) {
    system.push_back(b.add_reaction_coordinate(left, "C_l"));
    system.push_back(b.add_reaction_coordinate(right, "C_r"));
  }
  if (variant == ModelVariant::model2 || variant == ModelVariant::model3) {
    demon_side.push_back(b.add_reaction_coordinate(demon, "C_d"));
  }
  b.set_partition(std::move(system), std::move(demon_side));
  return b.build(std::string(to_string(variant)));
}

ImpurityModel build_model(std::string_view variant, const DemonParams& params) {
  return build_model(parse_variant(variant), params);
}

double sd_imbalance(const DemonParams& p) {
  const auto jl = spectral::SpectralDensity::lorentzian(p.gamma_s, p.delta_s, p.center_l(), p.cutoff);
  return jl(p.eps_s) / jl(p.eps_s + p.coulomb);
}

namespace {

int mode_ref(const nlohmann::json& v, const std::vector<std::string>& names) {
  if (v.is_number_integer()) return v.get<int>();
  const auto name = v.get<std::string>();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error("unknown mode '" + name + "'");
  return static_cast<int>(it - names.begin());
}

}  // namespace

ImpurityModel model_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  ModelBuilder b;
  std::vector<std::string> names;
  for (const auto& m : j.at("modes")) {
    names.push_back(m.at("name").get<std::string>());
    b.add_mode(names.back(), m.at("energy").get<double>());
  }
  for (const auto& t : j.value("tunneling", nlohmann::json::array())) {
    b.add_tunneling(mode_ref(t.at("i"), names), mode_ref(t.at("j"), names), t.at("t").get<double>());
  }
  for (const auto& c : j.value("coulomb", nlohmann::json::array())) {
    b.add_coulomb(mode_ref(c.at("i"), names), mode_ref(c.at("j"), names), c.at("u").get<double>());
  }
  for (const auto& a : j.value("attachments", nlohmann::json::array())) {
    Reservoir r{a.at("label").get<std::string>(), a.at("beta").get<double>(), a.at("mu").get<double>(),
                spectral::sd_from_json(a.at("sd"), base)};
    const auto idx = b.attach(mode_ref(a.at("mode"), names), std::move(r));
    if (a.contains("reaction_coordinate")) {
      const auto rc_name = a.at("reaction_coordinate").get<std::string>();
      b.add_reaction_coordinate(idx, rc_name);
      names.push_back(rc_name);
    }
  }
  if (j.contains("partition")) {
    std::vector<int> sys, dem;
    for (const auto& v : j.at("partition").at("system")) sys.push_back(mode_ref(v, names));
    for (const auto& v : j.at("partition").at("demon")) dem.push_back(mode_ref(v, names));
    b.set_partition(std::move(sys), std::move(dem));
  }
  return b.build(j.value("name", std::string("custom")));
}

}  // namespace rcmap::fock
