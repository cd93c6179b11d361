#include "rcmap/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <omp.h>

#include "rcmap/dynamics.hpp"
#include "rcmap/error.hpp"
#include "rcmap/set_oracle.hpp"
#include "rcmap/spectral_io.hpp"

namespace rcmap::scenario {

Kind parse_kind(std::string_view name) {
  if (name == "map-sd") return Kind::map_sd;
  if (name == "chain") return Kind::chain;
  if (name == "benchmark-set") return Kind::benchmark_set;
  if (name == "demon-sweep") return Kind::demon_sweep;
  if (name == "report") return Kind::report;
  throw Error("unknown scenario '" + std::string(name) + "'");
}

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::map_sd: return "map-sd";
    case Kind::chain: return "chain";
    case Kind::benchmark_set: return "benchmark-set";
    case Kind::demon_sweep: return "demon-sweep";
    case Kind::report: return "report";
  }
  return "?";
}

Axis parse_axis(std::string_view name) {
  if (name == "delta_s") return Axis::delta_s;
  if (name == "gamma_s") return Axis::gamma_s;
  if (name == "beta_ratio") return Axis::beta_ratio;
  if (name == "beta_gamma") return Axis::beta_gamma;
  throw Error("unknown sweep axis '" + std::string(name) + "' (expected delta_s, gamma_s, beta_ratio or beta_gamma)");
}

std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::delta_s: return "delta_s";
    case Axis::gamma_s: return "gamma_s";
    case Axis::beta_ratio: return "beta_ratio";
    case Axis::beta_gamma: return "beta_gamma";
  }
  return "?";
}

std::vector<double> log_grid(double min, double max, int points_per_decade) {
  if (!(min > 0.0) || !(max > 0.0)) throw Error("sweep bounds must be positive");
  if (!(max >= min)) throw Error("sweep needs min <= max");
  if (points_per_decade < 1) throw Error("points_per_decade must be at least 1");
  const double decades = std::log10(max / min);
  const int intervals = std::max(1, static_cast<int>(std::lround(decades * points_per_decade)));
  std::vector<double> grid;
  if (min == max) return {min};
  const double lmin = std::log10(min);
  for (int i = 0; i <= intervals; ++i) grid.push_back(std::pow(10.0, lmin + decades * i / intervals));
  grid.front() = min;
  grid.back() = max;
  return grid;
}

ScenarioConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  ScenarioConfig c;
  c.base = base;
  if (j.contains("scenario")) c.kind = parse_kind(j.at("scenario").get<std::string>());
  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (m.is_string()) c.model = fock::parse_variant(m.get<std::string>());
    else c.custom_model = m;
  }
  if (j.contains("params")) c.params = fock::demon_params_from_json(j.at("params"), c.params);
  if (j.contains("set")) {
    for (const auto& [key, v] : j.at("set").items()) {
      if (key == "dot_energy") c.set.dot_energy = v.get<double>();
      else if (key == "width") c.set.width = v.get<double>();
      else if (key == "center") c.set.center = v.get<double>();
      else if (key == "beta") c.set.beta = v.get<double>();
      else if (key == "mu_l") c.set.mu_l = v.get<double>();
      else if (key == "mu_r") c.set.mu_r = v.get<double>();
      else if (key == "cutoff") c.set.cutoff = v.get<double>();
      else throw Error("unknown set parameter '" + key + "'");
    }
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    Sweep sw{parse_axis(s.at("axis").get<std::string>()), s.at("min").get<double>(), s.at("max").get<double>(),
             s.value("points_per_decade", 40)};
    log_grid(sw.min, sw.max, sw.points_per_decade);
    c.sweep = sw;
  }
  if (j.contains("flags")) {
    c.flags.lamb_shift = j.at("flags").value("lamb_shift", false);
    c.flags.secular = j.at("flags").value("secular", false);
  }
  c.output = j.value("output", std::string{});
  c.workers = j.value("workers", 0);
  if (j.contains("sd")) c.sd = j.at("sd");
  if (j.contains("method")) {
    const auto m = j.at("method").get<std::string>();
    if (m == "auto") c.map.method = spectral::MapMethod::automatic;
    else if (m == "quadrature") c.map.method = spectral::MapMethod::quadrature;
    else throw Error("unknown mapping method '" + m + "'");
  }
  c.map.grid_points = j.value("grid_points", c.map.grid_points);
  c.steps = j.value("steps", c.steps);
  return c;
}

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string clean(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  }
  return s;
}

int threads(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

// Runs fill(i, row) for every grid index on a worker pool and keeps grid order.
template <class Fill>
void run_grid(Table& t, std::size_t n, int workers, Fill fill) {
  t.rows.assign(n, {});
  std::vector<int> failed(n, 0);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads(workers))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    failed[k] = fill(k, t.rows[k]) ? 0 : 1;
  }
  for (int f : failed) t.failures += f;
}

std::vector<double> sweep_grid(const ScenarioConfig& cfg, double lo, double hi) {
  if (!cfg.sweep) return log_grid(lo, hi, 40);
  return log_grid(cfg.sweep->min, cfg.sweep->max, cfg.sweep->points_per_decade);
}

void apply_axis(fock::DemonParams& p, Axis axis, double value) {
  switch (axis) {
    case Axis::delta_s: p.delta_s = value; break;
    case Axis::gamma_s: p.gamma_s = value; break;
    case Axis::beta_ratio: p.beta_ratio = value; break;
    case Axis::beta_gamma: throw Error("beta_gamma is the benchmark-set axis; demon sweeps use delta_s, gamma_s or beta_ratio");
  }
}

Table demon_sweep(const ScenarioConfig& cfg) {
  if (cfg.custom_model) throw Error("demon-sweep needs a preset model name");
  const Axis axis = cfg.sweep ? cfg.sweep->axis : Axis::delta_s;
  const auto grid = sweep_grid(cfg, 1e-3, 1.0);

  Table t;
  t.header = {"model", "Gamma_S", "Delta_S", "beta_D/beta", "I_M", "I_M/Gamma_S", "I_E", "I_E_ratio",
              "Sigma_dot", "MI", "min_eig",
              "baseline_I_M/Gamma_S", "baseline_I_E_ratio", "baseline_MI",
              "MI_partition", "Sigma_dot_demon", "matter_balance", "energy_balance", "degenerate",
              "eps_s", "eps_d", "U", "V", "beta", "Gamma_D", "Delta_D", "cutoff", "lamb_shift", "secular",
              "error"};
  const auto model_name = std::string(fock::to_string(cfg.model));

  run_grid(t, grid.size(), cfg.workers, [&](std::size_t i, std::vector<std::string>& row) {
    fock::DemonParams p = cfg.params;
    std::string error;
    std::vector<std::string> values(15, "nan");
    try {
      apply_axis(p, axis, grid[i]);
      const auto r = dynamics::solve(fock::build_model(cfg.model, p), cfg.flags);
      const auto b = dynamics::solve(fock::build_model(fock::ModelVariant::dqdmd, p), cfg.flags);
      values = {num(r.demon->matter_current),
                num(r.demon->matter_current / p.gamma_s),
                num(r.demon->energy_current),
                num(r.demon->imbalance_ratio),
                num(r.entropy_production),
                num(r.dot_mutual_information),
                num(r.min_eigenvalue),
                num(b.demon->matter_current / p.gamma_s),
                num(b.demon->imbalance_ratio),
                num(b.dot_mutual_information),
                num(r.mutual_information),
                num(r.demon->entropy_production),
                num(r.matter_balance),
                num(r.energy_balance),
                r.degenerate ? "1" : "0"};
    } catch (const std::exception& e) {
      error = clean(e.what());
    }
    row = {model_name, num(p.gamma_s), num(p.delta_s), num(p.beta_ratio)};
    row.insert(row.end(), values.begin(), values.end());
    for (double v : {p.eps_s, p.eps_d, p.coulomb, p.bias, p.beta, p.gamma_d(), p.delta_d, p.cutoff}) row.push_back(num(v));
    row.push_back(cfg.flags.lamb_shift ? "1" : "0");
    row.push_back(cfg.flags.secular ? "1" : "0");
    row.push_back(error);
    return error.empty();
  });
  return t;
}

set_oracle::SetParams set_params(const SetSettings& s, double beta_gamma) {
  const double gamma = beta_gamma / s.beta;
  set_oracle::Lead left{gamma, s.width, s.center, s.beta, s.mu_l};
  set_oracle::Lead right{gamma, s.width, s.center, s.beta, s.mu_r};
  return {s.dot_energy, left, right, s.cutoff};
}

Table benchmark_set(const ScenarioConfig& cfg) {
  if (cfg.sweep && cfg.sweep->axis != Axis::beta_gamma) throw Error("benchmark-set sweeps beta_gamma");
  const auto grid = sweep_grid(cfg, 1e-3, 10.0);
  Table t;
  t.header = {"beta_Gamma", "I_M_exact", "I_E_exact", "I_M_rcme", "I_E_rcme", "rel_err",
              "I_M_rcme_lamb", "I_E_rcme_lamb", "I_M_rcme_secular", "I_E_rcme_secular", "I_M_rate", "I_E_rate",
              "dot_energy", "width", "center", "beta", "mu_L", "mu_R", "cutoff", "lamb_shift", "secular", "error"};
  run_grid(t, grid.size(), cfg.workers, [&](std::size_t i, std::vector<std::string>& row) {
    const auto p = set_params(cfg.set, grid[i]);
    std::string error;
    std::vector<std::string> values(11, "nan");
    try {
      const auto ex = set_oracle::exact_currents(p);
      const auto rc = set_oracle::build_set_model(p, true);
      const auto bare = set_oracle::build_set_model(p, false);
      const auto main = dynamics::solve(rc, cfg.flags).flow("L");
      const auto lamb = dynamics::solve(rc, {true, cfg.flags.secular}).flow("L");
      const auto sec = dynamics::solve(rc, {cfg.flags.lamb_shift, true}).flow("L");
      const auto rate = dynamics::solve(bare, {false, true}).flow("L");
      values = {num(ex.matter), num(ex.energy), num(main.matter_current), num(main.energy_current),
                num(std::abs(main.matter_current / ex.matter - 1.0)),
                num(lamb.matter_current), num(lamb.energy_current), num(sec.matter_current), num(sec.energy_current),
                num(rate.matter_current), num(rate.energy_current)};
    } catch (const std::exception& e) {
      error = clean(e.what());
    }
    row = {num(grid[i])};
    row.insert(row.end(), values.begin(), values.end());
    for (double v : {p.dot_energy, cfg.set.width, cfg.set.center, cfg.set.beta, cfg.set.mu_l, cfg.set.mu_r, cfg.set.cutoff}) {
      row.push_back(num(v));
    }
    row.push_back(cfg.flags.lamb_shift ? "1" : "0");
    row.push_back(cfg.flags.secular ? "1" : "0");
    row.push_back(error);
    return error.empty();
  });
  return t;
}

Table chain_table(const ScenarioConfig& cfg, int steps) {
  if (!cfg.sd) throw Error("map-sd and chain need an \"sd\" entry");
  const auto sd = spectral::sd_from_json(*cfg.sd, cfg.base);
  Table t;
  t.header = {"n", "lambda", "E", "truncated_weight"};
  std::vector<spectral::RCChainLevel> levels;
  if (steps == 1) levels.push_back(spectral::rc_map(sd, cfg.map));
  else levels = spectral::iterate_chain(sd, steps, cfg.map);
  for (std::size_t n = 0; n < levels.size(); ++n) {
    t.rows.push_back({std::to_string(n), num(levels[n].coupling), num(levels[n].energy), num(levels[n].truncated_weight)});
  }
  return t;
}

}  // namespace

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
}

Table run_scenario(const ScenarioConfig& cfg) {
  switch (cfg.kind) {
    case Kind::map_sd: return chain_table(cfg, 1);
    case Kind::chain: return chain_table(cfg, cfg.steps);
    case Kind::benchmark_set: return benchmark_set(cfg);
    case Kind::demon_sweep: return demon_sweep(cfg);
    case Kind::report: throw Error("the report scenario produces JSON; use run_report");
  }
  throw Error("unhandled scenario");
}

nlohmann::json run_report(const ScenarioConfig& cfg) {
  fock::ImpurityModel model = cfg.custom_model ? fock::model_from_json(*cfg.custom_model, cfg.base)
                                               : fock::build_model(cfg.model, cfg.params);
  const auto report = dynamics::solve(model, cfg.flags);
  auto j = dynamics::to_json(report);
  if (!cfg.custom_model) {
    j["params"] = fock::to_json(cfg.params);
    j["sd_imbalance"] = {{"formula", fock::sd_imbalance(cfg.params)},
                         {"quoted_at_critical_sharpness", 1.18},
                         {"consistent", std::abs(fock::sd_imbalance(cfg.params) - 1.18) < 0.01}};
  }
  return j;
}

}  // namespace rcmap::scenario
