#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcmap/error.hpp"
#include "rcmap/scenario.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string sd_file;
  int workers = -1;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON scenario configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output file (default: config \"output\" or stdout)");
  cmd->add_option("--workers", o.workers, "worker threads for grid points (0 = all cores)")->check(CLI::NonNegativeNumber);
}

rcmap::scenario::ScenarioConfig load(const std::string& name, const Options& o) {
  nlohmann::json j = nlohmann::json::object();
  std::filesystem::path base;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    j = nlohmann::json::parse(in, nullptr, true, true);
    base = std::filesystem::path(o.config).parent_path();
  }
  j["scenario"] = name;
  if (!o.sd_file.empty()) j["sd"] = {{"kind", "tabulated"}, {"file", std::filesystem::absolute(o.sd_file).string()}};
  auto cfg = rcmap::scenario::config_from_json(j, base);
  if (!o.out.empty()) cfg.output = o.out;
  if (o.workers >= 0) cfg.workers = o.workers;
  return cfg;
}

template <class Write>
void emit(const std::string& path, Write write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw rcmap::Error("cannot write " + path);
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reaction-coordinate mapping and steady-state transport for fermionic impurity models"};
  app.require_subcommand(1);

  Options o;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"map-sd", "one reaction-coordinate step of a spectral density (CSV)"},
      {"chain", "iterated chain coefficients (CSV)"},
      {"benchmark-set", "single-dot transistor: exact vs reaction-coordinate master equation currents"},
      {"demon-sweep", "demon presets over a log-spaced parameter sweep"},
      {"report", "steady-state report of one model as JSON"},
  };
  for (const auto& s : subs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, o);
    if (std::string(s.name) == "map-sd" || std::string(s.name) == "chain") {
      cmd->add_option("--sd", o.sd_file, "two-column CSV (omega, J) with a header line")->check(CLI::ExistingFile);
    }
  }

  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    const auto cfg = load(name, o);
    if (cfg.kind == rcmap::scenario::Kind::report) {
      const auto j = rcmap::scenario::run_report(cfg);
      emit(cfg.output, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
      return 0;
    }
    const auto table = rcmap::scenario::run_scenario(cfg);
    emit(cfg.output, [&](std::ostream& out) { table.write_csv(out); });
    if (table.failures > 0) {
      std::fprintf(stderr, "%d of %zu grid points failed; see the error column\n", table.failures, table.rows.size());
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rcmap: %s\n", e.what());
    return 2;
  }
}
