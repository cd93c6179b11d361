#include "rcmap/spectral_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "rcmap/error.hpp"

namespace rcmap::spectral {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double bound(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  const auto& v = j.at(key);
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    throw Error("bad bound '" + s + "'");
  }
  return v.get<double>();
}

}  // namespace

SpectralDensity read_tabulated_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("tabulated SD csv is empty");
  std::vector<double> omega, values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double w = 0.0, j = 0.0;
    if (!(fields >> w >> j)) throw Error("tabulated SD csv: malformed row " + std::to_string(row));
    omega.push_back(w);
    values.push_back(j);
  }
  return SpectralDensity::tabulated(std::move(omega), std::move(values));
}

SpectralDensity read_tabulated_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_tabulated_csv(in);
}

void write_tabulated_csv(std::ostream& out, const SpectralDensity& sd, std::span<const double> grid) {
  out << "omega,J\n" << std::setprecision(17);
  if (const auto* t = sd.as<Tabulated>(); t != nullptr && grid.empty()) {
    for (std::size_t i = 0; i < t->size(); ++i) out << t->omega()[i] << ',' << t->values()[i] << '\n';
    return;
  }
  if (grid.empty()) throw Error("writing a " + sd.kind_name() + " SD as csv needs a sampling grid");
  for (double w : grid) out << w << ',' << sd(w) << '\n';
}

void write_chain_csv(std::ostream& out, std::span<const RCChainLevel> levels) {
  out << "n,lambda,E\n" << std::setprecision(17);
  for (std::size_t n = 0; n < levels.size(); ++n) {
    out << n << ',' << levels[n].coupling << ',' << levels[n].energy << '\n';
  }
}

SpectralDensity sd_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "lorentzian") {
    return SpectralDensity::lorentzian(j.at("gamma").get<double>(), j.at("width").get<double>(),
                                       j.at("center").get<double>(), j.value("cutoff", 50.0));
  }
  if (kind == "flat") {
    return SpectralDensity::flat(j.at("height").get<double>(), bound(j, "lower", -kInf),
                                 bound(j, "upper", kInf));
  }
  if (kind == "semicircle") {
    return SpectralDensity::semicircle(j.at("center").get<double>(), j.at("radius").get<double>());
  }
  if (kind == "tabulated") {
    if (j.contains("file")) {
      std::filesystem::path p = j.at("file").get<std::string>();
      if (p.is_relative() && !base.empty()) p = base / p;
      return read_tabulated_csv(p);
    }
    return SpectralDensity::tabulated(j.at("omega").get<std::vector<double>>(),
                                      j.at("values").get<std::vector<double>>());
  }
  throw Error("unknown spectral density kind '" + kind + "'");
}

nlohmann::json sd_to_json(const SpectralDensity& sd) {
  auto finite_or_string = [](double x) -> nlohmann::json {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
  };
  nlohmann::json j;
  j["kind"] = sd.kind_name();
  if (const auto* l = sd.as<Lorentzian>()) {
    j["gamma"] = l->gamma;
    j["width"] = l->width;
    j["center"] = l->center;
    j["cutoff"] = l->cutoff;
  } else if (const auto* f = sd.as<Flat>()) {
    j["height"] = f->height;
    j["lower"] = finite_or_string(f->lower);
    j["upper"] = finite_or_string(f->upper);
  } else if (const auto* s = sd.as<Semicircle>()) {
    j["center"] = s->center;
    j["radius"] = s->radius;
  } else {
    const auto& t = std::get<Tabulated>(sd.kind());
    j["omega"] = std::vector<double>(t.omega().begin(), t.omega().end());
    j["values"] = std::vector<double>(t.values().begin(), t.values().end());
  }
  return j;
}

}  // namespace rcmap::spectral
