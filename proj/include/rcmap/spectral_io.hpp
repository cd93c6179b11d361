#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include <json.hpp>

#include "rcmap/spectral.hpp"

namespace rcmap::spectral {

/// Two-column CSV (omega, J) with a one-line header.
SpectralDensity read_tabulated_csv(std::istream& in);
SpectralDensity read_tabulated_csv(const std::filesystem::path& path);

/// Writes the tabulated nodes, or samples any other kind on `grid`.
void write_tabulated_csv(std::ostream& out, const SpectralDensity& sd,
                         std::span<const double> grid = {});

/// Chain coefficients as CSV with columns n, lambda, E.
void write_chain_csv(std::ostream& out, std::span<const RCChainLevel> levels);

/// {"kind": "lorentzian", "gamma", "width", "center", "cutoff"?}
/// {"kind": "flat", "height", "lower"?, "upper"?}     (bounds default to +-inf)
/// {"kind": "semicircle", "center", "radius"}
/// {"kind": "tabulated", "file"} or {"kind": "tabulated", "omega": [...], "values": [...]}
/// Relative "file" paths resolve against `base`.
SpectralDensity sd_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
nlohmann::json sd_to_json(const SpectralDensity& sd);

}  // namespace rcmap::spectral
