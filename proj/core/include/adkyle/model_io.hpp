#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adkyle/model.hpp"

namespace adkyle {

/// Parsed form of a model file, before grid sampling.
struct ModelConfig {
  std::optional<StateGrid> grid;  // absent: default_grid(specs)
  std::vector<DistributionSpec> specs;
  std::vector<double> prior;  // empty: uniform
  NoiseSpec noise = 1.0;

  SignalModel build() const;
};

/// Schema:
///   {"grid": {"lo", "hi", "n"},
///    "signals": [{"kind": "normal", "mu", "sigma"},
///                {"kind": "skew-normal", "location", "scale", "shape"},
///                {"kind": "lognormal", "mean", "sigma"},
///                {"kind": "tabulated", "values": [...]},
///                {"kind": "discrete-atoms", "atoms": [[x, mass], ...]}],
///    "prior": [...], "noise_sigma": number | [...]}
/// Only "signals" is required. Throws ConfigError on malformed input.
ModelConfig parse_model_config(std::string_view json_text);
ModelConfig load_model_config(const std::filesystem::path& path);

std::string to_json(const ModelConfig& config);

}  // namespace adkyle
