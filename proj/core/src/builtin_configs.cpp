#include "adkyle/builtin_configs.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "adkyle/error.hpp"

namespace adkyle {

ModelConfig mean_example_config(double mu_high, double mu_low, double sigma) {
  ModelConfig c;
  c.specs = {dist::Normal{mu_high, sigma}, dist::Normal{mu_low, sigma}};
  return c;
}

ModelConfig vol_example_config(double mean, double sigma_high, double sigma_low) {
  ModelConfig c;
  c.specs = {dist::Normal{mean, sigma_high}, dist::Normal{mean, sigma_low}};
  return c;
}

ModelConfig skew_example_config(double mean, double scale, double shape) {
  // Skew-normal mean: location + scale * delta * sqrt(2/pi), delta = a / sqrt(1 + a^2).
  const double delta = shape / std::sqrt(1.0 + shape * shape);
  const double shift = scale * delta * std::sqrt(2.0 / std::numbers::pi);
  ModelConfig c;
  c.specs = {dist::SkewNormal{mean - shift, scale, shape}, dist::SkewNormal{mean + shift, scale, -shape}};
  return c;
}

ModelConfig lognormal_vol_config(double forward, double sigma_high, double sigma_low, double grid_hi,
                                 std::size_t n, double noise) {
  ModelConfig c;
  c.grid.emplace(0.0, grid_hi, n);
  c.specs = {dist::LogNormal{forward, sigma_high}, dist::LogNormal{forward, sigma_low}};
  c.noise = noise;
  return c;
}

ModelConfig SmileExperiment::model(std::size_t curve) const {
  return lognormal_vol_config(forward, sigma_high.at(curve), sigma_low, grid_hi, grid_n, noise_sigma);
}

SmileExperiment parse_smile_experiment(const std::string& json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("smile config must hold a JSON object");
  SmileExperiment e;
  auto num = [&](const char* key, double& out) {
    if (!doc.contains(key)) return;
    if (!doc.at(key).is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
    out = doc.at(key).get<double>();
  };
  auto count = [&](const char* key, std::size_t& out) {
    if (!doc.contains(key)) return;
    if (!doc.at(key).is_number_unsigned()) throw ConfigError(std::string("\"") + key + "\" must be a positive integer");
    out = doc.at(key).get<std::size_t>();
  };
  num("forward", e.forward);
  num("sigma_low", e.sigma_low);
  num("maturity", e.maturity);
  num("grid_hi", e.grid_hi);
  num("noise_sigma", e.noise_sigma);
  count("realizations", e.realizations);
  count("strikes", e.strikes);
  count("grid_n", e.grid_n);
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw ConfigError("\"seed\" must be a nonnegative integer");
    e.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("sigma_high")) {
    const json& v = doc.at("sigma_high");
    if (!v.is_array() || v.empty()) throw ConfigError("\"sigma_high\" must be a nonempty array");
    e.sigma_high.clear();
    for (const json& s : v) {
      if (!s.is_number()) throw ConfigError("\"sigma_high\" must hold numbers");
      e.sigma_high.push_back(s.get<double>());
    }
  }
  if (!(e.forward > 0.0) || !(e.sigma_low > 0.0) || !(e.maturity > 0.0) || !(e.grid_hi > e.forward)) {
    throw ConfigError("smile config needs forward > 0, sigma_low > 0, maturity > 0, grid_hi > forward");
  }
  for (double s : e.sigma_high) {
    if (!(s > 0.0)) throw ConfigError("sigma_high entries must be positive");
  }
  if (e.realizations < 1) throw ConfigError("realizations must be positive");
  return e;
}

ModelConfig example_config(const std::string& name) {
  if (name == "kyle_options" || name == "mean") return mean_example_config();
  if (name == "vol") return vol_example_config();
  if (name == "skew") return skew_example_config();
  throw ConfigError("unknown example \"" + name + "\" (kyle_options, vol, skew)");
}

}  // namespace adkyle
