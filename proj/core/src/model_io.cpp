#include "adkyle/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adkyle/error.hpp"

namespace adkyle {

namespace {

using nlohmann::json;

double number_field(const json& obj, const char* key) {
  if (!obj.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

std::vector<double> number_array(const json& v, const char* key) {
  if (!v.is_array()) throw ConfigError(std::string("field \"") + key + "\" must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(std::string("field \"") + key + "\" must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

DistributionSpec parse_signal(const json& s) {
  if (!s.is_object() || !s.contains("kind") || !s.at("kind").is_string()) {
    throw ConfigError("each signal needs a string \"kind\"");
  }
  const std::string kind = s.at("kind").get<std::string>();
  if (kind == "normal") return dist::Normal{number_field(s, "mu"), number_field(s, "sigma")};
  if (kind == "skew-normal") {
    return dist::SkewNormal{number_field(s, "location"), number_field(s, "scale"),
                            number_field(s, "shape")};
  }
  if (kind == "lognormal") return dist::LogNormal{number_field(s, "mean"), number_field(s, "sigma")};
  if (kind == "tabulated") {
    if (!s.contains("values")) throw ConfigError("missing field \"values\"");
    return dist::Tabulated{number_array(s.at("values"), "values")};
  }
  if (kind == "discrete-atoms") {
    if (!s.contains("atoms") || !s.at("atoms").is_array()) {
      throw ConfigError("discrete-atoms needs an \"atoms\" array");
    }
    dist::DiscreteAtoms d;
    for (const json& a : s.at("atoms")) {
      auto pair = number_array(a, "atoms");
      if (pair.size() != 2) throw ConfigError("each atom is a [state, mass] pair");
      d.atoms.emplace_back(pair[0], pair[1]);
    }
    return d;
  }
  throw ConfigError("unknown signal kind \"" + kind + "\"");
}

}  // namespace

SignalModel ModelConfig::build() const {
  const StateGrid g = grid ? *grid : default_grid(specs);
  const std::vector<double> p = prior.empty() ? uniform_prior(specs.size()) : prior;
  return build_signal_model(g, specs, p, noise);
}

ModelConfig parse_model_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("model file must hold a JSON object");

  ModelConfig cfg;
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    if (!g.is_object()) throw ConfigError("\"grid\" must be an object");
    const double n = number_field(g, "n");
    if (n < 0 || n != static_cast<double>(static_cast<long long>(n))) {
      throw ConfigError("grid n must be a nonnegative integer");
    }
    cfg.grid.emplace(number_field(g, "lo"), number_field(g, "hi"), static_cast<std::size_t>(n));
  }
  if (!doc.contains("signals") || !doc.at("signals").is_array() || doc.at("signals").empty()) {
    throw ConfigError("\"signals\" must be a nonempty array");
  }
  for (const json& s : doc.at("signals")) cfg.specs.push_back(parse_signal(s));
  if (doc.contains("prior")) cfg.prior = number_array(doc.at("prior"), "prior");
  if (doc.contains("noise_sigma")) {
    const json& v = doc.at("noise_sigma");
    if (v.is_number()) {
      cfg.noise = v.get<double>();
    } else {
      cfg.noise = number_array(v, "noise_sigma");
    }
  }
  return cfg;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_model_config(os.str());
}

std::string to_json(const ModelConfig& config) {
  json doc;
  if (config.grid) {
    doc["grid"] = {{"lo", config.grid->lo()}, {"hi", config.grid->hi()}, {"n", config.grid->size()}};
  }
  json signals = json::array();
  for (const auto& spec : config.specs) {
    json s;
    s["kind"] = kind_name(spec);
    if (const auto* d = std::get_if<dist::Normal>(&spec)) {
      s["mu"] = d->mu;
      s["sigma"] = d->sigma;
    } else if (const auto* d = std::get_if<dist::SkewNormal>(&spec)) {
      s["location"] = d->location;
      s["scale"] = d->scale;
      s["shape"] = d->shape;
    } else if (const auto* d = std::get_if<dist::LogNormal>(&spec)) {
      s["mean"] = d->mean;
      s["sigma"] = d->sigma;
    } else if (const auto* d = std::get_if<dist::Tabulated>(&spec)) {
      s["values"] = d->values;
    } else {
      json atoms = json::array();
      for (const auto& [x, m] : std::get<dist::DiscreteAtoms>(spec).atoms) atoms.push_back({x, m});
      s["atoms"] = atoms;
    }
    signals.push_back(s);
  }
  doc["signals"] = signals;
  if (!config.prior.empty()) doc["prior"] = config.prior;
  std::visit([&](const auto& v) { doc["noise_sigma"] = v; }, config.noise);
  return doc.dump(2);
}

}  // namespace adkyle
