#include "adkyle/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "adkyle/error.hpp"

namespace adkyle {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be positive and finite, got " << v;
    throw ConfigError(os.str());
  }
}

std::vector<double> expand_noise(const NoiseSpec& noise, std::size_t n, bool& constant) {
  std::vector<double> out;
  if (const double* s = std::get_if<double>(&noise)) {
    require_positive(*s, "noise_sigma");
    out.assign(n, *s);
    constant = true;
    return out;
  }
  const auto& v = std::get<std::vector<double>>(noise);
  if (v.size() != n) {
    throw ConfigError("noise_sigma vector length " + std::to_string(v.size()) +
                      " does not match grid size " + std::to_string(n));
  }
  for (double s : v) require_positive(s, "noise_sigma");
  out = v;
  constant = std::all_of(v.begin(), v.end(), [&](double s) { return s == v.front(); });
  return out;
}

void validate_prior(const std::vector<double>& prior, std::size_t count) {
  if (prior.size() != count) {
    throw ConfigError("prior has " + std::to_string(prior.size()) + " entries for " +
                      std::to_string(count) + " signals");
  }
  double sum = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("prior entries must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "prior must sum to 1, got " << sum;
    throw ConfigError(os.str());
  }
}

}  // namespace

StateGrid::StateGrid(double lo, double hi, std::size_t n) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ConfigError("grid requires finite lo < hi");
  }
  if (n < 3) throw ConfigError("grid requires n >= 3");
  spacing_ = (hi - lo) / static_cast<double>(n - 1);
  points_.resize(n);
  for (std::size_t k = 0; k < n; ++k) points_[k] = lo + spacing_ * static_cast<double>(k);
  points_.back() = hi;
}

std::size_t StateGrid::nearest_index(double x) const {
  if (x <= lo_) return 0;
  if (x >= hi_) return size() - 1;
  auto k = static_cast<std::size_t>(std::llround((x - lo_) / spacing_));
  return std::min(k, size() - 1);
}

std::string kind_name(const DistributionSpec& spec) {
  struct V {
    std::string operator()(const dist::Normal&) const { return "normal"; }
    std::string operator()(const dist::SkewNormal&) const { return "skew-normal"; }
    std::string operator()(const dist::LogNormal&) const { return "lognormal"; }
    std::string operator()(const dist::Tabulated&) const { return "tabulated"; }
    std::string operator()(const dist::DiscreteAtoms&) const { return "discrete-atoms"; }
  };
  return std::visit(V{}, spec);
}

std::vector<double> sample_density(const DistributionSpec& spec, const StateGrid& grid) {
  const std::size_t n = grid.size();
  std::vector<double> out(n, 0.0);

  if (const auto* d = std::get_if<dist::Normal>(&spec)) {
    require_positive(d->sigma, "normal sigma");
    for (std::size_t k = 0; k < n; ++k) out[k] = normal_pdf((grid[k] - d->mu) / d->sigma) / d->sigma;
  } else if (const auto* d = std::get_if<dist::SkewNormal>(&spec)) {
    require_positive(d->scale, "skew-normal scale");
    if (!std::isfinite(d->shape)) throw ConfigError("skew-normal shape must be finite");
    for (std::size_t k = 0; k < n; ++k) {
      const double z = (grid[k] - d->location) / d->scale;
      // Shape zero must reproduce the normal pdf bit for bit.
      out[k] = d->shape == 0.0 ? normal_pdf(z) / d->scale
                               : 2.0 * normal_pdf(z) * normal_cdf(d->shape * z) / d->scale;
    }
  } else if (const auto* d = std::get_if<dist::LogNormal>(&spec)) {
    require_positive(d->mean, "lognormal mean");
    require_positive(d->sigma, "lognormal sigma");
    const double m = std::log(d->mean) - 0.5 * d->sigma * d->sigma;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = grid[k];
      if (x <= 0.0) continue;
      out[k] = normal_pdf((std::log(x) - m) / d->sigma) / (d->sigma * x);
    }
  } else if (const auto* d = std::get_if<dist::Tabulated>(&spec)) {
    if (d->values.size() != n) {
      throw ConfigError("tabulated density has " + std::to_string(d->values.size()) +
                        " values for a grid of " + std::to_string(n));
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double v = d->values[k];
      if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("tabulated values must be nonnegative");
      out[k] = v;
    }
  } else {
    const auto& atoms = std::get<dist::DiscreteAtoms>(spec);
    if (atoms.atoms.empty()) throw ConfigError("discrete-atoms needs at least one atom");
    for (const auto& [x, mass] : atoms.atoms) {
      if (!grid.contains(x)) throw ConfigError("atom outside the grid");
      if (!(mass >= 0.0) || !std::isfinite(mass)) throw ConfigError("atom masses must be nonnegative");
      const std::size_t k = grid.nearest_index(x);
      if (k == 0 || k + 1 == n) throw ConfigError("atoms may not sit on a boundary node");
      out[k] += mass / grid.spacing();
    }
  }
  return out;
}

double trapezoid(std::span<const double> f, double dx) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
  return s * dx;
}

std::vector<double> trapezoid_weights(std::size_t n, double dx) {
  std::vector<double> w(n, dx);
  if (n > 0) {
    w.front() = 0.5 * dx;
    w.back() = 0.5 * dx;
  }
  return w;
}

double SignalModel::integrate(std::span<const double> f) const {
  return trapezoid(f, grid_.spacing());
}

SignalModel SignalModel::with_noise_scaled(double factor) const {
  require_positive(factor, "noise scale factor");
  SignalModel out = *this;
  for (double& s : out.noise_) s *= factor;
  return out;
}

SignalModel SignalModel::from_densities(StateGrid grid, std::vector<std::vector<double>> densities,
                                        std::vector<double> prior, NoiseSpec noise,
                                        bool unit_mass) {
  if (densities.empty()) throw ConfigError("signal model needs at least one signal");
  SignalModel m(std::move(grid));
  const std::size_t n = m.grid_.size();
  for (const auto& d : densities) {
    if (d.size() != n) throw ConfigError("density length does not match grid");
    for (double v : d) {
      if (!std::isfinite(v)) throw ConfigError("density values must be finite");
    }
  }
  validate_prior(prior, densities.size());
  m.noise_ = expand_noise(noise, n, m.constant_noise_);
  m.raw_masses_.reserve(densities.size());
  for (const auto& d : densities) m.raw_masses_.push_back(trapezoid(d, m.grid_.spacing()));
  m.densities_ = std::move(densities);
  m.prior_ = std::move(prior);
  m.unit_mass_ = unit_mass;
  return m;
}

SignalModel build_signal_model(const StateGrid& grid, const std::vector<DistributionSpec>& specs,
                               const std::vector<double>& prior, const NoiseSpec& noise) {
  if (specs.empty()) throw ConfigError("signal model needs at least one signal");
  validate_prior(prior, specs.size());
  SignalModel m(grid);
  m.noise_ = expand_noise(noise, grid.size(), m.constant_noise_);
  for (const auto& spec : specs) {
    std::vector<double> d = sample_density(spec, grid);
    const double mass = trapezoid(d, grid.spacing());
    if (!(mass > 0.0)) {
      throw ConfigError(kind_name(spec) + " density has no mass on the grid");
    }
    for (double& v : d) v /= mass;
    m.raw_masses_.push_back(mass);
    m.densities_.push_back(std::move(d));
  }
  m.prior_ = prior;
  return m;
}

StateGrid default_grid(const std::vector<DistributionSpec>& specs, std::size_t n) {
  if (specs.empty()) throw ConfigError("default grid needs at least one signal");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double max_scale = 0.0;
  for (const auto& s : specs) {
    if (const auto* d = std::get_if<dist::Normal>(&s)) max_scale = std::max(max_scale, d->sigma);
    if (const auto* d = std::get_if<dist::SkewNormal>(&s)) max_scale = std::max(max_scale, d->scale);
  }
  for (const auto& s : specs) {
    if (const auto* d = std::get_if<dist::Normal>(&s)) {
      require_positive(d->sigma, "normal sigma");
      lo = std::min(lo, d->mu - 6.0 * max_scale);
      hi = std::max(hi, d->mu + 6.0 * max_scale);
    } else if (const auto* d = std::get_if<dist::SkewNormal>(&s)) {
      require_positive(d->scale, "skew-normal scale");
      lo = std::min(lo, d->location - 6.0 * max_scale);
      hi = std::max(hi, d->location + 6.0 * max_scale);
    } else if (const auto* d = std::get_if<dist::LogNormal>(&s)) {
      require_positive(d->mean, "lognormal mean");
      require_positive(d->sigma, "lognormal sigma");
      const double m = std::log(d->mean) - 0.5 * d->sigma * d->sigma;
      lo = std::min(lo, std::max(0.0, std::exp(m - 6.0 * d->sigma)));
      hi = std::max(hi, std::exp(m + 6.0 * d->sigma));
    } else {
      throw ConfigError(kind_name(s) + " signals need an explicit grid");
    }
  }
  return StateGrid(lo, hi, n);
}

std::vector<double> uniform_prior(std::size_t count) {
  if (count == 0) throw ConfigError("prior needs at least one signal");
  return std::vector<double>(count, 1.0 / static_cast<double>(count));
}

double prior_mean(const SignalModel& model) {
  const auto& x = model.grid().points();
  std::vector<double> f(x.size());
  double k0 = 0.0;
  for (std::size_t i = 0; i < model.signal_count(); ++i) {
    const auto d = model.density(i);
    for (std::size_t k = 0; k < x.size(); ++k) f[k] = x[k] * d[k];
    k0 += model.prior()[i] * model.integrate(f);
  }
  return k0;
}

SignalModel reweight_to_uniform_prior(const SignalModel& model) {
  const std::size_t count = model.signal_count();
  const double u = 1.0 / static_cast<double>(count);
  for (double p : model.prior()) {
    if (!(p > 0.0)) throw ConfigError("zero prior weight cannot be reweighted to a uniform prior");
  }
  SignalModel out = model;
  bool identity = true;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = model.prior()[i] / u;
    if (r != 1.0) identity = false;
    for (double& v : out.densities_[i]) v *= r;
    out.prior_[i] = u;
  }
  // Uniform priors whose weights differ from 1/I only by rounding stay flagged as unit mass.
  if (!identity) {
    for (std::size_t i = 0; i < count; ++i) {
      if (std::abs(model.prior()[i] - u) > 1e-15) {
        out.unit_mass_ = false;
        break;
      }
    }
  }
  return out;
}

}  // namespace adkyle
