#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace adkyle {

/// Uniform grid over the state interval [lo, hi] with n >= 3 nodes.
class StateGrid {
 public:
  StateGrid(double lo, double hi, std::size_t n);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t size() const { return points_.size(); }
  double spacing() const { return spacing_; }
  double operator[](std::size_t k) const { return points_[k]; }
  const std::vector<double>& points() const { return points_; }

  /// Index of the node closest to x (clamped to the grid).
  std::size_t nearest_index(double x) const;
  bool contains(double x) const { return x >= lo_ && x <= hi_; }

  friend bool operator==(const StateGrid&, const StateGrid&) = default;

 private:
  double lo_;
  double hi_;
  double spacing_;
  std::vector<double> points_;
};

namespace dist {

struct Normal {
  double mu;
  double sigma;
};

struct SkewNormal {
  double location;
  double scale;
  double shape;
};

// Log-normal with the given mean and log-volatility (unit horizon), i.e. the
// Black-Scholes terminal law of a forward equal to `mean`.
struct LogNormal {
  double mean;
  double sigma;
};

struct Tabulated {
  std::vector<double> values;
};

// Point masses; each atom is placed on the nearest grid node as a
// single-cell mass (value mass / spacing). Atoms may not sit on the two
// boundary nodes.
struct DiscreteAtoms {
  std::vector<std::pair<double, double>> atoms;  // (state, mass)
};

}  // namespace dist

using DistributionSpec =
    std::variant<dist::Normal, dist::SkewNormal, dist::LogNormal,
                 dist::Tabulated, dist::DiscreteAtoms>;

std::string kind_name(const DistributionSpec& spec);

/// Noise trading intensity: a constant or one value per grid node.
using NoiseSpec = std::variant<double, std::vector<double>>;

/// Raw (unnormalized) density values of `spec` at the grid nodes.
std::vector<double> sample_density(const DistributionSpec& spec,
                                   const StateGrid& grid);

// Trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> f, double dx);
std::vector<double> trapezoid_weights(std::size_t n, double dx);

/// Payoff densities on a state grid, the market maker's prior over the
/// signals and the noise trading intensity. Immutable once built.
class SignalModel {
 public:
  const StateGrid& grid() const { return grid_; }
  std::size_t signal_count() const { return densities_.size(); }
  std::span<const double> density(std::size_t i) const { return densities_.at(i); }
  const std::vector<std::vector<double>>& densities() const { return densities_; }
  const std::vector<double>& prior() const { return prior_; }

  /// sigma(x_k) at every node.
  const std::vector<double>& noise_sigma() const { return noise_; }
  bool constant_noise() const { return constant_noise_; }

  /// Trapezoid mass of each density before renormalization.
  const std::vector<double>& raw_masses() const { return raw_masses_; }

  /// False once densities were rescaled (reweight_to_uniform_prior); the
  /// unit-mass invariant is then suspended.
  bool unit_mass() const { return unit_mass_; }

  double integrate(std::span<const double> f) const;

  /// Same densities and prior, noise multiplied by `factor`.
  SignalModel with_noise_scaled(double factor) const;

  /// Assemble from already-sampled densities. Densities are taken as-is;
  /// validation covers shapes, prior and noise.
  static SignalModel from_densities(StateGrid grid,
                                    std::vector<std::vector<double>> densities,
                                    std::vector<double> prior, NoiseSpec noise,
                                    bool unit_mass = true);

 private:
  SignalModel(StateGrid grid) : grid_(std::move(grid)) {}

  StateGrid grid_;
  std::vector<std::vector<double>> densities_;
  std::vector<double> prior_;
  std::vector<double> noise_;
  std::vector<double> raw_masses_;
  bool constant_noise_ = true;
  bool unit_mass_ = true;

  friend SignalModel build_signal_model(const StateGrid&,
                                        const std::vector<DistributionSpec>&,
                                        const std::vector<double>&,
                                        const NoiseSpec&);
  friend SignalModel reweight_to_uniform_prior(const SignalModel&);
};

/// Samples every spec on the grid and renormalizes to unit trapezoid mass.
/// Throws ConfigError on empty specs, nonpositive scales, a tabulated
/// length mismatch, a bad prior or nonpositive noise.
SignalModel build_signal_model(const StateGrid& grid,
                               const std::vector<DistributionSpec>& specs,
                               const std::vector<double>& prior,
                               const NoiseSpec& noise);

/// Default grid: [min location - 6 max scale, max location + 6 max scale]
/// (log-normals use their 6-sigma log range, floored at 0).
StateGrid default_grid(const std::vector<DistributionSpec>& specs,
                       std::size_t n = 1601);

std::vector<double> uniform_prior(std::size_t count);

/// K0 = sum_i prior_i * integral of x eta_i(x) dx.
double prior_mean(const SignalModel& model);

/// Uniform prior with densities scaled by prior_i / (1/I). Rejects
/// zero prior weights.
SignalModel reweight_to_uniform_prior(const SignalModel& model);

}  // namespace adkyle
