#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adkyle/model_io.hpp"

namespace adkyle {

/// Two normals with different means and a common scale.
ModelConfig mean_example_config(double mu_high = 1.0, double mu_low = -1.0, double sigma = 1.0);

/// Two normals with a common mean; signal 1 is the high-volatility one.
ModelConfig vol_example_config(double mean = 0.0, double sigma_high = 2.0, double sigma_low = 1.0);

/// Two skew-normals with shapes +shape (signal 1, right skew) and -shape,
/// locations shifted so both have mean `mean`.
ModelConfig skew_example_config(double mean = 0.0, double scale = 1.0, double shape = 4.0);

/// Two log-normals with a common mean `forward`; signal 1 has log-vol
/// sigma_high. Grid [0, grid_hi] with n nodes.
ModelConfig lognormal_vol_config(double forward, double sigma_high, double sigma_low, double grid_hi = 6.0,
                                 std::size_t n = 3001, double noise = 1.0);

/// Smile experiment: one log-normal model per entry of sigma_high.
struct SmileExperiment {
  double forward = 1.0;
  double sigma_low = 0.15;
  std::vector<double> sigma_high{0.25, 0.3, 0.35};
  std::size_t realizations = 1000;
  double maturity = 1.0;
  std::size_t strikes = 61;
  double grid_hi = 6.0;
  std::size_t grid_n = 3001;
  double noise_sigma = 1.0;
  std::optional<std::uint64_t> seed;

  ModelConfig model(std::size_t curve) const;
};

/// Fields as named above; all optional. Throws ConfigError.
SmileExperiment parse_smile_experiment(const std::string& json_text);

/// Names accepted by `--example`: kyle_options, vol, skew.
ModelConfig example_config(const std::string& name);

}  // namespace adkyle
