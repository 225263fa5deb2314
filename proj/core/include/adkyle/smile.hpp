#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adkyle/demand.hpp"
#include "adkyle/model.hpp"

namespace adkyle {

struct OptionQuote {
  double strike = 0.0;
  OptionSide side = OptionSide::Call;
  double price = 0.0;
  double forward = 0.0;
  double maturity = 1.0;
  double log_moneyness = 0.0;
};

/// Out-of-the-money quotes (puts below the forward, calls at or above) with
/// r = 0. The kernel is integrated exactly as a piecewise-linear density, so
/// strikes between nodes carry no kink error. Throws ConfigError for strikes
/// outside the grid.
std::vector<OptionQuote> option_prices_from_kernel(std::span<const double> kernel, const StateGrid& grid,
                                                   std::span<const double> strikes, double forward,
                                                   double maturity = 1.0);

/// E[(x - K)+] or E[(K - x)+] under the piecewise-linear kernel.
double kernel_option_price(std::span<const double> kernel, const StateGrid& grid, double strike,
                           OptionSide side);

/// Black price in forward form, r = 0.
double black_price(double forward, double strike, double maturity, double vol, OptionSide side);

/// Bisection on [1e-6, 5] until the bracket is narrower than 1e-12. Throws ConfigError when the
/// price is outside (intrinsic, upper bound) or maturity <= 0.
double implied_vol(const OptionQuote& quote);
std::optional<double> try_implied_vol(const OptionQuote& quote);

struct SmilePoint {
  double log_moneyness = 0.0;
  double strike = 0.0;
  double implied_vol = 0.0;
  double se = 0.0;
  std::size_t n_valid = 0;
};

struct SmileCurve {
  std::vector<SmilePoint> points;
  std::size_t n_realizations = 0;
  double sigma_high = 0.0;
  double forward = 0.0;
  std::vector<double> dropped_strikes;
  std::size_t invalid_quotes = 0;
};

struct SmileOptions {
  std::size_t high_vol_signal = 0;
  std::size_t n_realizations = 1000;
  std::size_t n_strikes = 61;
  double maturity = 1.0;
  double lower_quantile = 0.01;
  double upper_quantile = 0.99;
  std::uint64_t seed = 42;
  double sigma_high = 0.0;  // label only
};

/// Log-moneyness grid with step h = (k_hi - k_lo)/(n_strikes - 1) aligned so
/// that 0 is a node; k_lo, k_hi are the quantile strikes of `density`.
std::vector<double> smile_strikes(std::span<const double> density, const StateGrid& grid, double forward,
                                  const SmileOptions& opt);

/// Averages Black vols over realizations of the equilibrium posterior given
/// the high-vol signal. Strikes with fewer than half valid quotes are dropped.
SmileCurve insider_smile(const SignalModel& model, double alpha_star, const SmileOptions& opt);

/// (v(h) - 2 v(0) + v(-h)) / h^2 at the zero log-moneyness point. Throws if
/// the curve has no interior zero point.
double atm_curvature(const SmileCurve& curve);

/// Index of the minimum implied vol.
std::size_t smile_argmin(const SmileCurve& curve);

}  // namespace adkyle
