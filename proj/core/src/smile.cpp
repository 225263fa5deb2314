#include "adkyle/smile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adkyle/equilibrium.hpp"
#include "adkyle/error.hpp"
#include "adkyle/market.hpp"
#include "adkyle/rng.hpp"

namespace adkyle {

namespace {

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// int_a^b (x - K) f(x) dx with f linear through (a, fa), (b, fb).
double linear_moment(double a, double b, double fa, double fb, double k, double x0, double x1) {
  // f(x) = fa + s (x - a) on [x0, x1] within [a, b].
  const double s = (fb - fa) / (b - a);
  const double c0 = fa - s * a;  // f(x) = c0 + s x
  auto prim = [&](double x) {
    // int (x - K)(c0 + s x) dx = s x^3/3 + (c0 - K s) x^2/2 - K c0 x
    return s * x * x * x / 3.0 + (c0 - k * s) * x * x / 2.0 - k * c0 * x;
  };
  return prim(x1) - prim(x0);
}

}  // namespace

double kernel_option_price(std::span<const double> kernel, const StateGrid& grid, double strike,
                           OptionSide side) {
  const std::size_t n = grid.size();
  if (kernel.size() != n) throw ConfigError("kernel length does not match grid");
  if (!grid.contains(strike)) throw ConfigError("strike outside the grid");
  double v = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = grid[k];
    const double b = grid[k + 1];
    if (side == OptionSide::Call) {
      if (b <= strike) continue;
      const double x0 = std::max(a, strike);
      v += linear_moment(a, b, kernel[k], kernel[k + 1], strike, x0, b);
    } else {
      if (a >= strike) break;
      const double x1 = std::min(b, strike);
      v -= linear_moment(a, b, kernel[k], kernel[k + 1], strike, a, x1);
    }
  }
  return v;
}

std::vector<OptionQuote> option_prices_from_kernel(std::span<const double> kernel, const StateGrid& grid,
                                                   std::span<const double> strikes, double forward,
                                                   double maturity) {
  std::vector<OptionQuote> out;
  out.reserve(strikes.size());
  for (double k : strikes) {
    OptionQuote q;
    q.strike = k;
    q.forward = forward;
    q.maturity = maturity;
    q.side = k < forward ? OptionSide::Put : OptionSide::Call;
    q.price = kernel_option_price(kernel, grid, k, q.side);
    q.log_moneyness = (k > 0.0 && forward > 0.0) ? std::log(k / forward) : std::nan("");
    out.push_back(q);
  }
  return out;
}

double black_price(double forward, double strike, double maturity, double vol, OptionSide side) {
  const double sd = vol * std::sqrt(maturity);
  if (!(sd > 0.0)) {
    return side == OptionSide::Call ? std::max(forward - strike, 0.0) : std::max(strike - forward, 0.0);
  }
  const double d1 = (std::log(forward / strike) + 0.5 * sd * sd) / sd;
  const double d2 = d1 - sd;
  if (side == OptionSide::Call) return forward * norm_cdf(d1) - strike * norm_cdf(d2);
  return strike * norm_cdf(-d2) - forward * norm_cdf(-d1);
}

std::optional<double> try_implied_vol(const OptionQuote& q) {
  if (!(q.maturity > 0.0) || !(q.forward > 0.0) || !(q.strike > 0.0)) return std::nullopt;
  const double intrinsic =
      q.side == OptionSide::Call ? std::max(q.forward - q.strike, 0.0) : std::max(q.strike - q.forward, 0.0);
  const double upper = q.side == OptionSide::Call ? q.forward : q.strike;
  if (!(q.price > intrinsic) || !(q.price < upper)) return std::nullopt;
  double lo = 1e-6;
  double hi = 5.0;
  if (q.price <= black_price(q.forward, q.strike, q.maturity, lo, q.side)) return lo;
  if (q.price >= black_price(q.forward, q.strike, q.maturity, hi, q.side)) return std::nullopt;
  // Width 1e-12 keeps the price error far below 1e-8 for any vega on [1e-6, 5].
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (black_price(q.forward, q.strike, q.maturity, mid, q.side) < q.price) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mid = 0.5 * (lo + hi);
  return mid;
}

double implied_vol(const OptionQuote& quote) {
  if (!(quote.maturity > 0.0)) throw ConfigError("maturity must be positive");
  auto v = try_implied_vol(quote);
  if (!v) throw ConfigError("option price outside arbitrage bounds");
  return *v;
}

std::vector<double> smile_strikes(std::span<const double> density, const StateGrid& grid, double forward,
                                  const SmileOptions& opt) {
  const std::size_t n = grid.size();
  if (density.size() != n) throw ConfigError("density length does not match grid");
  if (opt.n_strikes < 3) throw ConfigError("smile needs at least three strikes");
  if (!(opt.lower_quantile > 0.0 && opt.lower_quantile < opt.upper_quantile && opt.upper_quantile < 1.0)) {
    throw ConfigError("smile quantiles must satisfy 0 < lower < upper < 1");
  }
  if (!(forward > 0.0)) throw ConfigError("smile needs a positive forward");
  // Cumulative trapezoid mass, normalized.
  std::vector<double> cdf(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) cdf[k] = cdf[k - 1] + 0.5 * (density[k - 1] + density[k]) * grid.spacing();
  const double total = cdf.back();
  if (!(total > 0.0)) throw ConfigError("high-vol density has no mass");
  auto quantile = [&](double u) {
    const double target = u * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    const std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - cdf.begin()));
    const double t = (target - cdf[k - 1]) / (cdf[k] - cdf[k - 1]);
    return grid[k - 1] + t * grid.spacing();
  };
  const double klo = std::log(std::max(quantile(opt.lower_quantile), grid.spacing()) / forward);
  const double khi = std::log(quantile(opt.upper_quantile) / forward);
  if (!(klo < 0.0 && khi > 0.0)) throw ConfigError("forward lies outside the smile quantile range");
  const double h = (khi - klo) / static_cast<double>(opt.n_strikes - 1);
  const auto m0 = static_cast<long long>(std::ceil(klo / h - 1e-9));
  const auto m1 = static_cast<long long>(std::floor(khi / h + 1e-9));
  std::vector<double> ks;
  for (long long m = m0; m <= m1; ++m) {
    const double strike = forward * std::exp(static_cast<double>(m) * h);
    if (strike > grid.lo() && strike < grid.hi()) ks.push_back(strike);
  }
  return ks;
}

SmileCurve insider_smile(const SignalModel& model, double alpha_star, const SmileOptions& opt) {
  const std::size_t count = model.signal_count();
  if (count < 2) throw ConfigError("I must be ≥ 2");
  if (opt.high_vol_signal >= count) throw ConfigError("high-vol signal out of range");
  if (opt.n_realizations < 1) throw ConfigError("need at least one realization");
  if (!(opt.maturity > 0.0)) throw ConfigError("maturity must be positive");

  SmileCurve curve;
  curve.n_realizations = opt.n_realizations;
  curve.sigma_high = opt.sigma_high;
  curve.forward = prior_mean(model);
  const auto strikes = smile_strikes(model.density(opt.high_vol_signal), model.grid(), curve.forward, opt);
  const std::size_t m = strikes.size();

  std::vector<std::vector<double>> vols(opt.n_realizations, std::vector<double>(m, std::nan("")));
  parallel_for(opt.n_realizations, [&](std::size_t r) {
    RngStream rng(derive_seed(opt.seed, {r}));
    const auto q = sample_canonical_posterior(alpha_star, static_cast<int>(count), opt.high_vol_signal, rng);
    const auto kernel = pricing_kernel(q, model);
    const auto quotes = option_prices_from_kernel(kernel, model.grid(), strikes, curve.forward, opt.maturity);
    for (std::size_t a = 0; a < m; ++a) {
      if (auto v = try_implied_vol(quotes[a])) vols[r][a] = *v;
    }
  });

  for (std::size_t a = 0; a < m; ++a) {
    long double s = 0.0L, s2 = 0.0L;
    std::size_t valid = 0;
    for (std::size_t r = 0; r < opt.n_realizations; ++r) {
      const double v = vols[r][a];
      if (std::isnan(v)) {
        ++curve.invalid_quotes;
        continue;
      }
      s += v;
      s2 += static_cast<long double>(v) * v;
      ++valid;
    }
    if (2 * valid < opt.n_realizations) {
      curve.dropped_strikes.push_back(strikes[a]);
      continue;
    }
    SmilePoint pt;
    pt.strike = strikes[a];
    pt.log_moneyness = std::log(strikes[a] / curve.forward);
    pt.n_valid = valid;
    const long double nv = static_cast<long double>(valid);
    const long double mean = s / nv;
    long double var = valid > 1 ? (s2 - nv * mean * mean) / (nv - 1.0L) : 0.0L;
    if (var < 0.0L) var = 0.0L;
    pt.implied_vol = static_cast<double>(mean);
    pt.se = static_cast<double>(std::sqrt(var / nv));
    curve.points.push_back(pt);
  }
  return curve;
}

double atm_curvature(const SmileCurve& curve) {
  const auto& p = curve.points;
  for (std::size_t a = 1; a + 1 < p.size(); ++a) {
    if (std::abs(p[a].log_moneyness) < 1e-9) {
      const double h1 = p[a].log_moneyness - p[a - 1].log_moneyness;
      const double h2 = p[a + 1].log_moneyness - p[a].log_moneyness;
      const double d1 = (p[a].implied_vol - p[a - 1].implied_vol) / h1;
      const double d2 = (p[a + 1].implied_vol - p[a].implied_vol) / h2;
      return 2.0 * (d2 - d1) / (h1 + h2);
    }
  }
  throw NumericalError("smile has no interior at-the-money point");
}

std::size_t smile_argmin(const SmileCurve& curve) {
  if (curve.points.empty()) throw NumericalError("smile is empty");
  std::size_t best = 0;
  for (std::size_t a = 1; a < curve.points.size(); ++a) {
    if (curve.points[a].implied_vol < curve.points[best].implied_vol) best = a;
  }
  return best;
}

}  // namespace adkyle
