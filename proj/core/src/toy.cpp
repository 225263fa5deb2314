#include "adkyle/toy.hpp"

#include <algorithm>
#include <cmath>

#include "adkyle/error.hpp"
#include "adkyle/market.hpp"
#include "adkyle/rng.hpp"

namespace adkyle {

namespace {

// 1 / (1 + e^{-z}) without overflow.
double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double toy_delta(const ToyOrderFlow& omega) { return 2.0 * (omega[0] + omega[2] - omega[1]); }

double toy_posterior_s1(double alpha, const ToyOrderFlow& omega) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  return logistic(alpha * toy_delta(omega));
}

std::array<double, 3> toy_prices(double alpha, const ToyOrderFlow& omega) {
  const double z = alpha * toy_delta(omega);
  const double p1 = toy_posterior_s1(alpha, omega);
  const double p2 = logistic(-z);
  return {0.5 * p1, p2, 0.5 * p1};
}

McEstimate toy_expected_profit(double alpha, const McConfig& mc) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  mc.validate();
  const std::size_t units = mc.antithetic ? (mc.n_draws + 1) / 2 : mc.n_draws;
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (units + kBlock - 1) / kBlock;
  std::vector<long double> sums(blocks), sumsq(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    RngStream rng(derive_seed(mc.seed, {b}));
    const std::size_t r1 = std::min(units, (b + 1) * kBlock);
    long double s = 0.0L, s2 = 0.0L;
    for (std::size_t r = b * kBlock; r < r1; ++r) {
      const double e1 = rng.normal(), e2 = rng.normal(), e3 = rng.normal();
      auto profit = [&](double sign) {
        const auto p = toy_prices(alpha, {alpha + sign * e1, -alpha + sign * e2, alpha + sign * e3});
        return 2.0 * alpha * p[1];  // 1 - P1 - P3 = P2 without cancellation
      };
      long double v = profit(1.0);
      if (mc.antithetic) v = 0.5L * (v + profit(-1.0));
      s += v;
      s2 += v * v;
    }
    sums[b] = s;
    sumsq[b] = s2;
  });
  long double s = 0.0L, s2 = 0.0L;
  for (std::size_t b = 0; b < blocks; ++b) {
    s += sums[b];
    s2 += sumsq[b];
  }
  const long double n = static_cast<long double>(units);
  const long double mean = s / n;
  long double var = (s2 - n * mean * mean) / (n - 1.0L);
  if (var < 0.0L) var = 0.0L;
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
}

SignalModel toy_general_model() {
  const StateGrid grid(-1.0, 3.0, 5);
  std::vector<DistributionSpec> specs{dist::DiscreteAtoms{{{0.0, 0.5}, {2.0, 0.5}}},
                                      dist::DiscreteAtoms{{{1.0, 1.0}}}};
  return build_signal_model(grid, specs, uniform_prior(2), 1.0);
}

std::vector<Portfolio> toy_beliefs(double alpha) {
  // Unit spacing: a holding of alpha per unit state is alpha shares.
  Portfolio w1{0.0, alpha, -alpha, alpha, 0.0};
  Portfolio w2{0.0, -alpha, alpha, -alpha, 0.0};
  return {w1, w2};
}

ToyCrossCheck toy_cross_check(double alpha, std::size_t n_paths, std::uint64_t seed) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  const SignalModel model = toy_general_model();
  const auto beliefs = toy_beliefs(alpha);
  const double dx = model.grid().spacing();
  ToyCrossCheck out;
  for (std::size_t p = 0; p < n_paths; ++p) {
    RngStream rng(derive_seed(seed, {p}));
    // Cells start at nodes -1, 0, 1, 2; the first cell carries no trade.
    const std::array<double, 4> xi{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    const ToyOrderFlow omega{alpha + xi[1], -alpha + xi[2], alpha + xi[3]};

    const OrderFlowPath path = simulate_order_flow(beliefs[0], model, xi);
    const auto post = posterior_from_flow(overlap_statistic(path, beliefs, model), beliefs, model);
    const auto kernel = pricing_kernel(post.probs, model);

    const auto prices = toy_prices(alpha, omega);
    const double q1 = toy_posterior_s1(alpha, omega);
    out.max_posterior_deviation = std::max(
        {out.max_posterior_deviation, std::abs(post.probs[0] - q1), std::abs(post.probs[1] - prices[1])});
    for (std::size_t a = 0; a < 3; ++a) {
      out.max_price_deviation = std::max(out.max_price_deviation, std::abs(kernel[a + 1] * dx - prices[a]));
    }
  }
  return out;
}

}  // namespace adkyle
