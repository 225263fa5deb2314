#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "adkyle/demand.hpp"
#include "adkyle/equilibrium.hpp"
#include "adkyle/model.hpp"

namespace adkyle {

// Three states, two equally likely signals: s1 pays (1/2, 0, 1/2), s2 pays
// (0, 1, 0). The insider buys alpha of states 1 and 3 and sells alpha of
// state 2 after s1, the reverse after s2. Unit noise in every market.

using ToyOrderFlow = std::array<double, 3>;

/// 2 (omega_1 + omega_3 - omega_2).
double toy_delta(const ToyOrderFlow& omega);

/// (e^{a D}/2, 1, e^{a D}/2) / (e^{a D} + 1), evaluated without overflow.
std::array<double, 3> toy_prices(double alpha, const ToyOrderFlow& omega);

/// Posterior weight on s1.
double toy_posterior_s1(double alpha, const ToyOrderFlow& omega);

/// E[alpha (1 - P1 + P2 - P3)] with omega = (alpha + e1, -alpha + e2, alpha + e3).
McEstimate toy_expected_profit(double alpha, const McConfig& mc);

/// The same economy on the general engine: grid [-1, 3] with unit spacing,
/// atoms at 0, 1, 2 and zero boundary nodes.
SignalModel toy_general_model();

/// Belief portfolios of the toy strategy at scale alpha on toy_general_model().
std::vector<Portfolio> toy_beliefs(double alpha);

struct ToyCrossCheck {
  double max_posterior_deviation = 0.0;
  double max_price_deviation = 0.0;
  double max_deviation() const {
    return max_posterior_deviation > max_price_deviation ? max_posterior_deviation : max_price_deviation;
  }
};

/// Runs the general flow -> overlap -> posterior -> kernel chain against the
/// closed forms on n_paths shared noise draws (true signal s1).
ToyCrossCheck toy_cross_check(double alpha, std::size_t n_paths, std::uint64_t seed);

}  // namespace adkyle
