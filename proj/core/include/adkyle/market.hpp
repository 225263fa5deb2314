#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "adkyle/demand.hpp"
#include "adkyle/equilibrium.hpp"
#include "adkyle/model.hpp"
#include "adkyle/rng.hpp"

namespace adkyle {

struct OrderFlowPath {
  std::vector<double> increments;  // n - 1 cells
  std::vector<double> cumulative;  // n nodes, cumulative[0] = 0
};

/// Euler scheme with left-endpoint drift:
/// d omega_k = W(x_k) dx + sigma(x_k) sqrt(dx) xi_k, k = 0..n-2.
OrderFlowPath simulate_order_flow(const Portfolio& insider, const SignalModel& model, RngStream& rng);
OrderFlowPath simulate_order_flow(const Portfolio& insider, const SignalModel& model,
                                  std::span<const double> xi);

/// sum_k Wb_i(x_k) / sigma^2(x_k) * d omega_k for each belief portfolio.
std::vector<double> overlap_statistic(const OrderFlowPath& path, const std::vector<Portfolio>& beliefs,
                                      const SignalModel& model);

/// Expected overlap given the insider trades W: sum_k Wb_i W / sigma^2 dx.
std::vector<double> insider_overlap(const Portfolio& insider, const std::vector<Portfolio>& beliefs,
                                    const SignalModel& model);

struct PosteriorOverSignals {
  std::vector<double> probs;
  std::vector<double> log_weights;
};

/// Log weight O_i - 1/2 sum_k Wb_i^2 / sigma^2 dx + log prior_i (left-endpoint
/// sums, the exact likelihood of the discretized flow), then softmax.
PosteriorOverSignals posterior_from_flow(std::span<const double> overlaps,
                                         const std::vector<Portfolio>& beliefs,
                                         const SignalModel& model);

/// P(x_k) = sum_i eta_i(x_k) probs_i.
std::vector<double> pricing_kernel(std::span<const double> probs, const SignalModel& model);

/// Grid indices at which impact matrices are evaluated.
std::vector<std::size_t> uniform_subgrid(const StateGrid& grid, std::size_t count = 101);

struct PriceImpactMatrix {
  std::vector<std::size_t> indices;
  std::vector<double> states;
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd se;  // zero for the single-omega variant
  std::size_t conditional_on = 0;
  bool averaged = true;

  // Lambda = H M H^T with H(a, j) = eta_j(x_a) sqrt(c / sigma(x_a)) and
  // c = (1 - 1/I) alpha*; kept to propagate batch errors into functionals.
  Eigen::MatrixXd weighted_payoffs;
  std::vector<Eigen::MatrixXd> batch_covariances;
};

/// Expected impact: M = E[diag q - q q^T] under the canonical posterior law
/// given `observed`. Varying noise uses 1/sqrt(sigma(x) sigma(y)).
PriceImpactMatrix price_impact_matrix(const SignalModel& model, const EquilibriumSolution& eq,
                                      std::size_t observed, const McConfig& mc,
                                      const std::vector<std::size_t>& subgrid,
                                      std::size_t batches = 32);
PriceImpactMatrix price_impact_matrix(const SignalModel& model, double alpha_star,
                                      const CanonicalSampler& sampler, std::size_t observed,
                                      const std::vector<std::size_t>& subgrid,
                                      std::size_t batches = 32);

/// Single-omega impact with M = diag q - q q^T for a given posterior q.
PriceImpactMatrix price_impact_at(const SignalModel& model, double alpha_star,
                                  std::span<const double> posterior,
                                  const std::vector<std::size_t>& subgrid);

/// Double trapezoid sum of phi1(x) phi2(y) Lambda(x, y) over the subgrid.
double derivative_cross_impact(std::span<const double> claim1, std::span<const double> claim2,
                               const PriceImpactMatrix& impact);
/// Same functional with a batch-means standard error (averaged impact only).
McEstimate derivative_cross_impact_se(std::span<const double> claim1, std::span<const double> claim2,
                                      const PriceImpactMatrix& impact);

/// Projects w onto the 1/sigma^2-orthogonal complement of the beliefs
/// (left-endpoint inner product, two Gram-Schmidt passes).
Portfolio orthogonalize_against(const Portfolio& w, const std::vector<Portfolio>& beliefs,
                                const SignalModel& model);

/// Paths alternate the true signal round-robin (uniform prior); each carries
/// the belief demand of its signal plus `test`. Profit per path is
/// int (eta_s - P) test dx. Throws ConfigError if `test` is not orthogonal to
/// the beliefs within 1e-8 relative.
McEstimate zero_overlap_profit_check(const SignalModel& model, const std::vector<Portfolio>& beliefs,
                                     const Portfolio& test, std::size_t n_paths, std::uint64_t seed);

/// Mean posterior weight on the true signal over simulated flows, true
/// signal alternating round-robin.
McEstimate pipeline_efficiency(const SignalModel& model, const std::vector<Portfolio>& demand,
                               std::size_t n_paths, std::uint64_t seed);

}  // namespace adkyle
