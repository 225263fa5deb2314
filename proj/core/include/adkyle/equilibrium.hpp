#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "adkyle/rng.hpp"

namespace adkyle {

/// Q = Id - (1/I) e e^T. Throws ConfigError for I < 2.
Eigen::MatrixXd projection_q(int signals);

struct McConfig {
  std::size_t n_draws = 200000;
  std::uint64_t seed = 42;
  bool antithetic = true;

  void validate() const;  // n_draws >= 1000
};

struct McEstimate {
  double value = 0.0;
  double se = 0.0;
};

/// Phi is kept in extended precision: for large alpha it is far below the
/// smallest double.
struct PhiEstimate {
  long double value = 0.0L;
  double se = 0.0;
};

struct FocResidual {
  Eigen::VectorXd vector;
  Eigen::VectorXd se;  // per coordinate
  double norm = 0.0;
  double combined_se = 0.0;  // sqrt(sum se_j^2)
};

/// E[diag(q) - q q^T] under the canonical posterior, with batch estimates
/// for standard errors. Column sums of `mean` are exactly zero.
struct PosteriorCovariance {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd se;
  std::vector<Eigen::MatrixXd> batches;
};

/// Posterior q given observed signal `observed` and raw standard normals g:
/// log-weights alpha*g_j + alpha^2 [j == observed] (the centring by Q is a
/// common shift and drops out of the softmax).
std::vector<double> canonical_posterior_from_normals(double alpha, std::size_t observed,
                                                     std::span<const double> g);

/// One draw of the equilibrium posterior q ~ softmax(alpha^2 e_i + Z),
/// Z ~ N(0, alpha^2 Q). `observed` is 0-based.
std::vector<double> sample_canonical_posterior(double alpha, int signals, std::size_t observed,
                                               RngStream& rng);

/// Monte Carlo engine over the canonical posterior law with the observed
/// signal fixed to index 0. The normals are drawn once at construction:
/// every estimate at every alpha reuses them (common random numbers), and
/// coordinate j of base draw r is the same for every signal count, since
/// each (block, coordinate) pair owns its own substream.
class CanonicalSampler {
 public:
  static constexpr std::size_t kBlock = 1024;

  CanonicalSampler(int signals, McConfig mc);

  int signals() const { return signals_; }
  const McConfig& mc() const { return mc_; }
  std::size_t base_draws() const { return base_draws_; }

  /// Raw normals of base draw r (length I).
  std::span<const double> normals(std::size_t r) const;

  PhiEstimate phi(double alpha) const;
  McEstimate efficiency(double alpha) const;          // E[q_1]
  McEstimate off_signal_weight(double alpha) const;   // mean over j != 1 of E[q_j]
  FocResidual foc(double alpha) const;
  PosteriorCovariance covariance(double alpha, std::size_t batches = 32) const;

 private:
  int signals_;
  McConfig mc_;
  std::size_t base_draws_;
  std::vector<double> normals_;  // base_draws_ x signals_, row-major
};

struct EquilibriumSolution {
  double alpha_star = 0.0;
  int signals = 0;
  double phi_residual = 0.0;
  double phi_se = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  McConfig mc;
  double tol = 0.0;
  int iterations = 0;
  McEstimate efficiency;
};

PhiEstimate phi(double alpha, int signals, const McConfig& mc);

/// Doubles hi from 1 until Phi(hi) < 0, then bisects to `tol`. Throws
/// ConfigError for I < 2 and NumericalError if hi passes 2^10.
EquilibriumSolution solve_alpha_star(int signals, const McConfig& mc, double tol = 1e-4);
EquilibriumSolution solve_alpha_star(const CanonicalSampler& sampler, double tol = 1e-4);

McEstimate information_efficiency(int signals, const McConfig& mc, double tol = 1e-4);

struct LikelihoodRatioPoint {
  int signals = 0;
  double alpha_star = 0.0;
  double efficiency = 0.0;
  double off_weight = 0.0;
  double log_ratio = 0.0;     // log(E[q_i] / ((I-1) E[q_-i]))
  double implied_rho = 0.0;   // e^{-kappa}/(e^{-kappa}+1), kappa = -log_ratio
};

std::vector<LikelihoodRatioPoint> log_likelihood_ratio_curve(const std::vector<int>& signal_counts,
                                                             const McConfig& mc,
                                                             double tol = 1e-4);

FocResidual foc_residual(double alpha, int signals, const McConfig& mc);

}  // namespace adkyle
