#include "adkyle/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adkyle/error.hpp"

namespace adkyle {

namespace {

void require_grid_length(std::size_t len, const SignalModel& model, const char* what) {
  if (len != model.grid().size()) {
    throw ConfigError(std::string(what) + " length does not match grid");
  }
}

// Left-endpoint 1/sigma^2 inner product.
double flow_inner(const Portfolio& u, const Portfolio& v, const SignalModel& model) {
  const auto& sigma = model.noise_sigma();
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) s += u[k] * v[k] / (sigma[k] * sigma[k]);
  return s * model.grid().spacing();
}

McEstimate mean_and_se(const std::vector<double>& v) {
  long double s = 0.0L, s2 = 0.0L;
  for (double x : v) {
    s += x;
    s2 += static_cast<long double>(x) * x;
  }
  const long double n = static_cast<long double>(v.size());
  const long double mean = s / n;
  long double var = v.size() > 1 ? (s2 - n * mean * mean) / (n - 1.0L) : 0.0L;
  if (var < 0.0L) var = 0.0L;
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
}

std::vector<double> subgrid_weights(const std::vector<double>& states) {
  const std::size_t m = states.size();
  std::vector<double> w(m, 0.0);
  for (std::size_t a = 0; a + 1 < m; ++a) {
    const double half = 0.5 * (states[a + 1] - states[a]);
    w[a] += half;
    w[a + 1] += half;
  }
  return w;
}

PriceImpactMatrix impact_skeleton(const SignalModel& model, double alpha_star,
                                  const std::vector<std::size_t>& subgrid) {
  const std::size_t count = model.signal_count();
  if (count < 2) throw ConfigError("I must be ≥ 2");
  if (subgrid.empty()) throw ConfigError("impact subgrid is empty");
  PriceImpactMatrix out;
  out.indices = subgrid;
  const double c = (1.0 - 1.0 / static_cast<double>(count)) * alpha_star;
  const auto& sigma = model.noise_sigma();
  out.weighted_payoffs.resize(static_cast<Eigen::Index>(subgrid.size()), static_cast<Eigen::Index>(count));
  for (std::size_t a = 0; a < subgrid.size(); ++a) {
    const std::size_t k = subgrid[a];
    if (k >= model.grid().size()) throw ConfigError("impact subgrid index outside grid");
    if (a > 0 && k <= subgrid[a - 1]) throw ConfigError("impact subgrid must be increasing");
    out.states.push_back(model.grid()[k]);
    const double f = std::sqrt(c / sigma[k]);
    for (std::size_t j = 0; j < count; ++j) {
      out.weighted_payoffs(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) =
          model.density(j)[k] * f;
    }
  }
  return out;
}

Eigen::MatrixXd swap_signal(const Eigen::MatrixXd& m, std::size_t observed) {
  if (observed == 0) return m;
  Eigen::PermutationMatrix<Eigen::Dynamic> p(m.rows());
  p.setIdentity();
  p.indices()(0) = static_cast<int>(observed);
  p.indices()(static_cast<Eigen::Index>(observed)) = 0;
  return p * m * p.transpose();
}

}  // namespace

OrderFlowPath simulate_order_flow(const Portfolio& insider, const SignalModel& model,
                                  std::span<const double> xi) {
  require_grid_length(insider.size(), model, "insider portfolio");
  const std::size_t n = model.grid().size();
  if (xi.size() < n - 1) throw ConfigError("need one normal draw per grid cell");
  const double dx = model.grid().spacing();
  const double sdx = std::sqrt(dx);
  const auto& sigma = model.noise_sigma();
  OrderFlowPath path;
  path.increments.resize(n - 1);
  path.cumulative.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    path.increments[k] = insider[k] * dx + sigma[k] * sdx * xi[k];
    path.cumulative[k + 1] = path.cumulative[k] + path.increments[k];
  }
  return path;
}

OrderFlowPath simulate_order_flow(const Portfolio& insider, const SignalModel& model, RngStream& rng) {
  std::vector<double> xi(model.grid().size() - 1);
  for (double& v : xi) v = rng.normal();
  return simulate_order_flow(insider, model, xi);
}

std::vector<double> overlap_statistic(const OrderFlowPath& path, const std::vector<Portfolio>& beliefs,
                                      const SignalModel& model) {
  const std::size_t n = model.grid().size();
  if (path.increments.size() + 1 != n) throw ConfigError("order flow does not match grid");
  const auto& sigma = model.noise_sigma();
  std::vector<double> out(beliefs.size(), 0.0);
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    require_grid_length(beliefs[i].size(), model, "belief portfolio");
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) s += beliefs[i][k] / (sigma[k] * sigma[k]) * path.increments[k];
    out[i] = s;
  }
  return out;
}

std::vector<double> insider_overlap(const Portfolio& insider, const std::vector<Portfolio>& beliefs,
                                    const SignalModel& model) {
  require_grid_length(insider.size(), model, "insider portfolio");
  std::vector<double> out(beliefs.size());
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    require_grid_length(beliefs[i].size(), model, "belief portfolio");
    out[i] = flow_inner(beliefs[i], insider, model);
  }
  return out;
}

PosteriorOverSignals posterior_from_flow(std::span<const double> overlaps,
                                         const std::vector<Portfolio>& beliefs,
                                         const SignalModel& model) {
  const std::size_t count = model.signal_count();
  if (overlaps.size() != count || beliefs.size() != count) {
    throw ConfigError("overlaps and beliefs must have one entry per signal");
  }
  PosteriorOverSignals post;
  post.log_weights.resize(count);
  post.probs.resize(count);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    require_grid_length(beliefs[i].size(), model, "belief portfolio");
    const double prior = model.prior()[i];
    const double lp = prior > 0.0 ? std::log(prior) : -std::numeric_limits<double>::infinity();
    post.log_weights[i] = overlaps[i] - 0.5 * flow_inner(beliefs[i], beliefs[i], model) + lp;
    m = std::max(m, post.log_weights[i]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    post.probs[i] = std::exp(post.log_weights[i] - m);
    total += post.probs[i];
  }
  for (double& p : post.probs) p /= total;
  return post;
}

std::vector<double> pricing_kernel(std::span<const double> probs, const SignalModel& model) {
  if (probs.size() != model.signal_count()) throw ConfigError("posterior has wrong length");
  const std::size_t n = model.grid().size();
  std::vector<double> p(n, 0.0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const auto d = model.density(i);
    for (std::size_t k = 0; k < n; ++k) p[k] += probs[i] * d[k];
  }
  return p;
}

std::vector<std::size_t> uniform_subgrid(const StateGrid& grid, std::size_t count) {
  const std::size_t n = grid.size();
  count = std::min(count, n);
  if (count < 2) throw ConfigError("subgrid needs at least two points");
  std::vector<std::size_t> idx(count);
  for (std::size_t a = 0; a < count; ++a) idx[a] = a * (n - 1) / (count - 1);
  return idx;
}

PriceImpactMatrix price_impact_matrix(const SignalModel& model, double alpha_star,
                                      const CanonicalSampler& sampler, std::size_t observed,
                                      const std::vector<std::size_t>& subgrid, std::size_t batches) {
  if (sampler.signals() != static_cast<int>(model.signal_count())) {
    throw ConfigError("sampler signal count does not match model");
  }
  if (observed >= model.signal_count()) throw ConfigError("observed signal out of range");
  PriceImpactMatrix out = impact_skeleton(model, alpha_star, subgrid);
  out.conditional_on = observed;
  out.averaged = true;
  const PosteriorCovariance cov = sampler.covariance(alpha_star, batches);
  const Eigen::MatrixXd& h = out.weighted_payoffs;
  out.lambda = h * swap_signal(cov.mean, observed) * h.transpose();
  out.se = Eigen::MatrixXd::Zero(out.lambda.rows(), out.lambda.cols());
  for (const auto& mb : cov.batches) {
    out.batch_covariances.push_back(swap_signal(mb, observed));
    out.se.array() += (h * out.batch_covariances.back() * h.transpose() - out.lambda).array().square();
  }
  const double nb = static_cast<double>(cov.batches.size());
  out.se = (out.se.array() / (nb * (nb - 1.0))).sqrt().matrix();
  return out;
}

PriceImpactMatrix price_impact_matrix(const SignalModel& model, const EquilibriumSolution& eq,
                                      std::size_t observed, const McConfig& mc,
                                      const std::vector<std::size_t>& subgrid, std::size_t batches) {
  if (eq.signals != static_cast<int>(model.signal_count())) {
    throw ConfigError("equilibrium was solved for a different signal count");
  }
  const CanonicalSampler sampler(eq.signals, mc);
  return price_impact_matrix(model, eq.alpha_star, sampler, observed, subgrid, batches);
}

PriceImpactMatrix price_impact_at(const SignalModel& model, double alpha_star,
                                  std::span<const double> posterior,
                                  const std::vector<std::size_t>& subgrid) {
  const std::size_t count = model.signal_count();
  if (posterior.size() != count) throw ConfigError("posterior has wrong length");
  PriceImpactMatrix out = impact_skeleton(model, alpha_star, subgrid);
  out.averaged = false;
  Eigen::MatrixXd m(count, count);
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t k = 0; k < count; ++k) {
      m(j, k) = (j == k ? posterior[j] : 0.0) - posterior[j] * posterior[k];
    }
  }
  out.lambda = out.weighted_payoffs * m * out.weighted_payoffs.transpose();
  out.se = Eigen::MatrixXd::Zero(out.lambda.rows(), out.lambda.cols());
  return out;
}

double derivative_cross_impact(std::span<const double> claim1, std::span<const double> claim2,
                               const PriceImpactMatrix& impact) {
  const std::size_t m = impact.states.size();
  if (claim1.size() != m || claim2.size() != m) throw ConfigError("claims must live on the impact subgrid");
  const auto w = subgrid_weights(impact.states);
  Eigen::VectorXd a(m), b(m);
  for (std::size_t k = 0; k < m; ++k) {
    a(k) = w[k] * claim1[k];
    b(k) = w[k] * claim2[k];
  }
  return a.dot(impact.lambda * b);
}

McEstimate derivative_cross_impact_se(std::span<const double> claim1, std::span<const double> claim2,
                                      const PriceImpactMatrix& impact) {
  if (!impact.averaged || impact.batch_covariances.size() < 2) {
    throw ConfigError("standard errors need an averaged impact matrix with batches");
  }
  const std::size_t m = impact.states.size();
  if (claim1.size() != m || claim2.size() != m) throw ConfigError("claims must live on the impact subgrid");
  const auto w = subgrid_weights(impact.states);
  Eigen::VectorXd a(m), b(m);
  for (std::size_t k = 0; k < m; ++k) {
    a(k) = w[k] * claim1[k];
    b(k) = w[k] * claim2[k];
  }
  const Eigen::VectorXd ha = impact.weighted_payoffs.transpose() * a;
  const Eigen::VectorXd hb = impact.weighted_payoffs.transpose() * b;
  McEstimate out;
  out.value = a.dot(impact.lambda * b);
  const double nb = static_cast<double>(impact.batch_covariances.size());
  double ss = 0.0;
  for (const auto& mb : impact.batch_covariances) {
    const double d = ha.dot(mb * hb) - out.value;
    ss += d * d;
  }
  out.se = std::sqrt(ss / (nb * (nb - 1.0)));
  return out;
}

Portfolio orthogonalize_against(const Portfolio& w, const std::vector<Portfolio>& beliefs,
                                const SignalModel& model) {
  require_grid_length(w.size(), model, "portfolio");
  std::vector<Portfolio> basis;
  for (const auto& b : beliefs) {
    require_grid_length(b.size(), model, "belief portfolio");
    Portfolio u = b;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : basis) {
        const double c = flow_inner(u, e, model);
        for (std::size_t k = 0; k < u.size(); ++k) u[k] -= c * e[k];
      }
    }
    const double norm = std::sqrt(flow_inner(u, u, model));
    const double ref = std::sqrt(flow_inner(b, b, model));
    if (!(norm > 1e-10 * ref)) continue;
    for (double& v : u) v /= norm;
    basis.push_back(std::move(u));
  }
  Portfolio out = w;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& e : basis) {
      const double c = flow_inner(out, e, model);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] -= c * e[k];
    }
  }
  return out;
}

McEstimate zero_overlap_profit_check(const SignalModel& model, const std::vector<Portfolio>& beliefs,
                                     const Portfolio& test, std::size_t n_paths, std::uint64_t seed) {
  const std::size_t count = model.signal_count();
  if (beliefs.size() != count) throw ConfigError("need one belief portfolio per signal");
  require_grid_length(test.size(), model, "test portfolio");
  if (n_paths < 2) throw ConfigError("need at least two paths");
  const double tnorm = std::sqrt(flow_inner(test, test, model));
  for (const auto& b : beliefs) {
    const double bnorm = std::sqrt(flow_inner(b, b, model));
    if (std::abs(flow_inner(test, b, model)) > 1e-8 * tnorm * bnorm) {
      throw ConfigError("test portfolio is not orthogonal to the belief portfolios");
    }
  }
  const std::size_t n = model.grid().size();
  std::vector<double> profits(n_paths);
  parallel_for(n_paths, [&](std::size_t p) {
    const std::size_t s = p % count;
    Portfolio drift = beliefs[s];
    for (std::size_t k = 0; k < n; ++k) drift[k] += test[k];
    RngStream rng(derive_seed(seed, {p}));
    const OrderFlowPath path = simulate_order_flow(drift, model, rng);
    const auto post = posterior_from_flow(overlap_statistic(path, beliefs, model), beliefs, model);
    const auto price = pricing_kernel(post.probs, model);
    std::vector<double> f(n);
    const auto eta = model.density(s);
    for (std::size_t k = 0; k < n; ++k) f[k] = (eta[k] - price[k]) * test[k];
    profits[p] = model.integrate(f);
  });
  return mean_and_se(profits);
}

McEstimate pipeline_efficiency(const SignalModel& model, const std::vector<Portfolio>& demand,
                               std::size_t n_paths, std::uint64_t seed) {
  const std::size_t count = model.signal_count();
  if (demand.size() != count) throw ConfigError("need one demand portfolio per signal");
  if (n_paths < 2) throw ConfigError("need at least two paths");
  std::vector<double> hits(n_paths);
  parallel_for(n_paths, [&](std::size_t p) {
    const std::size_t s = p % count;
    RngStream rng(derive_seed(seed, {p}));
    const OrderFlowPath path = simulate_order_flow(demand[s], model, rng);
    const auto post = posterior_from_flow(overlap_statistic(path, demand, model), demand, model);
    hits[p] = post.probs[s];
  });
  return mean_and_se(hits);
}

}  // namespace adkyle
