#include "adkyle/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adkyle/error.hpp"

namespace adkyle {

namespace {

// Exponents below this underflow double; such draws are redone in long double.
constexpr double kUnderflowGap = -700.0;

void require_signals(int signals) {
  if (signals < 2) throw ConfigError("I must be ≥ 2");
}

// Running sums for a vector of per-unit values.
struct Moments {
  std::vector<long double> sum;
  std::vector<long double> sumsq;
  std::size_t count = 0;

  explicit Moments(std::size_t k = 0) : sum(k, 0.0L), sumsq(k, 0.0L) {}

  void add(std::span<const double> v) {
    for (std::size_t c = 0; c < v.size(); ++c) {
      sum[c] += v[c];
      sumsq[c] += static_cast<long double>(v[c]) * v[c];
    }
    ++count;
  }

  void merge(const Moments& o) {
    for (std::size_t c = 0; c < sum.size(); ++c) {
      sum[c] += o.sum[c];
      sumsq[c] += o.sumsq[c];
    }
    count += o.count;
  }

  McEstimate estimate(std::size_t c) const {
    const long double n = static_cast<long double>(count);
    const long double mean = sum[c] / n;
    long double var = count > 1 ? (sumsq[c] - n * mean * mean) / (n - 1.0L) : 0.0L;
    if (var < 0.0L) var = 0.0L;
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
  }
};

// softmax of l_j = s*alpha*g_j + alpha^2 [j == observed] into p.
// Returns log-weight gap min_j (l_j - max l).
double softmax_draw(double alpha, double s, std::size_t observed, std::span<const double> g,
                    std::span<double> p) {
  const std::size_t count = g.size();
  const double a2 = alpha * alpha;
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) {
    p[j] = s * alpha * g[j] + (j == observed ? a2 : 0.0);
    m = std::max(m, p[j]);
  }
  double total = 0.0;
  double gap = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double d = p[j] - m;
    gap = std::min(gap, d);
    p[j] = std::exp(d);
    total += p[j];
  }
  for (std::size_t j = 0; j < count; ++j) p[j] /= total;
  return gap;
}

// (1 - alpha^2 p_1)(1 - p_1) with 1 - p_1 summed from the other weights.
long double phi_draw(double alpha, double s, std::span<const double> g, std::span<double> work) {
  const std::size_t count = g.size();
  const double a2 = alpha * alpha;
  const double gap = softmax_draw(alpha, s, 0, g, work);
  if (gap > kUnderflowGap) {
    double rest = 0.0;
    for (std::size_t j = 1; j < count; ++j) rest += work[j];
    return static_cast<long double>((1.0 - a2 * work[0]) * rest);
  }
  const long double la = alpha;
  const long double la2 = la * la;
  long double m = -std::numeric_limits<long double>::infinity();
  for (std::size_t j = 0; j < count; ++j) {
    m = std::max(m, static_cast<long double>(s) * la * g[j] + (j == 0 ? la2 : 0.0L));
  }
  long double e0 = 0.0L;
  long double rest = 0.0L;
  for (std::size_t j = 0; j < count; ++j) {
    const long double l = static_cast<long double>(s) * la * g[j] + (j == 0 ? la2 : 0.0L);
    const long double e = std::exp(l - m);
    if (j == 0) {
      e0 = e;
    } else {
      rest += e;
    }
  }
  const long double total = e0 + rest;
  return (1.0L - la2 * (e0 / total)) * (rest / total);
}

}  // namespace

Eigen::MatrixXd projection_q(int signals) {
  require_signals(signals);
  const double inv = 1.0 / signals;
  Eigen::MatrixXd q = Eigen::MatrixXd::Constant(signals, signals, -inv);
  q.diagonal().array() = 1.0 - inv;
  return q;
}

void McConfig::validate() const {
  if (n_draws < 1000) throw ConfigError("n_draws must be at least 1000");
}

std::vector<double> canonical_posterior_from_normals(double alpha, std::size_t observed,
                                                     std::span<const double> g) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  if (observed >= g.size()) throw ConfigError("observed signal out of range");
  std::vector<double> p(g.size());
  softmax_draw(alpha, 1.0, observed, g, p);
  return p;
}

std::vector<double> sample_canonical_posterior(double alpha, int signals, std::size_t observed,
                                               RngStream& rng) {
  if (signals < 1) throw ConfigError("need at least one signal");
  std::vector<double> g(static_cast<std::size_t>(signals));
  for (double& v : g) v = rng.normal();
  return canonical_posterior_from_normals(alpha, observed, g);
}

CanonicalSampler::CanonicalSampler(int signals, McConfig mc) : signals_(signals), mc_(mc) {
  require_signals(signals);
  mc_.validate();
  base_draws_ = mc_.antithetic ? (mc_.n_draws + 1) / 2 : mc_.n_draws;
  const std::size_t count = static_cast<std::size_t>(signals);
  normals_.resize(base_draws_ * count);
  const std::size_t blocks = (base_draws_ + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t r0 = b * kBlock;
    const std::size_t r1 = std::min(base_draws_, r0 + kBlock);
    for (std::size_t j = 0; j < count; ++j) {
      RngStream rng(derive_seed(mc_.seed, {b, j}));
      for (std::size_t r = r0; r < r1; ++r) normals_[r * count + j] = rng.normal();
    }
  });
}

std::span<const double> CanonicalSampler::normals(std::size_t r) const {
  const std::size_t count = static_cast<std::size_t>(signals_);
  return {normals_.data() + r * count, count};
}

PhiEstimate CanonicalSampler::phi(double alpha) const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  const std::size_t count = static_cast<std::size_t>(signals_);
  const std::size_t blocks = (base_draws_ + kBlock - 1) / kBlock;
  std::vector<long double> sums(blocks, 0.0L), sumsq(blocks, 0.0L);
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> work(count);
    const std::size_t r1 = std::min(base_draws_, (b + 1) * kBlock);
    long double s = 0.0L, s2 = 0.0L;
    for (std::size_t r = b * kBlock; r < r1; ++r) {
      long double v = phi_draw(alpha, 1.0, normals(r), work);
      if (mc_.antithetic) v = 0.5L * (v + phi_draw(alpha, -1.0, normals(r), work));
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
  const long double n = static_cast<long double>(base_draws_);
  const long double mean = s / n;
  long double var = (s2 - n * mean * mean) / (n - 1.0L);
  if (var < 0.0L) var = 0.0L;
  return {mean, static_cast<double>(std::sqrt(var / n))};
}

namespace {

// Block-parallel moments of a per-unit vector statistic; `draw` fills a
// length-k vector from one posterior draw p.
template <typename Draw>
Moments unit_moments(const CanonicalSampler& sampler, double alpha, std::size_t k, Draw draw) {
  const std::size_t count = static_cast<std::size_t>(sampler.signals());
  const std::size_t units = sampler.base_draws();
  const std::size_t blocks = (units + CanonicalSampler::kBlock - 1) / CanonicalSampler::kBlock;
  const bool anti = sampler.mc().antithetic;
  std::vector<Moments> parts(blocks, Moments(k));
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> p(count), v(k), w(k);
    const std::size_t r1 = std::min(units, (b + 1) * CanonicalSampler::kBlock);
    for (std::size_t r = b * CanonicalSampler::kBlock; r < r1; ++r) {
      softmax_draw(alpha, 1.0, 0, sampler.normals(r), p);
      draw(p, v);
      if (anti) {
        softmax_draw(alpha, -1.0, 0, sampler.normals(r), p);
        draw(p, w);
        for (std::size_t c = 0; c < k; ++c) v[c] = 0.5 * (v[c] + w[c]);
      }
      parts[b].add(v);
    }
  });
  Moments total(k);
  for (const auto& m : parts) total.merge(m);
  return total;
}

}  // namespace

McEstimate CanonicalSampler::efficiency(double alpha) const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  return unit_moments(*this, alpha, 1, [](std::span<const double> p, std::span<double> v) {
           v[0] = p[0];
         }).estimate(0);
}

McEstimate CanonicalSampler::off_signal_weight(double alpha) const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  const double others = static_cast<double>(signals_ - 1);
  return unit_moments(*this, alpha, 1, [others](std::span<const double> p, std::span<double> v) {
           double s = 0.0;
           for (std::size_t j = 1; j < p.size(); ++j) s += p[j];
           v[0] = s / others;
         }).estimate(0);
}

FocResidual CanonicalSampler::foc(double alpha) const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  const std::size_t count = static_cast<std::size_t>(signals_);
  const double a2 = alpha * alpha;
  // Per draw: e_1 - p - alpha^2 Q (diag p - p p^T) Q e_1 = (1 - alpha^2 p_1)(e_1 - p).
  const Moments m = unit_moments(*this, alpha, count, [a2](std::span<const double> p, std::span<double> v) {
    const double f = 1.0 - a2 * p[0];
    for (std::size_t j = 0; j < p.size(); ++j) v[j] = f * ((j == 0 ? 1.0 : 0.0) - p[j]);
  });
  FocResidual out;
  out.vector.resize(signals_);
  out.se.resize(signals_);
  for (std::size_t j = 0; j < count; ++j) {
    const McEstimate e = m.estimate(j);
    out.vector(j) = e.value;
    out.se(j) = e.se;
  }
  out.norm = out.vector.norm();
  out.combined_se = out.se.norm();
  return out;
}

PosteriorCovariance CanonicalSampler::covariance(double alpha, std::size_t batches) const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  if (batches < 2 || batches > base_draws_) throw ConfigError("covariance needs 2..N batches");
  const std::size_t count = static_cast<std::size_t>(signals_);
  const bool anti = mc_.antithetic;
  // Off-diagonal second moments E[q_j q_k], j < k, per batch.
  std::vector<Eigen::MatrixXd> cross(batches, Eigen::MatrixXd::Zero(signals_, signals_));
  std::vector<std::size_t> sizes(batches);
  parallel_for(batches, [&](std::size_t b) {
    const std::size_t r0 = b * base_draws_ / batches;
    const std::size_t r1 = (b + 1) * base_draws_ / batches;
    sizes[b] = r1 - r0;
    std::vector<double> p(count);
    Eigen::MatrixXd& acc = cross[b];
    const double w = anti ? 0.5 : 1.0;
    for (std::size_t r = r0; r < r1; ++r) {
      for (int pass = 0; pass < (anti ? 2 : 1); ++pass) {
        softmax_draw(alpha, pass == 0 ? 1.0 : -1.0, 0, normals(r), p);
        for (std::size_t j = 0; j < count; ++j) {
          for (std::size_t k = j + 1; k < count; ++k) acc(j, k) += w * p[j] * p[k];
        }
      }
    }
  });

  PosteriorCovariance out;
  out.batches.reserve(batches);
  out.mean = Eigen::MatrixXd::Zero(signals_, signals_);
  for (std::size_t b = 0; b < batches; ++b) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(signals_, signals_);
    for (int j = 0; j < signals_; ++j) {
      for (int k = j + 1; k < signals_; ++k) {
        m(j, k) = -cross[b](j, k) / static_cast<double>(sizes[b]);
        m(k, j) = m(j, k);
      }
    }
    // diag E[q_j (1 - q_j)] = sum_{k != j} E[q_j q_k]; keeps column sums at zero.
    for (int j = 0; j < signals_; ++j) m(j, j) = -(m.col(j).sum() - m(j, j));
    out.mean += m * (static_cast<double>(sizes[b]) / static_cast<double>(base_draws_));
    out.batches.push_back(std::move(m));
  }
  out.se = Eigen::MatrixXd::Zero(signals_, signals_);
  for (const auto& m : out.batches) out.se.array() += (m - out.mean).array().square();
  const double nb = static_cast<double>(batches);
  out.se = (out.se.array() / (nb * (nb - 1.0))).sqrt().matrix();
  return out;
}

PhiEstimate phi(double alpha, int signals, const McConfig& mc) {
  return CanonicalSampler(signals, mc).phi(alpha);
}

EquilibriumSolution solve_alpha_star(const CanonicalSampler& sampler, double tol) {
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  EquilibriumSolution sol;
  sol.signals = sampler.signals();
  sol.mc = sampler.mc();
  sol.tol = tol;

  double lo = 0.0;
  double hi = 1.0;
  while (!(sampler.phi(hi).value < 0.0L)) {
    lo = hi;
    hi *= 2.0;
    ++sol.iterations;
    if (hi > 1024.0) {
      throw NumericalError("no sign change of Phi found below alpha = 2^10");
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (sampler.phi(mid).value < 0.0L) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++sol.iterations;
  }
  sol.bracket = {lo, hi};
  sol.alpha_star = 0.5 * (lo + hi);
  const PhiEstimate r = sampler.phi(sol.alpha_star);
  sol.phi_residual = static_cast<double>(r.value);
  sol.phi_se = r.se;
  sol.efficiency = sampler.efficiency(sol.alpha_star);
  return sol;
}

EquilibriumSolution solve_alpha_star(int signals, const McConfig& mc, double tol) {
  return solve_alpha_star(CanonicalSampler(signals, mc), tol);
}

McEstimate information_efficiency(int signals, const McConfig& mc, double tol) {
  return solve_alpha_star(signals, mc, tol).efficiency;
}

std::vector<LikelihoodRatioPoint> log_likelihood_ratio_curve(const std::vector<int>& signal_counts,
                                                             const McConfig& mc, double tol) {
  std::vector<LikelihoodRatioPoint> out;
  out.reserve(signal_counts.size());
  for (int count : signal_counts) {
    const CanonicalSampler sampler(count, mc);
    const EquilibriumSolution sol = solve_alpha_star(sampler, tol);
    LikelihoodRatioPoint pt;
    pt.signals = count;
    pt.alpha_star = sol.alpha_star;
    pt.efficiency = sol.efficiency.value;
    pt.off_weight = sampler.off_signal_weight(sol.alpha_star).value;
    pt.log_ratio = std::log(pt.efficiency / ((count - 1) * pt.off_weight));
    const double kappa = -pt.log_ratio;
    pt.implied_rho = std::exp(-kappa) / (std::exp(-kappa) + 1.0);
    out.push_back(pt);
  }
  return out;
}

FocResidual foc_residual(double alpha, int signals, const McConfig& mc) {
  return CanonicalSampler(signals, mc).foc(alpha);
}

}  // namespace adkyle
