#include "adkyle/demand.hpp"

#include <algorithm>
#include <cmath>

#include "adkyle/error.hpp"

namespace adkyle {

InformedDemand informed_demand(const SignalModel& model, double alpha_star,
                               const IntensityMatrix& intensity) {
  const auto count = static_cast<Eigen::Index>(model.signal_count());
  if (intensity.pinv.rows() != count || intensity.pinv.cols() != count) {
    throw ConfigError("intensity matrix does not match the signal count");
  }
  if (!(alpha_star >= 0.0)) throw ConfigError("alpha* must be nonnegative");
  InformedDemand out;
  out.beta = alpha_star * intensity.pinv * projection_q(static_cast<int>(count));
  const std::size_t n = model.grid().size();
  out.portfolios.assign(model.signal_count(), Portfolio(n, 0.0));
  for (Eigen::Index i = 0; i < count; ++i) {
    Portfolio& w = out.portfolios[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < count; ++j) {
      const double b = out.beta(j, i);
      const auto d = model.density(static_cast<std::size_t>(j));
      for (std::size_t k = 0; k < n; ++k) w[k] += b * d[k];
    }
  }
  return out;
}

InformedDemand informed_demand(const SignalModel& model, const EquilibriumSolution& eq,
                               const IntensityMatrix& intensity) {
  if (eq.signals != static_cast<int>(model.signal_count())) {
    throw ConfigError("equilibrium was solved for a different signal count");
  }
  return informed_demand(model, eq.alpha_star, intensity);
}

std::string_view side_name(OptionSide side) { return side == OptionSide::Put ? "put" : "call"; }

OptionDecomposition breeden_litzenberger(const Portfolio& w, const StateGrid& grid, double k0) {
  const std::size_t n = grid.size();
  if (w.size() != n) throw ConfigError("portfolio length does not match grid");
  if (!(k0 > grid.lo() && k0 < grid.hi())) throw ConfigError("k0 must lie strictly inside the grid");
  for (double v : w) {
    if (!std::isfinite(v)) throw ConfigError("portfolio has non-finite entries");
  }
  const double h = grid.spacing();
  const double h2 = h * h;

  OptionDecomposition dec;
  dec.k0 = k0;
  dec.strikes = grid.points();
  dec.option_density.resize(n);
  dec.sides.resize(n);
  for (std::size_t k = 1; k + 1 < n; ++k) dec.option_density[k] = (w[k - 1] - 2.0 * w[k] + w[k + 1]) / h2;
  if (n >= 4) {
    dec.option_density[0] = (2.0 * w[0] - 5.0 * w[1] + 4.0 * w[2] - w[3]) / h2;
    dec.option_density[n - 1] = (2.0 * w[n - 1] - 5.0 * w[n - 2] + 4.0 * w[n - 3] - w[n - 4]) / h2;
  } else {
    dec.option_density[0] = dec.option_density[1];
    dec.option_density[n - 1] = dec.option_density[n - 2];
  }
  for (std::size_t k = 0; k < n; ++k) dec.sides[k] = grid[k] < k0 ? OptionSide::Put : OptionSide::Call;

  const std::size_t c = std::clamp<std::size_t>(grid.nearest_index(k0), 1, n - 2);
  const double d1 = (w[c + 1] - w[c - 1]) / (2.0 * h);
  const double d2 = dec.option_density[c];
  const double u = k0 - grid[c];
  dec.cash = w[c] + d1 * u + 0.5 * d2 * u * u;
  dec.futures = d1 + d2 * u;
  return dec;
}

Portfolio reconstruct(const OptionDecomposition& dec, const StateGrid& grid) {
  const std::size_t n = grid.size();
  if (dec.strikes.size() != n || dec.option_density.size() != n) {
    throw ConfigError("decomposition does not match grid");
  }
  const auto& ks = dec.strikes;
  const auto& dens = dec.option_density;
  // Strike axis with k0 spliced in; densities interpolated linearly there.
  std::vector<double> kk;
  std::vector<double> dd;
  kk.reserve(n + 1);
  dd.reserve(n + 1);
  std::size_t split = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (split == n && ks[k] >= dec.k0) {
      split = kk.size();
      if (ks[k] > dec.k0 && k > 0) {
        const double t = (dec.k0 - ks[k - 1]) / (ks[k] - ks[k - 1]);
        kk.push_back(dec.k0);
        dd.push_back(dens[k - 1] + t * (dens[k] - dens[k - 1]));
      }
    }
    kk.push_back(ks[k]);
    dd.push_back(dens[k]);
  }
  if (split == n) split = kk.size() - 1;

  Portfolio out(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double x = grid[m];
    double v = dec.cash + dec.futures * (x - dec.k0);
    // Puts: strikes in [lo, k0], payoff (K - x)+.
    for (std::size_t a = 0; a < split; ++a) {
      const double f0 = dd[a] * std::max(kk[a] - x, 0.0);
      const double f1 = dd[a + 1] * std::max(kk[a + 1] - x, 0.0);
      v += 0.5 * (f0 + f1) * (kk[a + 1] - kk[a]);
    }
    // Calls: strikes in [k0, hi], payoff (x - K)+.
    for (std::size_t a = split; a + 1 < kk.size(); ++a) {
      const double f0 = dd[a] * std::max(x - kk[a], 0.0);
      const double f1 = dd[a + 1] * std::max(x - kk[a + 1], 0.0);
      v += 0.5 * (f0 + f1) * (kk[a + 1] - kk[a]);
    }
    out[m] = v;
  }
  return out;
}

std::vector<double> payoff_orthogonality_check(const Portfolio& w, const SignalModel& model) {
  if (w.size() != model.grid().size()) throw ConfigError("portfolio length does not match grid");
  std::vector<double> out(model.signal_count());
  std::vector<double> f(w.size());
  for (std::size_t i = 0; i < model.signal_count(); ++i) {
    const auto d = model.density(i);
    for (std::size_t k = 0; k < w.size(); ++k) f[k] = w[k] * d[k];
    out[i] = model.integrate(f);
  }
  return out;
}

}  // namespace adkyle
