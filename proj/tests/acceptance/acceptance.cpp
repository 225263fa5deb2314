// One PASS/FAIL line per criterion. `--criterion N` runs a single one; the
// exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "adkyle/builtin_configs.hpp"
#include "adkyle/csv.hpp"
#include "adkyle/demand.hpp"
#include "adkyle/equilibrium.hpp"
#include "adkyle/intensity.hpp"
#include "adkyle/market.hpp"
#include "adkyle/smile.hpp"
#include "adkyle/toy.hpp"

using namespace adkyle;

namespace {

// Pinned tolerances and budgets.
constexpr double kToyDeviation = 1e-10;
constexpr double kToySeconds = 5.0;
constexpr double kPhiZeroTol = 1e-15;
constexpr double kPhiAnchorAlpha = 50.0;
constexpr double kPhi50Lower = -0.01;
constexpr double kSolveSeconds = 30.0;
constexpr double kSweepSeconds = 300.0;
constexpr double kSweepTol = 1e-6;
constexpr double kPlateauGap = 0.01;
constexpr std::size_t kPipelinePaths = 20000;
constexpr double kNoiseScale = 10.0;
constexpr double kSignTail = 1e-6;  // entries below this fraction of max|W| carry no sign
constexpr double kAntisymmetryTol = 1e-10;
constexpr double kImpactFloor = 1e-14;  // absolute slack for exactly cancelling entries
constexpr std::size_t kProfitPaths = 2000;
constexpr double kSmileSeconds = 180.0;
constexpr double kRoundTripTol = 1e-3;
constexpr double kKernelMassTol = 1e-6;
constexpr double kPosteriorSumTol = 1e-12;

const McConfig kMc{200000, 42, true};

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) { return format_number(v); }

void solve_demand(const SignalModel& m, InformedDemand& demand, EquilibriumSolution& eq) {
  eq = solve_alpha_star(static_cast<int>(m.signal_count()), kMc);
  demand = informed_demand(m, eq, information_intensity(m));
}

SignalModel solved_demand_model(const ModelConfig& cfg, InformedDemand& demand, EquilibriumSolution& eq) {
  SignalModel m = cfg.build();
  solve_demand(m, demand, eq);
  return m;
}

// Sign sequence of w after dropping entries below kSignTail * max|w|.
std::vector<int> sign_pattern(const Portfolio& w) {
  double peak = 0.0;
  for (double v : w) peak = std::max(peak, std::abs(v));
  std::vector<int> out;
  for (double v : w) {
    if (std::abs(v) <= kSignTail * peak) continue;
    const int s = v > 0 ? 1 : -1;
    if (out.empty() || out.back() != s) out.push_back(s);
  }
  return out;
}

std::string pattern_str(const std::vector<int>& p) {
  std::string s;
  for (int v : p) s += v > 0 ? '+' : '-';
  return s;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (double alpha : {0.5, 1.0, 2.0, 5.0}) worst = std::max(worst, toy_cross_check(alpha, 1000, 42).max_deviation());
  const double t = seconds_since(t0);
  return {worst < kToyDeviation && t < kToySeconds,
          "max deviation " + num(worst) + " over 1000 paths x 4 alphas, " + num(t) + " s"};
}

Outcome criterion2() {
  bool ok = phi(0.0, 2, kMc).value == 0.5L;
  double worst = 0.0;
  for (int count : {2, 3, 5, 10, 20, 100}) {
    const long double v = phi(0.0, count, kMc).value;
    worst = std::max(worst, static_cast<double>(std::abs(v - (1.0L - 1.0L / count))));
  }
  ok = ok && worst < kPhiZeroTol;
  const long double p50 = phi(kPhiAnchorAlpha, 2, kMc).value;
  ok = ok && p50 > kPhi50Lower && p50 < 0.0L;
  std::ostringstream os;
  os << "Phi(0) error " << num(worst) << ", Phi(50) = " << static_cast<long double>(p50);
  return {ok, os.str()};
}

Outcome criterion3() {
  bool ok = true;
  std::ostringstream os;
  for (int count : {2, 3, 5, 10, 20}) {
    const auto t0 = Clock::now();
    const auto eq = solve_alpha_star(count, kMc);
    const auto foc = foc_residual(eq.alpha_star, count, kMc);
    const double t = seconds_since(t0);
    const bool pass = std::abs(eq.phi_residual) < 2.0 * eq.phi_se && foc.norm < 3.0 * foc.combined_se &&
                      t < kSolveSeconds;
    ok = ok && pass;
    os << "I=" << count << " a*=" << num(eq.alpha_star) << " |Phi|/se=" << num(std::abs(eq.phi_residual) / eq.phi_se)
       << " foc/se=" << num(foc.norm / foc.combined_se) << " " << num(t) << "s; ";
  }
  return {ok, os.str()};
}

struct Sweep {
  std::vector<double> alpha, eff;
  double seconds = 0.0;
};

Sweep run_sweep(int lo, int hi) {
  const auto t0 = Clock::now();
  Sweep s;
  for (int count = lo; count <= hi; ++count) {
    const auto eq = solve_alpha_star(count, kMc, kSweepTol);
    s.alpha.push_back(eq.alpha_star);
    s.eff.push_back(eq.efficiency.value);
  }
  s.seconds = seconds_since(t0);
  return s;
}

Outcome criterion4() {
  const auto s = run_sweep(2, 20);
  bool increasing = true, concave = true;
  double max_d2 = -1.0;
  for (std::size_t k = 1; k < s.alpha.size(); ++k) increasing = increasing && s.alpha[k] > s.alpha[k - 1];
  for (std::size_t k = 2; k < s.alpha.size(); ++k) {
    const double d2 = (s.alpha[k] - s.alpha[k - 1]) - (s.alpha[k - 1] - s.alpha[k - 2]);
    max_d2 = std::max(max_d2, d2);
    concave = concave && d2 < 0.0;
  }
  return {increasing && concave && s.seconds < kSweepSeconds,
          "alpha*(2)=" + num(s.alpha.front()) + " alpha*(20)=" + num(s.alpha.back()) +
              (increasing ? " increasing" : " NOT increasing") + ", max second difference " + num(max_d2) + ", " +
              num(s.seconds) + " s"};
}

Outcome criterion5() {
  const auto s = run_sweep(2, 20);
  bool decreasing = true;
  for (std::size_t k = 1; k < s.eff.size(); ++k) decreasing = decreasing && s.eff[k] < s.eff[k - 1];
  const auto e80 = solve_alpha_star(80, kMc).efficiency;
  const auto e100 = solve_alpha_star(100, kMc).efficiency;
  const double gap = e80.value - e100.value;
  return {decreasing && gap < kPlateauGap,
          std::string(decreasing ? "decreasing over 2..20" : "NOT decreasing over 2..20") + ", eff(80)=" +
              num(e80.value) + " eff(100)=" + num(e100.value) + " gap " + num(gap) + " (limit " + num(kPlateauGap) +
              ")"};
}

SignalModel three_normals(double noise) {
  ModelConfig c;
  c.specs = {dist::Normal{-1.5, 1.0}, dist::Normal{0.0, 0.6}, dist::Normal{1.2, 1.4}};
  c.noise = noise;
  return c.build();
}

SignalModel three_disjoint_uniforms(double noise) {
  const StateGrid g(-1.0, 3.0, 257);
  std::vector<std::vector<double>> v(3, std::vector<double>(257, 0.0));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 16 + 64 * i; k < 80 + 64 * i; ++k) v[i][k] = 1.0;
  return build_signal_model(g, {dist::Tabulated{v[0]}, dist::Tabulated{v[1]}, dist::Tabulated{v[2]}},
                            uniform_prior(3), noise);
}

Outcome criterion6() {
  const auto eq = solve_alpha_star(3, kMc);
  auto run = [&](const SignalModel& m) {
    return pipeline_efficiency(m, informed_demand(m, eq, information_intensity(m)).portfolios, kPipelinePaths, 7);
  };
  const std::array<McEstimate, 4> est{run(three_normals(1.0)), run(three_disjoint_uniforms(1.0)),
                                      run(three_normals(kNoiseScale)), run(three_disjoint_uniforms(kNoiseScale))};
  const std::array<const char*, 4> names{"normals", "uniforms", "normals x10", "uniforms x10"};
  bool ok = true;
  std::ostringstream os;
  for (std::size_t a = 0; a < est.size(); ++a) {
    os << names[a] << " " << num(est[a].value) << " (se " << num(est[a].se) << "); ";
    for (std::size_t b = a + 1; b < est.size(); ++b) {
      ok = ok && std::abs(est[a].value - est[b].value) < 3.0 * std::hypot(est[a].se, est[b].se);
    }
  }
  os << "canonical " << num(eq.efficiency.value);
  return {ok, os.str()};
}

Outcome criterion7() {
  InformedDemand d;
  EquilibriumSolution eq;
  std::ostringstream os;
  bool ok = true;

  solved_demand_model(mean_example_config(), d, eq);
  const auto bull = sign_pattern(d.portfolios[0]);
  ok = ok && bull == std::vector<int>{-1, 1};
  os << "mean s1 " << pattern_str(bull);

  solved_demand_model(vol_example_config(), d, eq);
  const auto straddle = sign_pattern(d.portfolios[0]);
  const auto butterfly = sign_pattern(d.portfolios[1]);
  ok = ok && straddle == std::vector<int>{1, -1, 1} && butterfly == std::vector<int>{-1, 1, -1};
  os << ", high-vol " << pattern_str(straddle) << ", low-vol " << pattern_str(butterfly);

  // Right-skewed s1: demand odd around the common mean, long the right tail.
  const auto skew = solved_demand_model(skew_example_config(), d, eq);
  const auto& w = d.portfolios[0];
  const auto& g = skew.grid();
  const std::size_t n = g.size();
  double peak = 0.0, odd = 0.0;
  for (double v : w) peak = std::max(peak, std::abs(v));
  for (std::size_t k = 0; k < n; ++k) odd = std::max(odd, std::abs(w[k] + w[n - 1 - k]));
  std::vector<double> cubic(n);
  for (std::size_t k = 0; k < n; ++k) cubic[k] = g[k] * g[k] * g[k] * w[k];
  const double third = trapezoid(cubic, g.spacing());
  const auto sp = sign_pattern(w);
  ok = ok && odd < kAntisymmetryTol * peak && third > 0.0 && sp.front() < 0 && sp.back() > 0;
  os << ", skew s1 " << pattern_str(sp) << " oddness " << num(odd / peak) << " third moment " << num(third);
  return {ok, os.str()};
}

// Grid [0, 4] with spacing 1/64. Signal 1 lives on A = [0.5, 1.5], signal 2
// on B = [2, 3]; both put the same density on C = [3.25, 3.75].
SignalModel dyadic_step_model() {
  const StateGrid g(0.0, 4.0, 257);
  std::vector<double> a(257, 0.0), b(257, 0.0);
  for (std::size_t k = 32; k <= 96; ++k) a[k] = 1.0;
  for (std::size_t k = 128; k <= 192; ++k) b[k] = 1.0;
  for (std::size_t k = 208; k <= 240; ++k) a[k] = b[k] = 0.5;
  return build_signal_model(g, {dist::Tabulated{a}, dist::Tabulated{b}}, {0.5, 0.5}, 1.0);
}

Outcome criterion8() {
  const auto m = dyadic_step_model();
  const auto eq = solve_alpha_star(2, kMc);
  const auto idx = uniform_subgrid(m.grid(), 65);  // every fourth node
  auto pos = [&](double x) {
    const std::size_t node = m.grid().nearest_index(x);
    return static_cast<std::size_t>(std::find(idx.begin(), idx.end(), node) - idx.begin());
  };
  const std::size_t x = pos(0.75), z = pos(1.25), w = pos(2.5), y = pos(3.5);
  bool ok = true;
  std::ostringstream os;
  for (std::size_t observed = 0; observed < 2; ++observed) {
    const auto im = price_impact_matrix(m, eq, observed, kMc, idx);
    const bool cross = im.lambda(x, w) + 3.0 * im.se(x, w) < 0.0;
    double flat = 0.0;
    bool flat_ok = true;
    for (std::size_t b = 0; b < idx.size(); ++b) {
      flat = std::max(flat, std::abs(im.lambda(y, b)));
      flat_ok = flat_ok && std::abs(im.lambda(y, b)) <= 3.0 * im.se(y, b) + kImpactFloor;
    }
    const double same = std::abs(im.lambda(x, z) - im.lambda(x, x));
    const bool same_ok = same <= 3.0 * std::hypot(im.se(x, z), im.se(x, x)) + kImpactFloor;
    ok = ok && cross && flat_ok && same_ok;
    os << "s" << observed + 1 << ": L(A,B)=" << num(im.lambda(x, w)) << " (se " << num(im.se(x, w))
       << "), max|L(C,.)|=" << num(flat) << ", |L(x,z)-L(x,x)|=" << num(same) << "; ";
  }
  return {ok, os.str()};
}

Outcome criterion9() {
  const auto m = vol_example_config().build();
  const auto eq = solve_alpha_star(2, kMc);
  const auto idx = uniform_subgrid(m.grid(), 101);
  const double k = prior_mean(m);
  std::vector<double> put(idx.size()), call(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    put[a] = std::max(k - m.grid()[idx[a]], 0.0);
    call[a] = std::max(m.grid()[idx[a]] - k, 0.0);
  }
  const auto c1 = derivative_cross_impact_se(put, call, price_impact_matrix(m, eq, 0, kMc, idx));
  const auto c2 = derivative_cross_impact_se(put, call, price_impact_matrix(m, eq, 1, kMc, idx));
  const double se = std::hypot(c1.se, c2.se);
  return {c1.value - c2.value > 3.0 * se, "s1 " + num(c1.value) + ", s2 " + num(c2.value) + ", difference " +
                                              num(c1.value - c2.value) + " vs 3 se " + num(3.0 * se)};
}

Outcome criterion10() {
  bool ok = true;
  std::ostringstream os;
  // With two mirror-image signals every orthogonal portfolio pays the same
  // against each belief, so the profit vanishes path by path; the
  // three-signal model and the vol example exercise the martingale instead.
  const std::array<std::pair<const char*, SignalModel>, 2> models{
      {{"three normals", three_normals(1.0)}, {"vol", example_config("vol").build()}}};
  for (const auto& [name, m] : models) {
    InformedDemand d;
    EquilibriumSolution eq;
    solve_demand(m, d, eq);
    Portfolio bump(m.grid().size());
    for (std::size_t k = 0; k < bump.size(); ++k) bump[k] = std::exp(-0.5 * std::pow(m.grid()[k] - 0.4, 2) / 0.5);
    const auto w = orthogonalize_against(bump, d.portfolios, m);
    Portfolio w10 = w;
    for (double& v : w10) v *= 10.0;
    const auto r = zero_overlap_profit_check(m, d.portfolios, w, kProfitPaths, 11);
    const auto r10 = zero_overlap_profit_check(m, d.portfolios, w10, kProfitPaths, 11);
    ok = ok && std::abs(r.value) < 3.0 * r.se && std::abs(r10.value) < 3.0 * r10.se;
    os << name << ": " << num(r.value) << " (se " << num(r.se) << "), x10 " << num(r10.value) << " (se "
       << num(r10.se) << "); ";
  }
  return {ok, os.str()};
}

Outcome criterion11() {
  const SmileExperiment exp;
  const double alpha = solve_alpha_star(2, kMc).alpha_star;
  bool ok = true;
  std::ostringstream os;
  double prev_curv = -1.0;
  for (std::size_t c = 0; c < exp.sigma_high.size(); ++c) {
    const auto t0 = Clock::now();
    SmileOptions opt;
    opt.n_realizations = exp.realizations;
    opt.n_strikes = exp.strikes;
    opt.maturity = exp.maturity;
    opt.sigma_high = exp.sigma_high[c];
    const auto curve = insider_smile(exp.model(c).build(), alpha, opt);
    const double t = seconds_since(t0);
    const auto& p = curve.points;
    const std::size_t lo = smile_argmin(curve);
    const bool interior = lo > 0 && lo + 1 < p.size();
    const double curv = atm_curvature(curve);
    // A mixture smile is bounded by the largest vol, so its far wings must
    // bend over: curvature is asserted on the central band |k| <= sigma_low
    // sqrt(T), monotonicity away from the minimum on the whole strike range.
    const double band = exp.sigma_low * std::sqrt(exp.maturity);
    bool convex = true;
    for (std::size_t k = 1; k + 1 < p.size(); ++k) {
      if (k < lo) convex = convex && p[k].implied_vol < p[k - 1].implied_vol;
      if (k > lo) convex = convex && p[k].implied_vol > p[k - 1].implied_vol;
      if (std::abs(p[k].log_moneyness) > band) continue;
      convex = convex && p[k - 1].implied_vol - 2.0 * p[k].implied_vol + p[k + 1].implied_vol >= 0.0;
    }
    if (!p.empty() && lo + 1 < p.size()) convex = convex && p.back().implied_vol > p[p.size() - 2].implied_vol;
    const bool pass = interior && convex && curv > 0.0 && curv > prev_curv && t < kSmileSeconds;
    ok = ok && pass;
    prev_curv = curv;
    os << "sigma1=" << num(exp.sigma_high[c]) << " min at k=" << num(p[lo].log_moneyness) << " ATM curvature "
       << num(curv) << (convex ? " convex" : " NOT convex") << " " << num(t) << "s; ";
  }
  return {ok, os.str()};
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(ADKYLE_CLI_PATH) + " " + args + " 2>/dev/null";
  std::FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {};
  std::string out;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  if (status != 0) out = "exit status " + std::to_string(status);
  return out;
}

Outcome criterion12() {
  bool ok = true;
  std::ostringstream os;

  double worst_rt = 0.0;
  for (const char* name : {"kyle_options", "vol", "skew"}) {
    InformedDemand d;
    EquilibriumSolution eq;
    const auto m = solved_demand_model(example_config(name), d, eq);
    for (const auto& w : d.portfolios) {
      const auto back = reconstruct(breeden_litzenberger(w, m.grid(), prior_mean(m) + 0.3 * m.grid().spacing()), m.grid());
      double peak = 0.0, err = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        peak = std::max(peak, std::abs(w[k]));
        err = std::max(err, std::abs(back[k] - w[k]));
      }
      worst_rt = std::max(worst_rt, err / peak);
    }

    double worst_mass = 0.0, worst_sum = 0.0;
    for (std::size_t p = 0; p < 200; ++p) {
      RngStream rng(derive_seed(99, {p}));
      const std::size_t truth = p % m.signal_count();
      const auto path = simulate_order_flow(d.portfolios[truth], m, rng);
      const auto post = posterior_from_flow(overlap_statistic(path, d.portfolios, m), d.portfolios, m);
      double sum = 0.0;
      for (double q : post.probs) sum += q;
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      worst_mass = std::max(worst_mass, std::abs(m.integrate(pricing_kernel(post.probs, m)) - 1.0));
    }
    ok = ok && worst_mass < kKernelMassTol && worst_sum < kPosteriorSumTol;
    os << name << " kernel mass err " << num(worst_mass) << " posterior sum err " << num(worst_sum) << "; ";
  }
  ok = ok && worst_rt < kRoundTripTol;
  os << "BL round trip " << num(worst_rt) << "; ";

  // The canonical sampler posteriors feed every expectation above.
  double worst_q = 0.0;
  RngStream rng(5);
  for (int k = 0; k < 1000; ++k) {
    const auto q = sample_canonical_posterior(2.0, 10, k % 10, rng);
    double s = 0.0;
    for (double v : q) s += v;
    worst_q = std::max(worst_q, std::abs(s - 1.0));
  }
  ok = ok && worst_q < kPosteriorSumTol;

  bool same = true;
  for (const char* args : {"solve --signals 2 --seed 7", "demand --example vol --draws 20000",
                           "simulate --example skew --paths 2 --draws 20000", "toy --profile-curve --step 0.5",
                           "impact --example kyle_options --subgrid 21 --draws 20000"}) {
    const std::string a = run_cli(args);
    for (const char* threads : {"--threads 1", "--threads 3"}) {
      same = same && !a.empty() && a.rfind("exit status", 0) != 0 && a == run_cli(std::string(threads) + " " + args);
    }
  }
  ok = ok && same;
  os << "canonical posterior sum err " << num(worst_q) << "; CLI reruns " << (same ? "byte-identical" : "DIFFER");
  return {ok, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2,  criterion3,  criterion4,
                                                       criterion5, criterion6,  criterion7,  criterion8,
                                                       criterion9, criterion10, criterion11, criterion12};
  std::vector<std::size_t> selected;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc) {
      const int n = std::atoi(argv[++a]);
      if (n < 1 || n > static_cast<int>(criteria.size())) {
        std::cerr << "criterion must be in 1.." << criteria.size() << '\n';
        return 1;
      }
      selected.push_back(static_cast<std::size_t>(n));
    } else {
      std::cerr << "usage: adkyle_acceptance [--criterion N]...\n";
      return 1;
    }
  }
  if (selected.empty())
    for (std::size_t n = 1; n <= criteria.size(); ++n) selected.push_back(n);

  int failures = 0;
  for (std::size_t n : selected) {
    Outcome r;
    try {
      r = criteria[n - 1]();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    failures += r.pass ? 0 : 1;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << r.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
