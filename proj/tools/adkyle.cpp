#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "adkyle/builtin_configs.hpp"
#include "adkyle/csv.hpp"
#include "adkyle/demand.hpp"
#include "adkyle/equilibrium.hpp"
#include "adkyle/error.hpp"
#include "adkyle/intensity.hpp"
#include "adkyle/market.hpp"
#include "adkyle/model_io.hpp"
#include "adkyle/rng.hpp"
#include "adkyle/smile.hpp"
#include "adkyle/svg.hpp"
#include "adkyle/toy.hpp"

namespace fs = std::filesystem;
using namespace adkyle;

namespace {

struct Common {
  std::string out_dir;
  unsigned threads = 0;
};

struct McOptions {
  std::size_t draws = 200000;
  std::uint64_t seed = 42;
  double tol = 1e-4;

  McConfig config() const {
    McConfig mc{draws, seed, true};
    mc.validate();
    return mc;
  }
};

struct ModelSource {
  std::string config_path;
  std::string example;

  ModelConfig load() const {
    if (!config_path.empty() && !example.empty()) throw ConfigError("pass either --config or --example, not both");
    if (!config_path.empty()) return load_model_config(config_path);
    return example_config(example.empty() ? "kyle_options" : example);
  }
};

// Primary table goes to stdout; with --out-dir every artifact is also written there.
class Outputs {
 public:
  explicit Outputs(const Common& c) : dir_(c.out_dir) {
    if (dir_.empty()) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw ConfigError("cannot create output directory " + dir_.string());
  }

  void primary(const std::string& name, const std::string& csv) const {
    std::cout << csv;
    file(name, csv);
  }

  void file(const std::string& name, const std::string& content) const {
    if (dir_.empty()) return;
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw ConfigError("cannot write " + p.string());
  }

 private:
  fs::path dir_;
};

std::size_t signal_index(int one_based, const SignalModel& model) {
  if (one_based < 1 || static_cast<std::size_t>(one_based) > model.signal_count()) {
    throw ConfigError("signal must be in 1.." + std::to_string(model.signal_count()));
  }
  return static_cast<std::size_t>(one_based - 1);
}

std::vector<int> parse_signal_range(const std::string& text) {
  auto parse_int = [&](std::string_view s) {
    int v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("bad signal range \"" + text + "\"");
    return v;
  };
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = parse_int(std::string_view(text).substr(0, dots));
    const int hi = parse_int(std::string_view(text).substr(dots + 2));
    for (int i = lo; i <= hi; ++i) out.push_back(i);
  } else {
    std::string_view rest(text);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      out.push_back(parse_int(rest.substr(0, comma)));
      rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
    }
  }
  if (out.empty()) throw ConfigError("empty signal range \"" + text + "\"");
  return out;
}

std::vector<double> as_doubles(const std::vector<int>& v) { return {v.begin(), v.end()}; }

int cmd_solve(const Common& c, int signals, const McOptions& m) {
  const Outputs out(c);
  const auto eq = solve_alpha_star(signals, m.config(), m.tol);
  std::ostringstream os;
  CsvWriter w(os, {"I", "alpha_star", "phi_residual", "phi_se", "efficiency", "efficiency_se"});
  w.row(eq.signals, eq.alpha_star, eq.phi_residual, eq.phi_se, eq.efficiency.value, eq.efficiency.se);
  out.primary("solve.csv", os.str());
  return 0;
}

int cmd_sweep(const Common& c, const std::string& range, const McOptions& m) {
  const auto counts = parse_signal_range(range);
  const Outputs out(c);
  std::ostringstream os;
  CsvWriter w(os, {"I", "alpha_star", "phi_residual", "phi_se", "efficiency", "efficiency_se",
                   "log_likelihood_ratio"});
  std::vector<double> alpha, eff, llr;
  for (int count : counts) {
    const CanonicalSampler sampler(count, m.config());
    const auto eq = solve_alpha_star(sampler, m.tol);
    const double off = sampler.off_signal_weight(eq.alpha_star).value;
    const double ratio = std::log(eq.efficiency.value / ((count - 1) * off));
    w.row(count, eq.alpha_star, eq.phi_residual, eq.phi_se, eq.efficiency.value, eq.efficiency.se, ratio);
    alpha.push_back(eq.alpha_star);
    eff.push_back(eq.efficiency.value);
    llr.push_back(ratio);
  }
  out.primary("sweep.csv", os.str());
  const auto xs = as_doubles(counts);
  out.file("alpha_star.svg", render_svg({"Equilibrium constant", "I", "alpha*", {{"alpha*", xs, alpha, ""}}}));
  out.file("efficiency.svg", render_svg({"Information efficiency", "I", "E[q_i]", {{"efficiency", xs, eff, ""}}}));
  out.file("log_likelihood_ratio.svg",
           render_svg({"Log likelihood ratio", "I", "log ratio", {{"log ratio", xs, llr, ""}}}));
  return 0;
}

struct SolvedModel {
  SignalModel model;
  EquilibriumSolution eq;
  InformedDemand demand;
};

SolvedModel solve_model(const ModelSource& src, const McOptions& m) {
  const ModelConfig cfg = src.load();
  SignalModel model = cfg.build();
  const auto intensity = information_intensity(model);
  auto eq = solve_alpha_star(static_cast<int>(model.signal_count()), m.config(), m.tol);
  auto demand = informed_demand(model, eq, intensity);
  return {std::move(model), std::move(eq), std::move(demand)};
}

int cmd_demand(const Common& c, const ModelSource& src, const McOptions& m) {
  const Outputs out(c);
  const auto s = solve_model(src, m);
  const std::size_t count = s.model.signal_count();
  std::vector<std::string> header{"x"};
  for (std::size_t i = 0; i < count; ++i) header.push_back("W_star_s" + std::to_string(i + 1));
  std::ostringstream os;
  CsvWriter w(os, header);
  const auto& g = s.model.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    std::vector<double> row{g[k]};
    for (std::size_t i = 0; i < count; ++i) row.push_back(s.demand.portfolios[i][k]);
    w.row(row);
  }
  out.primary("demand.csv", os.str());
  SvgChart chart{"Informed demand", "x", "W*(x, s)", {}};
  const std::vector<std::string> dashes{"", "6 4", "2 3", "8 3 2 3"};
  for (std::size_t i = 0; i < count; ++i) {
    chart.series.push_back({"s" + std::to_string(i + 1), g.points(), s.demand.portfolios[i], dashes[i % dashes.size()]});
  }
  out.file("demand.svg", render_svg(chart));
  return 0;
}

int cmd_decompose(const Common& c, const ModelSource& src, const McOptions& m, int signal,
                  std::optional<double> k0) {
  const Outputs out(c);
  const auto s = solve_model(src, m);
  const std::size_t i = signal_index(signal, s.model);
  const double pivot = k0.value_or(prior_mean(s.model));
  const auto dec = breeden_litzenberger(s.demand.portfolios[i], s.model.grid(), pivot);
  std::ostringstream os;
  CsvWriter w(os, {"K", "side", "density"});
  w.row(dec.k0, "cash", dec.cash);
  w.row(dec.k0, "futures", dec.futures);
  for (std::size_t k = 0; k < dec.strikes.size(); ++k) {
    w.row(dec.strikes[k], side_name(dec.sides[k]), dec.option_density[k]);
  }
  out.primary("decompose.csv", os.str());
  out.file("decompose.svg", render_svg({"Option decomposition, s" + std::to_string(signal), "K", "density",
                                         {{"options", dec.strikes, dec.option_density, ""}}}));
  return 0;
}

int cmd_simulate(const Common& c, const ModelSource& src, const McOptions& m, int signal, std::size_t paths) {
  if (paths == 0) throw ConfigError("--paths must be positive");
  const Outputs out(c);
  const auto s = solve_model(src, m);
  const std::size_t i = signal_index(signal, s.model);
  const auto& g = s.model.grid();
  std::ostringstream flows, kernels, posteriors;
  CsvWriter wf(flows, {"path_id", "x", "omega"});
  CsvWriter wk(kernels, {"path_id", "x", "price"});
  CsvWriter wp(posteriors, {"path_id", "signal", "probability"});
  SvgChart chart{"Order flow, true signal s" + std::to_string(signal), "x", "omega", {}};
  for (std::size_t p = 0; p < paths; ++p) {
    RngStream rng(derive_seed(m.seed, {0x51u, p}));
    const auto path = simulate_order_flow(s.demand.portfolios[i], s.model, rng);
    const auto post = posterior_from_flow(overlap_statistic(path, s.demand.portfolios, s.model),
                                          s.demand.portfolios, s.model);
    const auto kernel = pricing_kernel(post.probs, s.model);
    for (std::size_t k = 0; k < g.size(); ++k) {
      wf.row(p, g[k], path.cumulative[k]);
      wk.row(p, g[k], kernel[k]);
    }
    for (std::size_t j = 0; j < post.probs.size(); ++j) wp.row(p, j + 1, post.probs[j]);
    if (p < 8) chart.series.push_back({"path " + std::to_string(p), g.points(), path.cumulative, ""});
  }
  out.primary("simulate.csv", flows.str());
  out.file("kernel.csv", kernels.str());
  out.file("posterior.csv", posteriors.str());
  out.file("simulate.svg", render_svg(chart));
  return 0;
}

int cmd_impact(const Common& c, const ModelSource& src, const McOptions& m, int signal, std::size_t subgrid,
               bool straddle) {
  const Outputs out(c);
  const auto s = solve_model(src, m);
  const std::size_t i = signal_index(signal, s.model);
  const auto idx = uniform_subgrid(s.model.grid(), subgrid);
  const CanonicalSampler sampler(static_cast<int>(s.model.signal_count()), m.config());
  const auto impact = price_impact_matrix(s.model, s.eq.alpha_star, sampler, i, idx);
  std::ostringstream os;
  CsvWriter w(os, {"x", "y", "lambda", "se"});
  const std::size_t n = impact.states.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) w.row(impact.states[a], impact.states[b], impact.lambda(a, b), impact.se(a, b));
  }
  out.primary("impact.csv", os.str());
  if (!straddle && src.example != "vol") return 0;

  // Put and call struck at the prior mean, evaluated on the impact subgrid.
  const double k = prior_mean(s.model);
  std::vector<double> put(n), call(n);
  for (std::size_t a = 0; a < n; ++a) {
    put[a] = std::max(k - impact.states[a], 0.0);
    call[a] = std::max(impact.states[a] - k, 0.0);
  }
  std::ostringstream rs;
  CsvWriter wr(rs, {"signal", "straddle_cross_impact", "se"});
  std::vector<McEstimate> est;
  for (std::size_t j = 0; j < s.model.signal_count(); ++j) {
    const auto mj = j == i ? impact : price_impact_matrix(s.model, s.eq.alpha_star, sampler, j, idx);
    est.push_back(derivative_cross_impact_se(put, call, mj));
    wr.row(j + 1, est.back().value, est.back().se);
  }
  out.file("straddle_cross_impact.csv", rs.str());
  std::cerr << "straddle put-call cross impact at K = " << format_number(k) << '\n';
  for (std::size_t j = 0; j < est.size(); ++j) {
    std::cerr << "  s" << j + 1 << ": " << format_number(est[j].value) << " (se " << format_number(est[j].se)
              << ")\n";
  }
  if (est.size() >= 2) {
    const double diff = est[0].value - est[1].value;
    const double se = std::hypot(est[0].se, est[1].se);
    std::cerr << "  s1 - s2: " << format_number(diff) << " (combined se " << format_number(se) << "), "
              << (diff > 3.0 * se ? "higher under s1" : "not separated from s2") << '\n';
  }
  return 0;
}

int cmd_smile(const Common& c, const std::string& config_path, const McOptions& m) {
  const Outputs out(c);
  SmileExperiment exp;
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open smile config " + config_path);
    std::ostringstream text;
    text << in.rdbuf();
    exp = parse_smile_experiment(text.str());
  }
  // alpha* depends on the signal count only.
  const auto eq = solve_alpha_star(2, m.config(), m.tol);
  std::ostringstream os;
  CsvWriter w(os, {"sigma_high", "log_moneyness", "implied_vol", "se", "n_valid"});
  SvgChart chart{"Insider smile", "log moneyness", "implied vol", {}};
  const std::vector<std::string> dashes{"", "6 4", "2 3"};
  for (std::size_t curve = 0; curve < exp.sigma_high.size(); ++curve) {
    const auto model = exp.model(curve).build();
    SmileOptions opt;
    opt.n_realizations = exp.realizations;
    opt.n_strikes = exp.strikes;
    opt.maturity = exp.maturity;
    opt.seed = exp.seed.value_or(m.seed);
    opt.sigma_high = exp.sigma_high[curve];
    const auto smile = insider_smile(model, eq.alpha_star, opt);
    std::vector<double> ks, vs;
    for (const auto& p : smile.points) {
      w.row(exp.sigma_high[curve], p.log_moneyness, p.implied_vol, p.se, p.n_valid);
      ks.push_back(p.log_moneyness);
      vs.push_back(p.implied_vol);
    }
    chart.series.push_back({"sigma1 = " + format_number(exp.sigma_high[curve]), ks, vs,
                            dashes[curve % dashes.size()]});
  }
  out.primary("smile.csv", os.str());
  out.file("smile.svg", render_svg(chart));
  return 0;
}

int cmd_toy(const Common& c, bool profile, double alpha, double alpha_max, double step, std::size_t paths,
            const McOptions& m) {
  const Outputs out(c);
  std::ostringstream os;
  if (!profile) {
    const auto check = toy_cross_check(alpha, paths, m.seed);
    CsvWriter w(os, {"alpha", "paths", "max_posterior_deviation", "max_price_deviation"});
    w.row(alpha, paths, check.max_posterior_deviation, check.max_price_deviation);
    out.primary("toy_cross_check.csv", os.str());
    return 0;
  }
  if (!(step > 0.0) || !(alpha_max > 0.0)) throw ConfigError("--alpha-max and --step must be positive");
  CsvWriter w(os, {"alpha", "expected_profit", "se"});
  std::vector<double> as, ps;
  const auto steps = static_cast<std::size_t>(std::floor(alpha_max / step + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double a = static_cast<double>(k) * step;
    const auto p = toy_expected_profit(a, m.config());
    w.row(a, p.value, p.se);
    as.push_back(a);
    ps.push_back(p.value);
  }
  out.primary("toy_profit.csv", os.str());
  out.file("toy_profit.svg", render_svg({"Expected insider profit", "alpha", "profit", {{"profit", as, ps, ""}}}));
  return 0;
}

void add_mc(CLI::App* sub, McOptions& m) {
  sub->add_option("--draws", m.draws, "Monte Carlo draws")->capture_default_str();
  sub->add_option("--seed", m.seed, "master seed")->capture_default_str();
  sub->add_option("--tol", m.tol, "bisection tolerance on alpha")->capture_default_str();
}

void add_model(CLI::App* sub, ModelSource& s) {
  sub->add_option("--config", s.config_path, "model JSON file");
  sub->add_option("--example", s.example, "built-in model: kyle_options, vol, skew");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Options-market insider trading equilibria"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--out-dir", common.out_dir, "also write every artifact into this directory");
  app.add_option("--threads", common.threads, "cap on worker threads (0 = all cores)");

  McOptions solve_mc, sweep_mc, demand_mc, decompose_mc, simulate_mc, impact_mc, smile_mc, toy_mc;
  sweep_mc.tol = 1e-6;
  ModelSource demand_src, decompose_src, simulate_src, impact_src;

  int solve_signals = 0;
  auto* solve = app.add_subcommand("solve", "solve for alpha* at I signals");
  solve->add_option("--signals", solve_signals, "number of signals I")->required();
  add_mc(solve, solve_mc);

  std::string sweep_range;
  auto* sweep = app.add_subcommand("sweep", "alpha*, efficiency and likelihood ratio across I");
  sweep->add_option("--signals", sweep_range, "range lo..hi or list a,b,c")->required();
  add_mc(sweep, sweep_mc);

  auto* demand = app.add_subcommand("demand", "informed demand W*(x, s) per signal");
  add_model(demand, demand_src);
  add_mc(demand, demand_mc);

  int decompose_signal = 1;
  std::optional<double> decompose_k0;
  auto* decompose = app.add_subcommand("decompose", "cash, futures and option density of W*(., s)");
  add_model(decompose, decompose_src);
  add_mc(decompose, decompose_mc);
  decompose->add_option("--signal", decompose_signal, "signal (1-based)")->capture_default_str();
  decompose->add_option("--k0", decompose_k0, "pivot strike (default: prior mean)");

  int simulate_signal = 1;
  std::size_t simulate_paths = 10;
  auto* simulate = app.add_subcommand("simulate", "order flow paths, posteriors and pricing kernels");
  add_model(simulate, simulate_src);
  add_mc(simulate, simulate_mc);
  simulate->add_option("--signal", simulate_signal, "true signal (1-based)")->capture_default_str();
  simulate->add_option("--paths", simulate_paths, "number of paths")->capture_default_str();

  int impact_signal = 1;
  std::size_t impact_subgrid = 101;
  bool impact_straddle = false;
  auto* impact = app.add_subcommand("impact", "expected price impact matrix on a state subgrid");
  add_model(impact, impact_src);
  add_mc(impact, impact_mc);
  impact->add_option("--signal", impact_signal, "observed signal (1-based)")->capture_default_str();
  impact->add_option("--subgrid", impact_subgrid, "subgrid size")->capture_default_str();
  impact->add_flag("--straddle", impact_straddle, "report straddle put-call cross impact per signal");

  std::string smile_config;
  auto* smile = app.add_subcommand("smile", "implied volatility smile of the insider pricing kernel");
  smile->add_option("--config", smile_config, "smile experiment JSON");
  add_mc(smile, smile_mc);

  bool toy_profile = false;
  double toy_alpha = 1.0, toy_alpha_max = 6.0, toy_step = 0.1;
  std::size_t toy_paths = 1000;
  auto* toy = app.add_subcommand("toy", "three-state, two-signal economy");
  toy->add_flag("--profile-curve", toy_profile, "expected profit as a function of alpha");
  toy->add_option("--alpha", toy_alpha, "alpha for the engine cross-check")->capture_default_str();
  toy->add_option("--alpha-max", toy_alpha_max, "profile curve upper end")->capture_default_str();
  toy->add_option("--step", toy_step, "profile curve step")->capture_default_str();
  toy->add_option("--paths", toy_paths, "cross-check paths")->capture_default_str();
  add_mc(toy, toy_mc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    set_max_workers(common.threads);
    if (*solve) return cmd_solve(common, solve_signals, solve_mc);
    if (*sweep) return cmd_sweep(common, sweep_range, sweep_mc);
    if (*demand) return cmd_demand(common, demand_src, demand_mc);
    if (*decompose) return cmd_decompose(common, decompose_src, decompose_mc, decompose_signal, decompose_k0);
    if (*simulate) return cmd_simulate(common, simulate_src, simulate_mc, simulate_signal, simulate_paths);
    if (*impact) return cmd_impact(common, impact_src, impact_mc, impact_signal, impact_subgrid, impact_straddle);
    if (*smile) return cmd_smile(common, smile_config, smile_mc);
    if (*toy) return cmd_toy(common, toy_profile, toy_alpha, toy_alpha_max, toy_step, toy_paths, toy_mc);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
