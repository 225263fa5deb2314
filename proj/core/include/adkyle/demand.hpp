#pragma once

#include <Eigen/Dense>
#include <string_view>
#include <vector>

#include "adkyle/equilibrium.hpp"
#include "adkyle/intensity.hpp"
#include "adkyle/model.hpp"

namespace adkyle {

/// W(x_k): holding of the state-x_k Arrow-Debreu security, per unit state.
using Portfolio = std::vector<double>;

struct InformedDemand {
  Eigen::MatrixXd beta;               // column i: alpha* L^+ Q e_i
  std::vector<Portfolio> portfolios;  // W*(., s_i) = sum_j beta_ji eta_j
};

/// Equilibrium demand conditional on each signal. Rank-deficient L uses
/// the pseudoinverse (minimum-norm coefficients).
InformedDemand informed_demand(const SignalModel& model, double alpha_star,
                               const IntensityMatrix& intensity);
InformedDemand informed_demand(const SignalModel& model, const EquilibriumSolution& eq,
                               const IntensityMatrix& intensity);

enum class OptionSide { Put, Call };
std::string_view side_name(OptionSide side);

/// W = cash + futures (x - K0) + puts below K0 + calls above K0, with
/// option_density[k] = W''(x_k).
struct OptionDecomposition {
  double k0 = 0.0;
  double cash = 0.0;
  double futures = 0.0;
  std::vector<double> strikes;
  std::vector<double> option_density;
  std::vector<OptionSide> sides;
};

/// Cash and futures come from a second-order expansion around the node
/// nearest k0, so quadratic portfolios are replicated exactly. Interior
/// densities use the central stencil, the two boundary strikes a one-sided
/// second-order stencil. Throws ConfigError unless lo < k0 < hi.
OptionDecomposition breeden_litzenberger(const Portfolio& w, const StateGrid& grid, double k0);

/// Evaluates the replication at every grid node. Option integrals are
/// trapezoid sums over the strike nodes with k0 inserted as a breakpoint.
Portfolio reconstruct(const OptionDecomposition& dec, const StateGrid& grid);

/// [int W eta_i dx] for every signal.
std::vector<double> payoff_orthogonality_check(const Portfolio& w, const SignalModel& model);

}  // namespace adkyle
