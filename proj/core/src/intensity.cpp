#include "adkyle/intensity.hpp"

#include <cmath>
#include <sstream>

#include "adkyle/csv.hpp"
#include "adkyle/error.hpp"

namespace adkyle {

Eigen::MatrixXd gram_matrix(const SignalModel& model, bool allow_varying_noise) {
  if (!model.constant_noise() && !allow_varying_noise) {
    throw ConfigError("information intensity requires constant noise_sigma");
  }
  const std::size_t count = model.signal_count();
  const std::size_t n = model.grid().size();
  const auto w = trapezoid_weights(n, model.grid().spacing());
  const auto& sigma = model.noise_sigma();

  Eigen::MatrixXd g(count, count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto di = model.density(i);
    for (std::size_t j = i; j < count; ++j) {
      const auto dj = model.density(j);
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += w[k] * di[k] * dj[k] / (sigma[k] * sigma[k]);
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& gram, double rel_tol) {
  if (gram.rows() != gram.cols()) throw ConfigError("matrix_sqrt needs a square matrix");
  if (gram.size() == 0) return gram;
  const Eigen::MatrixXd sym = 0.5 * (gram + gram.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues();
  const double scale = lam.cwiseAbs().maxCoeff();
  const double tol = rel_tol * scale;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (lam(k) < -tol) {
      std::ostringstream os;
      os << "Gram matrix has eigenvalue " << lam(k) << " below -" << tol;
      throw NumericalError(os.str());
    }
    lam(k) = lam(k) <= tol ? 0.0 : std::sqrt(lam(k));
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::MatrixXd r = v * lam.asDiagonal() * v.transpose();
  return 0.5 * (r + r.transpose());
}

PseudoInverse pseudo_inverse(const Eigen::MatrixXd& sym, double rel_tol) {
  if (sym.rows() != sym.cols()) throw ConfigError("pseudo_inverse needs a square matrix");
  PseudoInverse out;
  if (sym.size() == 0) {
    out.matrix = sym;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sym + sym.transpose()));
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues();
  const double tol = rel_tol * lam.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (std::abs(lam(k)) > tol) {
      lam(k) = 1.0 / lam(k);
      ++out.rank;
    } else {
      lam(k) = 0.0;
    }
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  out.matrix = v * lam.asDiagonal() * v.transpose();
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose());
  return out;
}

IntensityMatrix information_intensity(const SignalModel& model, bool allow_varying_noise) {
  IntensityMatrix im;
  im.gram = gram_matrix(model, allow_varying_noise);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im.gram, Eigen::EigenvaluesOnly);
  im.eigen_tol = 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff();
  im.sqrt = matrix_sqrt(im.gram);
  auto p = pseudo_inverse(im.sqrt);
  im.pinv = std::move(p.matrix);
  im.rank = p.rank;
  return im;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  CsvWriter csv(out, {"i", "j", "value"});
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      csv.row(static_cast<long long>(i), static_cast<long long>(j), m(i, j));
    }
  }
}

}  // namespace adkyle
