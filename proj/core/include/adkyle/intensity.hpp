#pragma once

#include <Eigen/Dense>
#include <ostream>

#include "adkyle/model.hpp"

namespace adkyle {

/// Noise-adjusted Gram matrix L^2, its PSD square root L and the
/// Moore-Penrose pseudoinverse of L.
struct IntensityMatrix {
  Eigen::MatrixXd gram;
  Eigen::MatrixXd sqrt;
  Eigen::MatrixXd pinv;
  Eigen::Index rank = 0;
  double eigen_tol = 0.0;
};

/// [int eta_i eta_j / sigma^2 dx] by the trapezoid rule. Non-constant noise
/// throws ConfigError unless `allow_varying_noise` is set.
Eigen::MatrixXd gram_matrix(const SignalModel& model, bool allow_varying_noise = false);

/// Symmetric PSD square root. Eigenvalues within `rel_tol * max|lambda|` of
/// zero are clipped; anything more negative throws NumericalError.
Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& gram, double rel_tol = 1e-10);

struct PseudoInverse {
  Eigen::MatrixXd matrix;
  Eigen::Index rank = 0;
};

/// Moore-Penrose pseudoinverse of a symmetric matrix; singular values below
/// `rel_tol * max` count as zero.
PseudoInverse pseudo_inverse(const Eigen::MatrixXd& sym, double rel_tol = 1e-10);

IntensityMatrix information_intensity(const SignalModel& model, bool allow_varying_noise = false);

/// Row-major CSV with header i,j,value (0-based indices).
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace adkyle
