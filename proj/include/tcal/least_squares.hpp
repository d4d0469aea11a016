#pragma once

#include <Eigen/Core>

namespace tcal {

/// Householder QR of a tall matrix, stored compactly: R on and above the
/// diagonal, the essential parts of the reflectors below it.
class HouseholderQr {
public:
  /// Requires rows() >= cols().
  explicit HouseholderQr(Eigen::MatrixXd a);

  Eigen::Index rows() const { return packed_.rows(); }
  Eigen::Index cols() const { return packed_.cols(); }

  /// Upper-triangular cols() x cols() factor.
  Eigen::MatrixXd r() const;
  /// Q^T b, all rows.
  Eigen::MatrixXd apply_qt(Eigen::MatrixXd b) const;

private:
  Eigen::MatrixXd packed_;
  Eigen::VectorXd tau_;
};

struct LeastSquaresSolution {
  /// One column per right-hand side.
  Eigen::MatrixXd coefficients;
  /// 2-norm condition number of the design matrix; the Gram matrix A^T A has
  /// its square. Infinite when A is exactly singular.
  double condition = 0.0;
  double gram_condition = 0.0;
  int rank = 0;
  bool rank_deficient = false;
};

inline constexpr double kDefaultMaxGramCondition = 1e12;

/// min ||A x - b|| per column of b via Householder QR. When the Gram
/// condition exceeds `max_gram_condition` the solution is flagged rank
/// deficient and taken as the minimum-norm one.
LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd &a,
                                         const Eigen::MatrixXd &b,
                                         double max_gram_condition =
                                             kDefaultMaxGramCondition);

} // namespace tcal
