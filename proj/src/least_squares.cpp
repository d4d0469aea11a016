#include "tcal/least_squares.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "tcal/error.hpp"

namespace tcal {

HouseholderQr::HouseholderQr(Eigen::MatrixXd a) : packed_(std::move(a)) {
  const Eigen::Index m = packed_.rows();
  const Eigen::Index n = packed_.cols();
  if (m < n)
    throw ValidationError("least squares needs at least as many rows as columns");
  tau_ = Eigen::VectorXd::Zero(n);

  for (Eigen::Index j = 0; j < n; ++j) {
    auto x = packed_.col(j).tail(m - j);
    const double norm = x.norm();
    if (norm == 0.0)
      continue;
    const double alpha = x(0);
    const double beta = -std::copysign(norm, alpha);
    const double tau = (beta - alpha) / beta;

    // v = x / (alpha - beta), v(0) = 1
    Eigen::VectorXd v = x / (alpha - beta);
    v(0) = 1.0;

    auto trailing = packed_.block(j, j + 1, m - j, n - j - 1);
    if (trailing.cols() > 0) {
      const Eigen::RowVectorXd w = v.transpose() * trailing;
      trailing.noalias() -= tau * v * w;
    }
    x(0) = beta;
    x.tail(m - j - 1) = v.tail(m - j - 1);
    tau_(j) = tau;
  }
}

Eigen::MatrixXd HouseholderQr::r() const {
  const Eigen::Index n = cols();
  return packed_.topRows(n).triangularView<Eigen::Upper>();
}

Eigen::MatrixXd HouseholderQr::apply_qt(Eigen::MatrixXd b) const {
  const Eigen::Index m = rows();
  const Eigen::Index n = cols();
  if (b.rows() != m)
    throw ValidationError("right-hand side has the wrong number of rows");
  Eigen::VectorXd v;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (tau_(j) == 0.0)
      continue;
    v.resize(m - j);
    v(0) = 1.0;
    v.tail(m - j - 1) = packed_.col(j).tail(m - j - 1);
    auto rows_j = b.bottomRows(m - j);
    const Eigen::RowVectorXd w = v.transpose() * rows_j;
    rows_j.noalias() -= tau_(j) * v * w;
  }
  return b;
}

LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd &a,
                                         const Eigen::MatrixXd &b,
                                         double max_gram_condition) {
  if (a.rows() != b.rows())
    throw ValidationError("design matrix and targets differ in row count");
  const HouseholderQr qr(a);
  const Eigen::Index n = a.cols();
  const Eigen::MatrixXd r = qr.r();
  const Eigen::MatrixXd rhs = qr.apply_qt(b).topRows(n);

  // Singular values of R equal those of A.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double smin = s.size() ? s(s.size() - 1) : 0.0;

  LeastSquaresSolution out;
  out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  out.gram_condition = out.condition * out.condition;
  const double tol = smax * static_cast<double>(std::max(a.rows(), a.cols())) *
                     std::numeric_limits<double>::epsilon();
  out.rank = static_cast<int>((s.array() > tol).count());
  out.rank_deficient = !(out.gram_condition <= max_gram_condition) || out.rank < n;

  if (!out.rank_deficient) {
    out.coefficients = r.triangularView<Eigen::Upper>().solve(rhs);
  } else {
    // Minimum-norm solution through the pseudo-inverse of R.
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > tol)
        inv(i) = 1.0 / s(i);
    out.coefficients =
        svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * rhs;
  }
  return out;
}

} // namespace tcal
