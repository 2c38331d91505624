#include "pvrc/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace pvrc::geometry {

Eigen::MatrixXd pairwise_sq_dist(const PointSet& points) {
  const Eigen::Index n = points.cols();
  if (n < 1) throw std::invalid_argument("pairwise_sq_dist: empty point set");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = (points.col(i) - points.col(j)).squaredNorm();
      d(i, j) = s;
      d(j, i) = s;
    }
  }
  return d;
}

Eigen::MatrixXd cm_matrix(const Eigen::MatrixXd& sq_dist) {
  const Eigen::Index n = sq_dist.rows();
  if (n < 1 || sq_dist.cols() != n)
    throw std::invalid_argument("cm_matrix: squared-distance matrix must be square");
  const double scale = std::max(1.0, sq_dist.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sq_dist(i, i) != 0.0)
      throw std::invalid_argument("cm_matrix: nonzero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (sq_dist(i, j) < 0.0)
        throw std::invalid_argument("cm_matrix: negative squared distance");
      if (std::abs(sq_dist(i, j) - sq_dist(j, i)) > 1e-9 * scale)
        throw std::invalid_argument("cm_matrix: asymmetric squared distances");
    }
  }
  Eigen::MatrixXd q = Eigen::MatrixXd::Ones(n + 1, n + 1);
  q.topLeftCorner(n, n) = sq_dist;
  q(n, n) = 0.0;
  return q;
}

double unifying_factor(int n) {
  if (n < 2) throw std::invalid_argument("unifying_factor: n must be >= 2");
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  if (n <= 20) {
    // 2^{n-1} ((n-1)!)^2 fits a long double exactly up to n = 20.
    long double fact = 1.0L;
    for (int k = 2; k <= n - 1; ++k) fact *= k;
    const long double denom = std::pow(2.0L, n - 1) * fact * fact;
    return static_cast<double>(sign / denom);
  }
  const double log_denom = (n - 1) * std::log(2.0) + 2.0 * std::lgamma(n);
  return sign * std::exp(-log_denom);
}

SqVolume simplex_sq_volume(const PointSet& points) {
  const Eigen::Index n = points.cols();
  if (n < 2)
    throw std::invalid_argument("simplex_sq_volume: need at least 2 points");
  const Eigen::MatrixXd d = pairwise_sq_dist(points);
  const Eigen::MatrixXd q = cm_matrix(d);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(q);
  const double v_sq = unifying_factor(static_cast<int>(n)) * lu.determinant();

  // Scale-aware tolerance: a nondegenerate simplex at this length scale
  // has v^2 of order |c_n| * mean_sq^{n-1}, so clamp far below that.
  const double mean_sq = d.sum() / static_cast<double>(n * (n - 1));
  const double tol = 1e-10 *
                     std::abs(unifying_factor(static_cast<int>(n))) *
                     std::pow(mean_sq, static_cast<double>(n - 1));
  SqVolume out;
  if (v_sq < tol) {
    out.value = 0.0;
    out.degenerate = true;
  } else {
    out.value = v_sq;
  }
  return out;
}

double heron_sq_area(double a_sq, double b_sq, double c_sq) {
  // 16 S^2 = 2(a^2 b^2 + a^2 c^2 + b^2 c^2) - a^4 - b^4 - c^4
  return (2.0 * (a_sq * b_sq + a_sq * c_sq + b_sq * c_sq) - a_sq * a_sq -
          b_sq * b_sq - c_sq * c_sq) /
         16.0;
}

double block_det(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 const Eigen::MatrixXd& c, const Eigen::MatrixXd& d) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = d.rows();
  if (a.cols() != m || d.cols() != n || b.rows() != m || b.cols() != n ||
      c.rows() != n || c.cols() != m)
    throw std::invalid_argument("block_det: inconsistent block shapes");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(n - 1);
  if (smin <= 0.0 || smax / smin > 1e12)
    throw std::runtime_error("block_det: D block is singular or near-singular");

  Eigen::PartialPivLU<Eigen::MatrixXd> lu_d(d);
  const Eigen::MatrixXd schur = a - b * lu_d.solve(c);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(schur).determinant() *
         lu_d.determinant();
}

}  // namespace pvrc::geometry
