#pragma once

#include <Eigen/Dense>

namespace pvrc::geometry {

// A point set stores one point per column (q rows, n columns).
using PointSet = Eigen::MatrixXd;

// n x n symmetric matrix of squared Euclidean distances, zero diagonal.
Eigen::MatrixXd pairwise_sq_dist(const PointSet& points);

// Borders a squared-distance matrix with a row/column of ones and a zero
// corner, producing the (n+1) x (n+1) bordered matrix whose determinant
// encodes the simplex volume.
Eigen::MatrixXd cm_matrix(const Eigen::MatrixXd& sq_dist);

// c_n = (-1)^n / (2^{n-1} ((n-1)!)^2). Exact integer arithmetic for
// n <= 20, log-space beyond that.
double unifying_factor(int n);

struct SqVolume {
  double value = 0.0;
  // Set when the raw value fell below the scale-aware tolerance and was
  // clamped to zero.
  bool degenerate = false;
};

// Squared content of the simplex spanned by the columns of `points`
// (n points span an (n-1)-simplex). Determinant by pivoted LU.
SqVolume simplex_sq_volume(const PointSet& points);

// Squared triangle area from squared side lengths.
double heron_sq_area(double a_sq, double b_sq, double c_sq);

// det([[A, B], [C, D]]) evaluated as det(A - B D^-1 C) * det(D).
// Throws if D is singular (condition estimate above 1e12).
double block_det(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 const Eigen::MatrixXd& c, const Eigen::MatrixXd& d);

}  // namespace pvrc::geometry
