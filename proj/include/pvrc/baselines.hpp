#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pvrc/classifier.hpp"

namespace pvrc::baselines {

// Nearest neighbor: best single-prototype distance per class.
ClassifierDecision nn_classify(const Eigen::VectorXd& test, const Dataset& d);

// Class mean: distance to each class's prototype mean.
ClassifierDecision cm_classify(const Eigen::VectorXd& test, const Dataset& d);

// Residual of the least-squares projection onto one class's column span.
// Falls back to a ridge (+0.01 I) when the Gram matrix is near-singular.
double lrc_distance(const Eigen::VectorXd& test,
                    const Eigen::MatrixXd& class_columns);

ClassifierDecision lrc_classify(const Eigen::VectorXd& test, const Dataset& d);

// Collaborative representation: one pooled least-squares solve, residuals
// normalized by per-class coefficient norm.
struct CrcModel {
  PooledMatrix pooled;
  Eigen::MatrixXd projector;  // (X^T X [+0.01 I])^-1 X^T
};
CrcModel crc_train(const Dataset& d);
ClassifierDecision crc_classify(const Eigen::VectorXd& test, const CrcModel& m);
ClassifierDecision crc_classify(const Eigen::VectorXd& test, const Dataset& d);

struct SrcParams {
  // Penalty is lambda_scale * ||X^T x||_inf, per query.
  double lambda_scale = 1e-3;
  // Relative objective change below which iteration stops.
  double tol = 1e-8;
  int max_iters = 5000;
};

// Sparse representation via accelerated iterative shrinkage with
// backtracking on the step size. Pooled columns are normalized to unit
// L2 before solving.
struct SrcModel {
  PooledMatrix pooled;  // columns normalized
  SrcParams params;
};
SrcModel src_train(const Dataset& d, const SrcParams& params = {});
// Coefficient vector for min 1/2 ||X g - x||^2 + lambda ||g||_1 with
// lambda = lambda_scale * ||X^T x||_inf. Sets `converged` when the
// relative objective change dropped below tol within the iteration cap.
Eigen::VectorXd src_solve(const Eigen::VectorXd& test, const SrcModel& m,
                          bool* converged = nullptr);
ClassifierDecision src_classify(const Eigen::VectorXd& test, const SrcModel& m);
ClassifierDecision src_classify(const Eigen::VectorXd& test, const Dataset& d,
                                const SrcParams& params = {});

// Two-phase ridge representation: phase 1 keeps the k columns that best
// represent the test sample, phase 2 re-represents over the kept columns
// and ranks classes by residual.
struct TptssrModel {
  PooledMatrix pooled;
  Eigen::MatrixXd projector;  // (X^T X + 0.01 I)^-1 X^T, phase 1
};
TptssrModel tptssr_train(const Dataset& d);
ClassifierDecision tptssr_classify(const Eigen::VectorXd& test,
                                   const TptssrModel& m, int k);
ClassifierDecision tptssr_classify(const Eigen::VectorXd& test,
                                   const Dataset& d, int k);

}  // namespace pvrc::baselines
