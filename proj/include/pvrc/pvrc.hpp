#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pvrc {

// Score normalization used when class prototype counts differ.
enum class PvrcNorm {
  // rho^2 = xi / (2 (n_c - 1)^2), the constant that follows from the
  // volume-ratio derivation.
  derived,
  // 4 (n_c - 1)^4 * xi, the literal correction factor printed in the
  // source material; kept selectable for A/B comparison.
  paper_literal,
};

struct ClassModel {
  int class_id = 0;
  Eigen::MatrixXd prototypes;  // q x p, one prototype per column
  // (p+1) x (p+1) bordered squared-distance matrix of the prototypes.
  Eigen::MatrixXd q_matrix;
  Eigen::PartialPivLU<Eigen::MatrixXd> q_solver;
  double regularization_applied = 0.0;

  int prototype_count() const { return static_cast<int>(prototypes.cols()); }
  int dim() const { return static_cast<int>(prototypes.rows()); }
  // n_c: prototypes plus the test point.
  int point_count() const { return prototype_count() + 1; }
};

struct PvrcScore {
  double xi = 0.0;      // |B Q^-1 B^T|
  double rho_sq = 0.0;  // xi / (2 (n_c - 1)^2)
  int class_id = 0;
};

ClassModel train_class(int class_id, const Eigen::MatrixXd& prototypes);
ClassModel train_class(int class_id,
                       const std::vector<Eigen::VectorXd>& prototypes);

// Fast path: squared distances to the prototypes bordered by 1, folded
// through the cached factorization of the prototype bordered matrix.
PvrcScore score(const Eigen::VectorXd& test, const ClassModel& model);

// Slow oracle: the ratio of the two simplex volumes computed from scratch.
double naive_ratio(const Eigen::VectorXd& test,
                   const Eigen::MatrixXd& prototypes);

// Comparable per-model score under the given normalization: xi when all
// models share a prototype count, the normalized form otherwise.
double comparable_score(const PvrcScore& s, int prototype_count,
                        bool equal_counts, PvrcNorm norm);

// Argmin over models; ties broken by lowest class_id.
int classify(const Eigen::VectorXd& test, const std::vector<ClassModel>& models,
             PvrcNorm norm = PvrcNorm::derived);

}  // namespace pvrc
