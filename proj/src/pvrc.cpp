#include "pvrc/pvrc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pvrc/geometry.hpp"

namespace pvrc {

namespace {

Eigen::MatrixXd columns_from(const std::vector<Eigen::VectorXd>& vs) {
  if (vs.empty()) throw std::invalid_argument("empty prototype list");
  const Eigen::Index q = vs.front().size();
  Eigen::MatrixXd m(q, static_cast<Eigen::Index>(vs.size()));
  for (size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].size() != q)
      throw std::invalid_argument("prototype dimension mismatch");
    m.col(static_cast<Eigen::Index>(i)) = vs[i];
  }
  return m;
}

}  // namespace

ClassModel train_class(int class_id, const Eigen::MatrixXd& prototypes) {
  if (prototypes.cols() < 2)
    throw std::invalid_argument("train_class: class " + std::to_string(class_id) +
                                " needs at least 2 prototypes");
  ClassModel model;
  model.class_id = class_id;
  model.prototypes = prototypes;
  model.q_matrix =
      geometry::cm_matrix(geometry::pairwise_sq_dist(prototypes));

  const Eigen::Index n = model.q_matrix.rows();
  model.q_solver.compute(model.q_matrix);
  const double rc = model.q_solver.rcond();
  if (!(rc > 1e-12)) {
    const double eps = 1e-8 * model.q_matrix.norm() / static_cast<double>(n);
    model.q_matrix += eps * Eigen::MatrixXd::Identity(n, n);
    model.regularization_applied = eps;
    model.q_solver.compute(model.q_matrix);
    if (!(model.q_solver.rcond() > 0.0) ||
        !std::isfinite(model.q_solver.determinant()) ||
        model.q_solver.determinant() == 0.0)
      throw std::runtime_error(
          "train_class: class " + std::to_string(class_id) +
          " is singular even after regularization (identical prototypes?)");
  }
  return model;
}

ClassModel train_class(int class_id,
                       const std::vector<Eigen::VectorXd>& prototypes) {
  return train_class(class_id, columns_from(prototypes));
}

PvrcScore score(const Eigen::VectorXd& test, const ClassModel& model) {
  if (test.size() != model.prototypes.rows())
    throw std::invalid_argument("score: test dimension mismatch");
  const int p = model.prototype_count();
  Eigen::VectorXd border(p + 1);
  for (int i = 0; i < p; ++i)
    border(i) = (test - model.prototypes.col(i)).squaredNorm();
  border(p) = 1.0;

  const double xi_signed = border.dot(model.q_solver.solve(border));
  PvrcScore s;
  s.class_id = model.class_id;
  s.xi = std::abs(xi_signed);
  s.rho_sq = s.xi / (2.0 * static_cast<double>(p) * static_cast<double>(p));
  return s;
}

double naive_ratio(const Eigen::VectorXd& test,
                   const Eigen::MatrixXd& prototypes) {
  if (test.size() != prototypes.rows())
    throw std::invalid_argument("naive_ratio: test dimension mismatch");
  const geometry::SqVolume base = geometry::simplex_sq_volume(prototypes);
  if (base.degenerate || base.value <= 0.0)
    throw std::runtime_error("naive_ratio: degenerate prototype simplex");

  Eigen::MatrixXd joined(prototypes.rows(), prototypes.cols() + 1);
  joined.col(0) = test;
  joined.rightCols(prototypes.cols()) = prototypes;
  const geometry::SqVolume full = geometry::simplex_sq_volume(joined);
  if (full.degenerate) return 0.0;
  return std::sqrt(full.value / base.value);
}

double comparable_score(const PvrcScore& s, int prototype_count,
                        bool equal_counts, PvrcNorm norm) {
  if (equal_counts) return s.xi;
  if (norm == PvrcNorm::derived) return s.rho_sq;
  const double p = static_cast<double>(prototype_count);
  return 4.0 * p * p * p * p * s.xi;
}

int classify(const Eigen::VectorXd& test, const std::vector<ClassModel>& models,
             PvrcNorm norm) {
  if (models.empty()) throw std::invalid_argument("classify: no class models");
  bool equal_counts = true;
  for (const auto& m : models)
    if (m.prototype_count() != models.front().prototype_count())
      equal_counts = false;

  int best_class = models.front().class_id;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : models) {
    const PvrcScore s = score(test, m);
    const double v = comparable_score(s, m.prototype_count(), equal_counts, norm);
    if (v < best || (v == best && m.class_id < best_class)) {
      best = v;
      best_class = m.class_id;
    }
  }
  return best_class;
}

}  // namespace pvrc
