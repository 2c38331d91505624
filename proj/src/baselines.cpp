#include "pvrc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pvrc {

PooledMatrix pool(const Dataset& d) {
  PooledMatrix p;
  p.columns.resize(d.dim(), d.total_columns());
  int at = 0;
  for (const auto& c : d.classes) {
    const int w = static_cast<int>(c.columns.cols());
    p.columns.middleCols(at, w) = c.columns;
    p.class_ids.push_back(c.class_id);
    p.boundaries.emplace_back(at, at + w);
    at += w;
  }
  return p;
}

}  // namespace pvrc

namespace pvrc::baselines {

namespace {

constexpr double kCondLimit = 1e12;
constexpr double kRidge = 0.01;

void check_dim(const Eigen::VectorXd& test, const Dataset& d) {
  if (d.classes.empty()) throw std::invalid_argument("empty dataset");
  if (test.size() != d.dim())
    throw std::invalid_argument("test dimension mismatch");
}

// Argmin over (class_id, score) pairs; ties go to the lowest class_id,
// which is the iteration order for ascending datasets.
ClassifierDecision pick_min(std::vector<std::pair<int, double>> scores) {
  ClassifierDecision dec;
  dec.per_class_scores = std::move(scores);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [id, s] : dec.per_class_scores) {
    if (s < best) {
      best = s;
      dec.chosen_class = id;
    }
  }
  return dec;
}

// Gram matrix with the 0.01 I fallback on near-singularity.
Eigen::MatrixXd guarded_gram(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd g = x.transpose() * x;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(g.rows() - 1);
  if (smin <= 0.0 || smax / smin > kCondLimit)
    g += kRidge * Eigen::MatrixXd::Identity(g.rows(), g.cols());
  return g;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

ClassifierDecision nn_classify(const Eigen::VectorXd& test, const Dataset& d) {
  check_dim(test, d);
  std::vector<std::pair<int, double>> scores;
  scores.reserve(d.classes.size());
  for (const auto& c : d.classes) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < c.columns.cols(); ++j)
      best = std::min(best, (test - c.columns.col(j)).squaredNorm());
    scores.emplace_back(c.class_id, std::sqrt(best));
  }
  return pick_min(std::move(scores));
}

ClassifierDecision cm_classify(const Eigen::VectorXd& test, const Dataset& d) {
  check_dim(test, d);
  std::vector<std::pair<int, double>> scores;
  scores.reserve(d.classes.size());
  for (const auto& c : d.classes)
    scores.emplace_back(c.class_id,
                        (test - c.columns.rowwise().mean()).norm());
  return pick_min(std::move(scores));
}

double lrc_distance(const Eigen::VectorXd& test,
                    const Eigen::MatrixXd& class_columns) {
  if (test.size() != class_columns.rows())
    throw std::invalid_argument("lrc_distance: dimension mismatch");
  const Eigen::MatrixXd g = guarded_gram(class_columns);
  const Eigen::VectorXd beta =
      g.ldlt().solve(class_columns.transpose() * test);
  return (test - class_columns * beta).norm();
}

ClassifierDecision lrc_classify(const Eigen::VectorXd& test, const Dataset& d) {
  check_dim(test, d);
  std::vector<std::pair<int, double>> scores;
  scores.reserve(d.classes.size());
  for (const auto& c : d.classes)
    scores.emplace_back(c.class_id, lrc_distance(test, c.columns));
  return pick_min(std::move(scores));
}

CrcModel crc_train(const Dataset& d) {
  if (d.classes.empty()) throw std::invalid_argument("crc_train: empty dataset");
  CrcModel m;
  m.pooled = pool(d);
  Eigen::MatrixXd g = m.pooled.columns.transpose() * m.pooled.columns;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(g);
  if (!(lu.rcond() > 1.0 / kCondLimit)) {
    g += kRidge * Eigen::MatrixXd::Identity(g.rows(), g.cols());
    lu.compute(g);
  }
  m.projector = lu.solve(m.pooled.columns.transpose());
  return m;
}

ClassifierDecision crc_classify(const Eigen::VectorXd& test, const CrcModel& m) {
  if (test.size() != m.pooled.columns.rows())
    throw std::invalid_argument("crc_classify: dimension mismatch");
  const Eigen::VectorXd beta = m.projector * test;
  std::vector<std::pair<int, double>> scores;
  scores.reserve(m.pooled.class_ids.size());
  bool any_finite = false;
  for (size_t c = 0; c < m.pooled.class_ids.size(); ++c) {
    const auto [begin, end] = m.pooled.boundaries[c];
    const Eigen::VectorXd beta_c = beta.segment(begin, end - begin);
    const double norm_c = beta_c.norm();
    double r;
    if (norm_c == 0.0) {
      r = std::numeric_limits<double>::infinity();
    } else {
      r = (test - m.pooled.columns.middleCols(begin, end - begin) * beta_c)
              .norm() /
          norm_c;
      any_finite = true;
    }
    scores.emplace_back(m.pooled.class_ids[c], r);
  }
  if (!any_finite)
    throw std::runtime_error("crc_classify: zero coefficients for every class");
  return pick_min(std::move(scores));
}

ClassifierDecision crc_classify(const Eigen::VectorXd& test, const Dataset& d) {
  return crc_classify(test, crc_train(d));
}

SrcModel src_train(const Dataset& d, const SrcParams& params) {
  if (d.classes.empty()) throw std::invalid_argument("src_train: empty dataset");
  SrcModel m;
  m.pooled = pool(d);
  m.params = params;
  for (Eigen::Index j = 0; j < m.pooled.columns.cols(); ++j) {
    const double n = m.pooled.columns.col(j).norm();
    if (n > 0.0) m.pooled.columns.col(j) /= n;
  }
  return m;
}

Eigen::VectorXd src_solve(const Eigen::VectorXd& test, const SrcModel& m,
                          bool* converged_out) {
  const Eigen::MatrixXd& x = m.pooled.columns;
  if (test.size() != x.rows())
    throw std::invalid_argument("src_solve: dimension mismatch");
  const Eigen::Index cols = x.cols();

  const Eigen::VectorXd corr = x.transpose() * test;
  const double lambda = m.params.lambda_scale * corr.cwiseAbs().maxCoeff();

  const auto half_sq_residual = [&](const Eigen::VectorXd& g) {
    return 0.5 * (x * g - test).squaredNorm();
  };

  // FISTA with backtracking on the Lipschitz estimate.
  Eigen::VectorXd g = Eigen::VectorXd::Zero(cols);
  Eigen::VectorXd y = g;
  double t = 1.0;
  double step_l = 1.0;
  double prev_obj = half_sq_residual(g) + lambda * g.lpNorm<1>();
  bool converged = false;

  for (int it = 0; it < m.params.max_iters; ++it) {
    const Eigen::VectorXd grad = x.transpose() * (x * y - test);
    const double f_y = half_sq_residual(y);
    Eigen::VectorXd z(cols);
    for (;;) {
      for (Eigen::Index j = 0; j < cols; ++j)
        z(j) = soft_threshold(y(j) - grad(j) / step_l, lambda / step_l);
      const Eigen::VectorXd diff = z - y;
      const double quad =
          f_y + grad.dot(diff) + 0.5 * step_l * diff.squaredNorm();
      if (half_sq_residual(z) <= quad + 1e-12 * std::abs(quad)) break;
      step_l *= 2.0;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = z + ((t - 1.0) / t_next) * (z - g);
    g = z;
    t = t_next;

    const double obj = half_sq_residual(g) + lambda * g.lpNorm<1>();
    if (std::abs(prev_obj - obj) <= m.params.tol * std::max(1.0, std::abs(obj))) {
      converged = true;
      break;
    }
    prev_obj = obj;
  }
  if (converged_out) *converged_out = converged;
  return g;
}

ClassifierDecision src_classify(const Eigen::VectorXd& test, const SrcModel& m) {
  bool converged = true;
  const Eigen::VectorXd g = src_solve(test, m, &converged);
  const Eigen::MatrixXd& x = m.pooled.columns;
  std::vector<std::pair<int, double>> scores;
  scores.reserve(m.pooled.class_ids.size());
  for (size_t c = 0; c < m.pooled.class_ids.size(); ++c) {
    const auto [begin, end] = m.pooled.boundaries[c];
    scores.emplace_back(
        m.pooled.class_ids[c],
        (test - x.middleCols(begin, end - begin) * g.segment(begin, end - begin))
            .norm());
  }
  ClassifierDecision dec = pick_min(std::move(scores));
  dec.converged = converged;
  return dec;
}

ClassifierDecision src_classify(const Eigen::VectorXd& test, const Dataset& d,
                                const SrcParams& params) {
  return src_classify(test, src_train(d, params));
}

TptssrModel tptssr_train(const Dataset& d) {
  if (d.classes.empty())
    throw std::invalid_argument("tptssr_train: empty dataset");
  TptssrModel m;
  m.pooled = pool(d);
  const Eigen::Index total = m.pooled.columns.cols();
  const Eigen::MatrixXd g1 = m.pooled.columns.transpose() * m.pooled.columns +
                             kRidge * Eigen::MatrixXd::Identity(total, total);
  m.projector = g1.ldlt().solve(m.pooled.columns.transpose());
  return m;
}

ClassifierDecision tptssr_classify(const Eigen::VectorXd& test,
                                   const TptssrModel& m, int k) {
  const PooledMatrix& pooled = m.pooled;
  if (test.size() != pooled.columns.rows())
    throw std::invalid_argument("tptssr_classify: dimension mismatch");
  const Eigen::Index total = pooled.columns.cols();
  if (k < 1 || k > total)
    throw std::invalid_argument("tptssr_classify: k out of range");

  // Phase 1: ridge representation over all columns, keep the k columns
  // whose individual contributions best explain the test sample.
  const Eigen::VectorXd a = m.projector * test;
  std::vector<int> order(static_cast<size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dev(static_cast<size_t>(total));
  for (Eigen::Index i = 0; i < total; ++i)
    dev[static_cast<size_t>(i)] = (test - a(i) * pooled.columns.col(i)).norm();
  std::stable_sort(order.begin(), order.end(),
                   [&](int l, int r) { return dev[static_cast<size_t>(l)] <
                                              dev[static_cast<size_t>(r)]; });
  order.resize(static_cast<size_t>(k));
  std::sort(order.begin(), order.end());

  // Phase 2: ridge representation over the kept columns only.
  Eigen::MatrixXd kept(pooled.columns.rows(), k);
  for (int j = 0; j < k; ++j) kept.col(j) = pooled.columns.col(order[static_cast<size_t>(j)]);
  Eigen::MatrixXd g2 = kept.transpose() * kept +
                       kRidge * Eigen::MatrixXd::Identity(k, k);
  const Eigen::VectorXd gamma = g2.ldlt().solve(kept.transpose() * test);

  std::vector<std::pair<int, double>> scores;
  scores.reserve(pooled.class_ids.size());
  for (size_t c = 0; c < pooled.class_ids.size(); ++c) {
    const auto [begin, end] = pooled.boundaries[c];
    Eigen::VectorXd contrib = Eigen::VectorXd::Zero(test.size());
    for (int j = 0; j < k; ++j)
      if (order[static_cast<size_t>(j)] >= begin && order[static_cast<size_t>(j)] < end)
        contrib += gamma(j) * kept.col(j);
    scores.emplace_back(pooled.class_ids[c], (test - contrib).norm());
  }
  return pick_min(std::move(scores));
}

ClassifierDecision tptssr_classify(const Eigen::VectorXd& test,
                                   const Dataset& d, int k) {
  check_dim(test, d);
  return tptssr_classify(test, tptssr_train(d), k);
}

}  // namespace pvrc::baselines
