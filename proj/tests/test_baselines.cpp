#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "pvrc/baselines.hpp"

using namespace pvrc;
using namespace pvrc::baselines;

namespace {

std::mt19937_64 rng(4242);

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = gauss(rng);
  return m;
}

Dataset random_dataset(int num_classes, int per_class, int q) {
  Dataset d;
  for (int c = 0; c < num_classes; ++c) {
    Eigen::MatrixXd cols = random_matrix(q, per_class);
    cols.colwise() += (3.0 * random_matrix(q, 1)).col(0).eval();
    d.classes.push_back({c + 1, cols});
  }
  return d;
}

}  // namespace

TEST_CASE("nearest neighbor") {
  Dataset d;
  d.classes.push_back({1, (Eigen::MatrixXd(2, 1) << 0, 0).finished()});
  d.classes.push_back({2, (Eigen::MatrixXd(2, 1) << 10, 0).finished()});
  Eigen::VectorXd test(2);
  test << 1, 0;
  CHECK(nn_classify(test, d).chosen_class == 1);

  // exact prototype hit
  test << 10, 0;
  const auto dec = nn_classify(test, d);
  CHECK(dec.chosen_class == 2);
  CHECK(dec.per_class_scores[1].second == 0.0);

  // matches a brute-force scan
  const Dataset r = random_dataset(5, 4, 8);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd x = random_matrix(8, 1);
    int best_class = -1;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : r.classes)
      for (Eigen::Index j = 0; j < c.columns.cols(); ++j) {
        const double dist = (x - c.columns.col(j)).norm();
        if (dist < best) {
          best = dist;
          best_class = c.class_id;
        }
      }
    CHECK(nn_classify(x, r).chosen_class == best_class);
  }
}

TEST_CASE("class mean") {
  Dataset d;
  d.classes.push_back({1, (Eigen::MatrixXd(2, 2) << 0, 2, 0, 0).finished()});
  Eigen::VectorXd test(2);
  test << 1, 3;
  CHECK(cm_classify(test, d).per_class_scores[0].second ==
        doctest::Approx(3.0));

  // single-prototype classes behave like nearest neighbor
  Dataset singles;
  singles.classes.push_back({1, random_matrix(6, 1)});
  singles.classes.push_back({2, random_matrix(6, 1)});
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd x = random_matrix(6, 1);
    CHECK(cm_classify(x, singles).chosen_class ==
          nn_classify(x, singles).chosen_class);
  }

  // scores equal independently recomputed means
  const Dataset r = random_dataset(4, 5, 7);
  const Eigen::VectorXd x = random_matrix(7, 1);
  const auto dec = cm_classify(x, r);
  for (size_t c = 0; c < r.classes.size(); ++c) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(7);
    for (Eigen::Index j = 0; j < r.classes[c].columns.cols(); ++j)
      mean += r.classes[c].columns.col(j);
    mean /= static_cast<double>(r.classes[c].columns.cols());
    CHECK(dec.per_class_scores[c].second ==
          doctest::Approx((x - mean).norm()).epsilon(1e-12));
  }
}

TEST_CASE("regression residual") {
  Eigen::MatrixXd basis(3, 2);
  basis.col(0) << 1, 0, 0;
  basis.col(1) << 0, 1, 0;
  Eigen::VectorXd test(3);
  test << 1, 1, 1;
  CHECK(lrc_distance(test, basis) == doctest::Approx(1.0).epsilon(1e-12));

  // in-span vector projects exactly
  const Eigen::MatrixXd cols = random_matrix(10, 3);
  const Eigen::VectorXd in_span = cols * random_matrix(3, 1);
  CHECK(lrc_distance(in_span, cols) == doctest::Approx(0.0).epsilon(1e-8));

  // duplicated columns fall back to the ridge; verify against the
  // explicit ridge formula
  Eigen::MatrixXd dup(4, 2);
  dup.col(0) << 1, 2, 3, 4;
  dup.col(1) << 1, 2, 3, 4;
  const Eigen::VectorXd x = random_matrix(4, 1);
  const Eigen::MatrixXd g =
      dup.transpose() * dup + 0.01 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd beta = g.ldlt().solve(dup.transpose() * x);
  CHECK(lrc_distance(x, dup) ==
        doctest::Approx((x - dup * beta).norm()).epsilon(1e-10));

  // well-conditioned case matches an orthogonal-factorization solve
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd c = random_matrix(12, 4);
    const Eigen::VectorXd y = random_matrix(12, 1);
    const double qr_resid =
        (y - c * c.colPivHouseholderQr().solve(y)).norm();
    CHECK(lrc_distance(y, c) == doctest::Approx(qr_resid).epsilon(1e-9));
  }
}

TEST_CASE("collaborative representation") {
  Dataset d;
  d.classes.push_back({1, (Eigen::MatrixXd(2, 1) << 1, 0).finished()});
  d.classes.push_back({2, (Eigen::MatrixXd(2, 1) << 0, 1).finished()});
  Eigen::VectorXd e1(2);
  e1 << 1, 0;
  auto dec = crc_classify(e1, d);
  CHECK(dec.chosen_class == 1);
  CHECK(dec.per_class_scores[0].second == doctest::Approx(0.0));
  CHECK(std::isinf(dec.per_class_scores[1].second));

  Eigen::VectorXd e2(2);
  e2 << 0, 1;
  CHECK(crc_classify(e2, d).chosen_class == 2);

  // beta matches a normal-equations oracle on a well-conditioned instance
  const Dataset r = random_dataset(3, 3, 20);
  const PooledMatrix pooled = pool(r);
  const Eigen::VectorXd x = random_matrix(20, 1);
  const Eigen::VectorXd beta =
      (pooled.columns.transpose() * pooled.columns)
          .ldlt()
          .solve(pooled.columns.transpose() * x);
  const CrcModel model = crc_train(r);
  const Eigen::VectorXd got = model.projector * x;
  CHECK((got - beta).norm() < 1e-9 * std::max(1.0, beta.norm()));
}

TEST_CASE("sparse representation") {
  Dataset d;
  d.classes.push_back({1, (Eigen::MatrixXd(2, 1) << 1, 0).finished()});
  d.classes.push_back({2, (Eigen::MatrixXd(2, 1) << 0, 1).finished()});
  Eigen::VectorXd e1(2);
  e1 << 1, 0;

  SrcParams params;
  params.lambda_scale = 1e-2;
  auto dec = src_classify(e1, d, params);
  CHECK(dec.chosen_class == 1);
  CHECK(dec.converged);
  // orthogonal design: residual is the soft-threshold bias lambda
  CHECK(dec.per_class_scores[0].second == doctest::Approx(1e-2).epsilon(1e-4));

  // tiny lambda on an invertible square system recovers the exact solve
  Dataset sq;
  sq.classes.push_back({1, random_matrix(4, 2)});
  sq.classes.push_back({2, random_matrix(4, 2)});
  const PooledMatrix pooled = pool(sq);
  Eigen::MatrixXd norm_cols = pooled.columns;
  for (Eigen::Index j = 0; j < norm_cols.cols(); ++j)
    norm_cols.col(j).normalize();
  const Eigen::VectorXd x = random_matrix(4, 1);
  const Eigen::VectorXd exact = norm_cols.partialPivLu().solve(x);
  SrcParams tiny;
  tiny.lambda_scale = 1e-10;
  tiny.tol = 1e-14;
  tiny.max_iters = 20000;
  const SrcModel model = src_train(sq, tiny);
  const auto sdec = src_classify(x, model);
  // residuals correspond to the near-exact reconstruction
  double expect0 = 0.0;
  {
    const Eigen::VectorXd part =
        norm_cols.leftCols(2) * exact.head(2);
    expect0 = (x - part).norm();
  }
  CHECK(sdec.per_class_scores[0].second ==
        doctest::Approx(expect0).epsilon(1e-5));
}

TEST_CASE("sparse objective matches coordinate descent") {
  const Dataset d = random_dataset(3, 4, 15);
  SrcParams tight;
  tight.tol = 1e-14;
  tight.max_iters = 100000;
  const SrcModel model = src_train(d, tight);
  const Eigen::MatrixXd& x_mat = model.pooled.columns;
  const Eigen::VectorXd x = random_matrix(15, 1);
  const double lambda =
      model.params.lambda_scale * (x_mat.transpose() * x).cwiseAbs().maxCoeff();

  // independent coordinate-descent oracle
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x_mat.cols());
  for (int sweep = 0; sweep < 3000; ++sweep) {
    for (Eigen::Index j = 0; j < x_mat.cols(); ++j) {
      const Eigen::VectorXd col = x_mat.col(j);
      const double a = col.squaredNorm();
      const double rho = col.dot(x - x_mat * g + g(j) * col);
      const double soft =
          std::copysign(std::max(0.0, std::abs(rho) - lambda), rho);
      g(j) = soft / a;
    }
  }
  const double cd_obj = 0.5 * (x_mat * g - x).squaredNorm() + lambda * g.lpNorm<1>();

  bool converged = false;
  const Eigen::VectorXd solver_g = src_solve(x, model, &converged);
  CHECK(converged);
  const double solver_obj =
      0.5 * (x_mat * solver_g - x).squaredNorm() + lambda * solver_g.lpNorm<1>();
  CHECK(std::abs(solver_obj - cd_obj) <= 1e-6 * std::max(1.0, cd_obj));
}

TEST_CASE("two-phase selection") {
  const Dataset d = random_dataset(4, 3, 10);
  const Eigen::VectorXd x = random_matrix(10, 1);

  // k equal to the total column count keeps everything
  const auto all = tptssr_classify(x, d, 12);
  CHECK(all.per_class_scores.size() == 4);

  // k = 1 picks the class of the phase-1-best column
  const auto one = tptssr_classify(x, d, 1);
  const PooledMatrix pooled = pool(d);
  const Eigen::Index total = pooled.columns.cols();
  const Eigen::MatrixXd g1 =
      pooled.columns.transpose() * pooled.columns +
      0.01 * Eigen::MatrixXd::Identity(total, total);
  const Eigen::VectorXd a = g1.ldlt().solve(pooled.columns.transpose() * x);
  int best_col = 0;
  double best_dev = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < total; ++i) {
    const double dev = (x - a(i) * pooled.columns.col(i)).norm();
    if (dev < best_dev) {
      best_dev = dev;
      best_col = static_cast<int>(i);
    }
  }
  int best_col_class = 0;
  for (size_t c = 0; c < pooled.class_ids.size(); ++c)
    if (best_col >= pooled.boundaries[c].first &&
        best_col < pooled.boundaries[c].second)
      best_col_class = pooled.class_ids[c];
  CHECK(one.chosen_class == best_col_class);

  CHECK_THROWS(tptssr_classify(x, d, 0));
  CHECK_THROWS(tptssr_classify(x, d, 13));
}

TEST_CASE("classifiers are deterministic") {
  const Dataset d = random_dataset(3, 4, 9);
  const Eigen::VectorXd x = random_matrix(9, 1);
  CHECK(nn_classify(x, d).per_class_scores ==
        nn_classify(x, d).per_class_scores);
  CHECK(crc_classify(x, d).per_class_scores ==
        crc_classify(x, d).per_class_scores);
  CHECK(src_classify(x, d).per_class_scores ==
        src_classify(x, d).per_class_scores);
  CHECK(tptssr_classify(x, d, 5).per_class_scores ==
        tptssr_classify(x, d, 5).per_class_scores);
}
