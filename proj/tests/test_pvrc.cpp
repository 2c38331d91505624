#include <doctest.h>

#include <cmath>
#include <random>

#include "pvrc/geometry.hpp"
#include "pvrc/pvrc.hpp"

using namespace pvrc;

namespace {

std::mt19937_64 rng(777);

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = gauss(rng);
  return m;
}

double affine_hull_distance(const Eigen::VectorXd& x,
                            const Eigen::MatrixXd& prototypes) {
  const Eigen::VectorXd origin = prototypes.col(0);
  Eigen::MatrixXd edges(prototypes.rows(), prototypes.cols() - 1);
  for (Eigen::Index j = 1; j < prototypes.cols(); ++j)
    edges.col(j - 1) = prototypes.col(j) - origin;
  const Eigen::VectorXd rhs = x - origin;
  return (rhs - edges * edges.colPivHouseholderQr().solve(rhs)).norm();
}

Eigen::MatrixXd two_point_class() {
  Eigen::MatrixXd protos(2, 2);
  protos.col(0) << 0, 0;
  protos.col(1) << 2, 0;
  return protos;
}

}  // namespace

TEST_CASE("training builds the bordered matrix") {
  const ClassModel model = train_class(7, two_point_class());
  Eigen::MatrixXd want(3, 3);
  want << 0, 4, 1, 4, 0, 1, 1, 1, 0;
  CHECK(model.q_matrix.isApprox(want));
  CHECK(model.regularization_applied == 0.0);
  CHECK(model.class_id == 7);
}

TEST_CASE("identical prototypes trigger regularization") {
  Eigen::MatrixXd protos(3, 2);
  protos.col(0) << 1, 2, 3;
  protos.col(1) << 1, 2, 3;
  const ClassModel model = train_class(1, protos);
  CHECK(model.regularization_applied > 0.0);
}

TEST_CASE("training rejects underpopulated classes") {
  CHECK_THROWS(train_class(1, Eigen::MatrixXd::Random(4, 1)));
}

TEST_CASE("solver reproduces the inverse") {
  for (int t = 0; t < 10; ++t) {
    const ClassModel model = train_class(1, random_matrix(50, 5));
    const Eigen::Index n = model.q_matrix.rows();
    const Eigen::MatrixXd inv =
        model.q_solver.solve(Eigen::MatrixXd::Identity(n, n));
    const double err = (model.q_matrix * inv - Eigen::MatrixXd::Identity(n, n))
                           .norm() /
                       std::sqrt(static_cast<double>(n));
    CHECK(err < 1e-8);
  }
}

TEST_CASE("hand-checked score") {
  const ClassModel model = train_class(1, two_point_class());
  Eigen::VectorXd test(2);
  test << 1, 5;
  const PvrcScore s = score(test, model);
  CHECK(s.xi == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(s.rho_sq == doctest::Approx(6.25).epsilon(1e-12));

  // test on a prototype
  CHECK(score(model.prototypes.col(0), model).xi ==
        doctest::Approx(0.0).epsilon(1e-9));

  // test on the prototypes' affine hull
  Eigen::VectorXd on_hull(2);
  on_hull << 5, 0;
  CHECK(score(on_hull, model).xi < 1e-9);

  Eigen::VectorXd wrong_dim(3);
  CHECK_THROWS(score(wrong_dim, model));
}

TEST_CASE("naive ratio") {
  Eigen::VectorXd test(2);
  test << 1, 5;
  CHECK(naive_ratio(test, two_point_class()) ==
        doctest::Approx(2.5).epsilon(1e-10));

  Eigen::VectorXd on_hull(2);
  on_hull << 5, 0;
  CHECK(naive_ratio(on_hull, two_point_class()) == 0.0);

  // degenerate base simplex
  Eigen::MatrixXd degenerate(2, 2);
  degenerate.col(0) << 1, 1;
  degenerate.col(1) << 1, 1;
  CHECK_THROWS(naive_ratio(test, degenerate));
}

TEST_CASE("fast path equals naive ratio") {
  for (int t = 0; t < 200; ++t) {
    const int q = (t % 2 == 0) ? 10 : 50;
    const int protos = 2 + static_cast<int>(rng() % 6);  // n_c in 3..8
    const Eigen::MatrixXd prototypes = random_matrix(q, protos);
    const Eigen::VectorXd test = random_matrix(q, 1);
    const ClassModel model = train_class(1, prototypes);
    REQUIRE(model.regularization_applied == 0.0);
    const double fast = std::sqrt(score(test, model).rho_sq);
    const double slow = naive_ratio(test, prototypes);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-8));
  }
}

TEST_CASE("ratio times prototype count is the perpendicular distance") {
  for (int t = 0; t < 200; ++t) {
    const int q = 30;
    const int protos = 2 + static_cast<int>(rng() % 5);
    const Eigen::MatrixXd prototypes = random_matrix(q, protos);
    const Eigen::VectorXd test = random_matrix(q, 1);
    const ClassModel model = train_class(1, prototypes);
    const double rho = std::sqrt(score(test, model).rho_sq);
    const double dist = affine_hull_distance(test, prototypes);
    CHECK(rho * protos == doctest::Approx(dist).epsilon(1e-8));
  }
}

TEST_CASE("classification basics") {
  // class 1 on the x axis, class 2 on the y axis
  Eigen::MatrixXd x_axis(2, 2), y_axis(2, 2);
  x_axis.col(0) << 0, 0;
  x_axis.col(1) << 4, 0;
  y_axis.col(0) << 0, 0;
  y_axis.col(1) << 0, 4;
  std::vector<ClassModel> models = {train_class(1, x_axis),
                                    train_class(2, y_axis)};
  Eigen::VectorXd near_x(2);
  near_x << 2, 0.5;
  CHECK(classify(near_x, models) == 1);

  // equidistant mirrored classes break ties toward the lower id
  Eigen::VectorXd diagonal(2);
  diagonal << 1, 1;
  CHECK(classify(diagonal, models) == 1);

  CHECK_THROWS(classify(diagonal, {}));
}

TEST_CASE("subspace classes are recovered") {
  const int q = 50;
  const int num_classes = 10;
  std::vector<ClassModel> models;
  std::vector<Eigen::MatrixXd> protos;
  for (int c = 0; c < num_classes; ++c) {
    Eigen::MatrixXd p = random_matrix(q, 4);
    p.colwise() += (10.0 * random_matrix(q, 1)).col(0).eval();
    protos.push_back(p);
    models.push_back(train_class(c + 1, p));
  }
  std::normal_distribution<double> noise(0.0, 0.01);
  Eigen::VectorXd test = protos[6].col(0);
  for (int i = 0; i < q; ++i) test(i) += noise(rng);
  CHECK(classify(test, models) == 7);

  // agrees with the naive ratio argmin
  int best = -1;
  double best_ratio = 1e300;
  for (int c = 0; c < num_classes; ++c) {
    const double r = naive_ratio(test, protos[static_cast<size_t>(c)]);
    if (r < best_ratio) {
      best_ratio = r;
      best = c + 1;
    }
  }
  CHECK(best == 7);
}

TEST_CASE("argmin survives uniform scaling") {
  const int q = 20;
  for (int t = 0; t < 20; ++t) {
    std::vector<Eigen::MatrixXd> protos;
    std::vector<ClassModel> models, scaled_models;
    const double s = 3.5;
    for (int c = 0; c < 5; ++c) {
      const Eigen::MatrixXd p = random_matrix(q, 3 + c % 3);
      protos.push_back(p);
      models.push_back(train_class(c + 1, p));
      scaled_models.push_back(train_class(c + 1, (s * p).eval()));
    }
    const Eigen::VectorXd test = random_matrix(q, 1);
    CHECK(classify(test, models) ==
          classify((s * test).eval(), scaled_models));
  }
}

TEST_CASE("ratio grows along the perpendicular direction") {
  const int q = 10;
  const Eigen::MatrixXd prototypes = random_matrix(q, 4);
  const ClassModel model = train_class(1, prototypes);
  const Eigen::VectorXd base = random_matrix(q, 1);

  // perpendicular component of a random direction
  Eigen::MatrixXd edges(q, 3);
  for (int j = 1; j < 4; ++j)
    edges.col(j - 1) = prototypes.col(j) - prototypes.col(0);
  Eigen::VectorXd dir = random_matrix(q, 1);
  dir -= edges * edges.colPivHouseholderQr().solve(dir);
  dir.normalize();

  double prev = -1.0;
  for (int step = 1; step <= 5; ++step) {
    const Eigen::VectorXd x = prototypes.col(0) + step * dir;
    const double rho = std::sqrt(score(x, model).rho_sq);
    CHECK(rho > prev);
    prev = rho;
  }
}

TEST_CASE("scoring is pure") {
  const ClassModel model = train_class(1, random_matrix(12, 4));
  const Eigen::VectorXd test = random_matrix(12, 1);
  const PvrcScore a = score(test, model);
  const PvrcScore b = score(test, model);
  CHECK(a.xi == b.xi);
  CHECK(a.rho_sq == b.rho_sq);
}

TEST_CASE("comparable scores for unequal class sizes") {
  const PvrcScore s{32.0, 32.0 / (2.0 * 16.0), 1};
  CHECK(comparable_score(s, 4, true, PvrcNorm::derived) == 32.0);
  CHECK(comparable_score(s, 4, false, PvrcNorm::derived) ==
        doctest::Approx(1.0));
  CHECK(comparable_score(s, 4, false, PvrcNorm::paper_literal) ==
        doctest::Approx(4.0 * 256.0 * 32.0));
}
