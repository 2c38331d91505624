#include "pvrc/selftest.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "pvrc/geometry.hpp"
#include "pvrc/pvrc.hpp"

namespace pvrc {

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

// Distance from x to the affine hull of the prototype columns, by
// least-squares projection onto the span of the edge vectors.
double affine_hull_distance(const Eigen::VectorXd& x,
                            const Eigen::MatrixXd& prototypes) {
  const Eigen::VectorXd origin = prototypes.col(0);
  Eigen::MatrixXd edges(prototypes.rows(), prototypes.cols() - 1);
  for (Eigen::Index j = 1; j < prototypes.cols(); ++j)
    edges.col(j - 1) = prototypes.col(j) - origin;
  const Eigen::VectorXd rhs = x - origin;
  const Eigen::VectorXd coef =
      edges.colPivHouseholderQr().solve(rhs);
  return (rhs - edges * coef).norm();
}

}  // namespace

std::vector<SelfCheck> run_selftest(std::uint64_t seed) {
  std::vector<SelfCheck> checks;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto random_matrix = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = gauss(rng);
    return m;
  };
  const auto report = [&](const std::string& name, bool ok,
                          const std::string& detail) {
    checks.push_back({name, ok, detail});
  };

  {
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const Eigen::MatrixXd tri = random_matrix(3, 3);
      const Eigen::MatrixXd d = geometry::pairwise_sq_dist(tri);
      const double heron = geometry::heron_sq_area(d(0, 1), d(0, 2), d(1, 2));
      const double cm = geometry::simplex_sq_volume(tri).value;
      worst = std::max(worst, rel_err(cm, heron));
    }
    std::ostringstream ss;
    ss << "max relative error " << worst;
    report("triangle area identity (200 random triangles)", worst < 1e-10,
           ss.str());
  }

  {
    Eigen::MatrixXd tetra(3, 4);
    tetra.col(0) << 0, 0, 0;
    tetra.col(1) << 1, 0, 0;
    tetra.col(2) << 0.5, std::sqrt(3.0) / 2.0, 0;
    tetra.col(3) << 0.5, std::sqrt(3.0) / 6.0, std::sqrt(2.0 / 3.0);
    const double v = std::sqrt(geometry::simplex_sq_volume(tetra).value);
    const double want = std::sqrt(2.0) / 12.0;
    std::ostringstream ss;
    ss << "volume " << v << " vs " << want;
    report("regular tetrahedron volume (1/288 constant)",
           std::abs(v - want) < 1e-12, ss.str());
  }

  {
    double worst = 0.0;
    bool ok = true;
    for (int t = 0; t < 50; ++t) {
      const int m = 1 + static_cast<int>(rng() % 5);
      const int n = 1 + static_cast<int>(rng() % 5);
      const Eigen::MatrixXd a = random_matrix(m, m);
      const Eigen::MatrixXd b = random_matrix(m, n);
      const Eigen::MatrixXd c = random_matrix(n, m);
      const Eigen::MatrixXd d =
          random_matrix(n, n) + 3.0 * Eigen::MatrixXd::Identity(n, n);
      Eigen::MatrixXd p(m + n, m + n);
      p << a, b, c, d;
      const double direct = Eigen::PartialPivLU<Eigen::MatrixXd>(p).determinant();
      const double split = geometry::block_det(a, b, c, d);
      const double err =
          std::abs(direct - split) / std::max(1e-12, std::abs(direct));
      worst = std::max(worst, err);
      if (err > 1e-9) ok = false;
    }
    std::ostringstream ss;
    ss << "max relative error " << worst;
    report("block determinant factorization (50 random matrices)", ok, ss.str());
  }

  {
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const int q = (t % 2 == 0) ? 10 : 50;
      const int protos = 2 + static_cast<int>(rng() % 6);
      const Eigen::MatrixXd prototypes = random_matrix(q, protos);
      const Eigen::VectorXd test = random_matrix(q, 1);
      const ClassModel model = train_class(1, prototypes);
      const double fast = std::sqrt(score(test, model).rho_sq);
      const double slow = naive_ratio(test, prototypes);
      worst = std::max(worst, rel_err(fast, slow));
    }
    std::ostringstream ss;
    ss << "max relative error " << worst;
    report("fast score vs naive volume ratio (50 random instances)",
           worst < 1e-8, ss.str());
  }

  {
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const int q = 20;
      const int protos = 2 + static_cast<int>(rng() % 5);
      const Eigen::MatrixXd prototypes = random_matrix(q, protos);
      const Eigen::VectorXd test = random_matrix(q, 1);
      const ClassModel model = train_class(1, prototypes);
      const double rho = std::sqrt(score(test, model).rho_sq);
      const double dist = affine_hull_distance(test, prototypes);
      worst = std::max(worst, rel_err(rho * (protos), dist));
    }
    std::ostringstream ss;
    ss << "max relative error " << worst;
    report("volume ratio vs perpendicular distance (50 random instances)",
           worst < 1e-8, ss.str());
  }

  return checks;
}

}  // namespace pvrc
