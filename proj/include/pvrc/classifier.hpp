#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace pvrc {

// One class's prototypes, stacked one per column.
struct ClassData {
  int class_id = 0;
  Eigen::MatrixXd columns;  // q x N_c
};

struct Dataset {
  std::vector<ClassData> classes;  // ascending class_id

  int dim() const {
    return classes.empty() ? 0 : static_cast<int>(classes.front().columns.rows());
  }
  int total_columns() const {
    int t = 0;
    for (const auto& c : classes) t += static_cast<int>(c.columns.cols());
    return t;
  }
};

// Pools every class's columns side by side, remembering per-class ranges.
struct PooledMatrix {
  Eigen::MatrixXd columns;  // q x total
  std::vector<int> class_ids;
  std::vector<std::pair<int, int>> boundaries;  // [begin, end) per class
};

PooledMatrix pool(const Dataset& d);

struct ClassifierDecision {
  int chosen_class = -1;
  std::vector<std::pair<int, double>> per_class_scores;
  long long timing_ns = 0;
  bool converged = true;
};

}  // namespace pvrc
