#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pvrc {

struct SelfCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Embedded verification suite: the triangle-area identity, the
// tetrahedron constant, random block-determinant checks, fast-vs-naive
// scoring, and the perpendicular-distance oracle.
std::vector<SelfCheck> run_selftest(std::uint64_t seed = 42);

}  // namespace pvrc
