#pragma once

#include <array>
#include <vector>

namespace gtpm {

struct Pca2D {
  // One (x, y) pair per input vector, in input order.
  std::vector<std::array<double, 2>> coordinates;
  std::array<double, 2> explained_variance = {0.0, 0.0};
};

// Centers the vectors and projects them onto the top two principal
// components, found by power iteration with deflation (tolerance
// 1e-9, at most 1000 iterations per component). Component signs are
// canonicalized so the largest-magnitude entry is positive. Rank-1
// data gets a deterministic orthogonal completion as its second axis.
Pca2D project_2d_pca(const std::vector<std::vector<double>>& vectors);

}  // namespace gtpm
