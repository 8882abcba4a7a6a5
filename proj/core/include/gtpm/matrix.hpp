#pragma once

#include <cstddef>
#include <vector>

namespace gtpm {

// Dense row-major matrix; just enough linear algebra for the
// classifier and the PCA projection.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
  double* row(size_t r) { return data.data() + r * cols; }
  const double* row(size_t r) const { return data.data() + r * cols; }
};

// a (p x q) times b (q x r) -> (p x r)
Matrix matmul(const Matrix& a, const Matrix& b);
// a (p x q) times b-transpose (r x q) -> (p x r)
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// a-transpose (q x p) times b (q x r) -> (p x r)
Matrix matmul_tn(const Matrix& a, const Matrix& b);

}  // namespace gtpm
