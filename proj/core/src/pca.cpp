#include "gtpm/pca.hpp"

#include <cmath>
#include <cstdlib>

#include "gtpm/error.hpp"
#include "gtpm/matrix.hpp"
#include "gtpm/rng.hpp"

namespace gtpm {
namespace {

constexpr double kTolerance = 1e-9;
constexpr int kMaxIterations = 1000;
constexpr uint64_t kStartVectorSeed = 0x70636132645f7631ull;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

void subtract_projection(std::vector<double>& v,
                         const std::vector<double>& unit) {
  double coeff = dot(v, unit);
  for (size_t i = 0; i < v.size(); ++i) v[i] -= coeff * unit[i];
}

void canonicalize_sign(std::vector<double>& v) {
  size_t arg = 0;
  for (size_t i = 1; i < v.size(); ++i)
    if (std::fabs(v[i]) > std::fabs(v[arg])) arg = i;
  if (v[arg] < 0.0)
    for (double& x : v) x = -x;
}

// Unit vector orthogonal to `unit`, chosen deterministically: the
// basis vector least aligned with `unit`, Gram-Schmidt corrected.
std::vector<double> orthogonal_completion(const std::vector<double>& unit) {
  size_t arg = 0;
  for (size_t i = 1; i < unit.size(); ++i)
    if (std::fabs(unit[i]) < std::fabs(unit[arg])) arg = i;
  std::vector<double> v(unit.size(), 0.0);
  v[arg] = 1.0;
  subtract_projection(v, unit);
  double n = norm(v);
  for (double& x : v) x /= n;
  canonicalize_sign(v);
  return v;
}

// Leading eigenvector of `cov`, kept orthogonal to `exclude` when
// provided. Returns false when the operator is (numerically) zero in
// the available subspace.
bool power_iterate(const Matrix& cov, const std::vector<double>* exclude,
                   std::vector<double>& eigenvector, double& eigenvalue) {
  size_t dim = cov.rows;
  Rng rng(kStartVectorSeed);
  std::vector<double> v(dim);
  for (double& x : v) x = rng.next_double() - 0.5;
  if (exclude) subtract_projection(v, *exclude);
  double n = norm(v);
  if (n == 0.0) return false;
  for (double& x : v) x /= n;

  std::vector<double> next(dim);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    for (size_t i = 0; i < dim; ++i) {
      const double* row = cov.row(i);
      double sum = 0.0;
      for (size_t j = 0; j < dim; ++j) sum += row[j] * v[j];
      next[i] = sum;
    }
    if (exclude) subtract_projection(next, *exclude);
    double next_norm = norm(next);
    if (next_norm < 1e-30) return false;
    for (double& x : next) x /= next_norm;
    // eigenvectors are defined up to sign; compare the aligned copy
    double alignment = dot(next, v);
    double delta = 0.0;
    for (size_t i = 0; i < dim; ++i) {
      double aligned = alignment < 0.0 ? -next[i] : next[i];
      delta = std::max(delta, std::fabs(aligned - v[i]));
    }
    v = next;
    if (delta < kTolerance) break;
  }
  eigenvector = v;
  std::vector<double> image(dim);
  for (size_t i = 0; i < dim; ++i) {
    const double* row = cov.row(i);
    double sum = 0.0;
    for (size_t j = 0; j < dim; ++j) sum += row[j] * v[j];
    image[i] = sum;
  }
  eigenvalue = dot(v, image);
  return true;
}

}  // namespace

Pca2D project_2d_pca(const std::vector<std::vector<double>>& vectors) {
  if (vectors.size() < 2)
    throw Error(ErrorKind::invalid_argument,
                "2D projection needs at least 2 vectors");
  size_t dim = vectors.front().size();
  if (dim == 0)
    throw Error(ErrorKind::invalid_argument,
                "cannot project zero-dimensional vectors");
  for (const auto& v : vectors)
    if (v.size() != dim)
      throw Error(ErrorKind::invalid_argument,
                  "inconsistent vector dimensions");

  size_t count = vectors.size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& v : vectors)
    for (size_t j = 0; j < dim; ++j) mean[j] += v[j];
  for (double& m : mean) m /= static_cast<double>(count);

  Matrix centered(count, dim);
  for (size_t i = 0; i < count; ++i)
    for (size_t j = 0; j < dim; ++j)
      centered.at(i, j) = vectors[i][j] - mean[j];

  Matrix cov = matmul_tn(centered, centered);
  double scale = 1.0 / static_cast<double>(count - 1);
  for (double& x : cov.data) x *= scale;

  double total_variance = 0.0;
  for (size_t j = 0; j < dim; ++j) total_variance += cov.at(j, j);
  if (total_variance < 1e-30)
    throw Error(ErrorKind::numeric,
                "all vectors are identical; projection is undefined for "
                "zero-variance data");

  std::vector<double> first, second;
  double lambda1 = 0.0, lambda2 = 0.0;
  if (!power_iterate(cov, nullptr, first, lambda1))
    throw Error(ErrorKind::numeric,
                "power iteration failed on zero-variance data");
  canonicalize_sign(first);

  if (dim == 1) {
    second.assign(1, 0.0);
  } else if (!power_iterate(cov, &first, second, lambda2)) {
    second = orthogonal_completion(first);
    lambda2 = 0.0;
  } else {
    canonicalize_sign(second);
  }

  Pca2D result;
  result.explained_variance = {lambda1, lambda2};
  result.coordinates.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    const double* row = centered.row(i);
    double x = 0.0, y = 0.0;
    for (size_t j = 0; j < dim; ++j) {
      x += row[j] * first[j];
      if (!second.empty() && dim > 1) y += row[j] * second[j];
    }
    if (dim == 1) y = 0.0;
    result.coordinates.push_back({x, y});
  }
  return result;
}

}  // namespace gtpm
