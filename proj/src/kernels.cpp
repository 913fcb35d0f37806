#include "fps/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fps::kernels {

namespace {

// Below this many entries a parallel region costs more than it saves.
constexpr Eigen::Index kParallelEntries = 1 << 14;

inline double shrink(double x, double level) {
  const double m = std::abs(x) - level;
  return m > 0.0 ? std::copysign(m, x) : 0.0;
}

// Columns of v with nonzero weight, pre-multiplied by the weight.
void active_columns(const Matrix& v, const Vector& w, Matrix& scaled, Matrix& plain) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w(j) != 0.0) idx.push_back(j);
  scaled.resize(v.rows(), static_cast<Eigen::Index>(idx.size()));
  plain.resize(v.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) {
    plain.col(c) = v.col(idx[c]);
    scaled.col(c) = w(idx[c]) * v.col(idx[c]);
  }
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void soft_threshold(const Matrix& a, double level, Matrix& out) {
  out.resize(a.rows(), a.cols());
  const Eigen::Index cols = a.cols();
  const Eigen::Index rows = a.rows();
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelEntries)
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double* src = a.col(j).data();
    double* dst = out.col(j).data();
    for (Eigen::Index i = 0; i < rows; ++i) dst[i] = shrink(src[i], level);
  }
}

Matrix weighted_outer(const Matrix& v, const Vector& w) {
  Matrix scaled, plain;
  active_columns(v, w, scaled, plain);
  const Eigen::Index p = v.rows();
  Matrix out(p, p);
  if (plain.cols() == 0) {
    out.setZero();
    return out;
  }
  // Upper triangle by columns, then mirror so the result is exactly symmetric.
#pragma omp parallel for schedule(dynamic, 8) if (p * p * plain.cols() >= kParallelEntries)
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto row_j = plain.row(j);
    for (Eigen::Index i = 0; i <= j; ++i) out(i, j) = scaled.row(i).dot(row_j);
  }
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = j + 1; i < p; ++i) out(i, j) = out(j, i);
  return out;
}

Matrix scaled_gram(const Matrix& x, double scale) {
  const Eigen::Index p = x.cols();
  Matrix out(p, p);
#pragma omp parallel for schedule(dynamic, 4) if (p * p * x.rows() >= kParallelEntries)
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) out(i, j) = scale * x.col(i).dot(x.col(j));
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = j + 1; i < p; ++i) out(i, j) = out(j, i);
  return out;
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
  // Per-column partial sums combined serially, so the result does not depend
  // on the thread count or on scheduling.
  const Eigen::Index cols = a.cols();
  const Eigen::Index rows = a.rows();
  std::vector<double> partial(static_cast<std::size_t>(cols));
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelEntries)
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double* x = a.col(j).data();
    const double* y = b.col(j).data();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double d = x[i] - y[i];
      acc += d * d;
    }
    partial[j] = acc;
  }
  double acc = 0.0;
  for (double v : partial) acc += v;
  return std::sqrt(acc);
}

double max_abs_difference(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.size();
  const double* x = a.data();
  const double* y = b.data();
  double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static) if (n >= kParallelEntries)
  for (Eigen::Index i = 0; i < n; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

namespace serial {

void soft_threshold(const Matrix& a, double level, Matrix& out) {
  out.resize(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) out(i, j) = shrink(a(i, j), level);
}

Matrix weighted_outer(const Matrix& v, const Vector& w) {
  const Eigen::Index p = v.rows();
  Matrix out = Matrix::Zero(p, p);
  for (Eigen::Index c = 0; c < w.size(); ++c) {
    if (w(c) == 0.0) continue;
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index i = 0; i < p; ++i) out(i, j) += w(c) * v(i, c) * v(j, c);
  }
  return out;
}

Matrix scaled_gram(const Matrix& x, double scale) {
  const Eigen::Index p = x.cols();
  Matrix out = Matrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < p; ++i) {
      double acc = 0.0;
      for (Eigen::Index r = 0; r < x.rows(); ++r) acc += x(r, i) * x(r, j);
      out(i, j) = scale * acc;
    }
  return out;
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) col += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    acc += col;
  }
  return std::sqrt(acc);
}

double max_abs_difference(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace serial
}  // namespace fps::kernels
