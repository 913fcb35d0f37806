#pragma once

#include "fps/common.hpp"

// Data-parallel inner loops of the solver and the samplers.
//
// fps::kernels holds the OpenMP versions used by the library. fps::kernels::serial
// holds plain loop versions with identical contracts; they are kept as the
// reference the parallel kernels are tested and benchmarked against.
namespace fps::kernels {

/// Entrywise soft-threshold: out_ij = sign(a_ij) * max(|a_ij| - level, 0).
void soft_threshold(const Matrix& a, double level, Matrix& out);

/// sum_j w_j v_j v_j^T over the columns of V with w_j != 0. Symmetric output.
Matrix weighted_outer(const Matrix& v, const Vector& w);

/// X^T X / n for an n x p data matrix whose columns have already been centered.
Matrix scaled_gram(const Matrix& x, double scale);

/// ||A - B||_F without forming the difference.
double frobenius_distance(const Matrix& a, const Matrix& b);

/// max |A_ij - B_ij|.
double max_abs_difference(const Matrix& a, const Matrix& b);

/// Number of threads the parallel kernels will use (1 without OpenMP).
int max_threads();

namespace serial {

void soft_threshold(const Matrix& a, double level, Matrix& out);
Matrix weighted_outer(const Matrix& v, const Vector& w);
Matrix scaled_gram(const Matrix& x, double scale);
double frobenius_distance(const Matrix& a, const Matrix& b);
double max_abs_difference(const Matrix& a, const Matrix& b);

}  // namespace serial
}  // namespace fps::kernels
