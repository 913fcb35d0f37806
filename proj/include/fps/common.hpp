#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace fps {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error taxonomy. Every failure raised by the library derives from FpsError so
// callers can map kinds onto exit codes without string matching.
enum class ErrorKind {
  InvalidInput,
  NumericalFailure,
  NotConverged,
  InfeasibleConstraint,
  SearchFailure,
  GapCollapsed,
  SpsViolated,
  DegenerateModel,
};

const char* to_string(ErrorKind kind);

class FpsError : public std::runtime_error {
 public:
  FpsError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class NumericalFailure : public FpsError {
 public:
  NumericalFailure(const std::string& what, int iterations)
      : FpsError(ErrorKind::NumericalFailure, what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

/// Every tolerance used by the library in one place. Operations take a
/// `const NumericPolicy&` defaulting to `NumericPolicy{}` so a caller can
/// override any of them per call.
struct NumericPolicy {
  double symmetry_tol = 1e-12;       // relative: |A_ij - A_ji| <= tol * (1 + max|A|)
  double reconstruction_tol = 1e-9;  // relative spectral reconstruction
  double orthonormal_tol = 1e-8;     // ||U^T U - I||_F for Procrustes inputs
  double fantope_eig_tol = 1e-8;     // eigenvalues of H in [-eps, 1 + eps]
  double trace_tol = 1e-8;           // |trace(H) - k| <= tol * k
  double gap_tol = 1e-10;            // spectral gaps at or below this are ties
  double support_leverage_tol = 1e-10;
  double rank_sign_zero_tol = 1e-12;  // |M_ij| at or below counts as a zero sign
  int jacobi_max_sweeps = 100;
};

/// Dense symmetric p x p matrix. Construction symmetrizes the input through
/// (A + A^T)/2 and keeps the observed asymmetry so callers can audit it.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(const Matrix& a);
  SymMat(std::initializer_list<std::initializer_list<double>> rows);

  /// Like the constructor but rejects inputs whose asymmetry exceeds the
  /// policy tolerance instead of silently averaging them.
  static SymMat strict(const Matrix& a, const NumericPolicy& policy = {});
  static SymMat zero(int p) { return SymMat(Matrix::Zero(p, p)); }
  static SymMat identity(int p) { return SymMat(Matrix::Identity(p, p)); }
  static SymMat diagonal(const std::vector<double>& d);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double asymmetry() const noexcept { return asymmetry_; }
  bool all_finite() const;

  SymMat operator+(const SymMat& o) const { return SymMat(m_ + o.m_); }
  SymMat operator-(const SymMat& o) const { return SymMat(m_ - o.m_); }
  SymMat operator*(double c) const { return SymMat(m_ * c); }

 private:
  Matrix m_;
  double asymmetry_ = 0.0;
};

/// Sorted, deduplicated set of coordinate indices in [0, p).
class SupportSet {
 public:
  SupportSet() = default;
  SupportSet(std::vector<int> indices, int p);
  SupportSet(std::initializer_list<int> indices, int p)
      : SupportSet(std::vector<int>(indices), p) {}

  static SupportSet range(int first, int last, int p);  // [first, last)
  static SupportSet from_diagonal(const Matrix& h, double threshold);

  const std::vector<int>& indices() const noexcept { return idx_; }
  int size() const noexcept { return static_cast<int>(idx_.size()); }
  int dim() const noexcept { return p_; }
  bool contains(int i) const;
  SupportSet complement() const;
  bool operator==(const SupportSet& o) const { return idx_ == o.idx_; }
  std::string str() const;

 private:
  std::vector<int> idx_;
  int p_ = 0;
};

// Matrix (q1, q2) pseudo-norms used throughout: the q2 norm of the row q1 norms.
double norm_l11(const Matrix& a);        // sum |a_ij|
double norm_linf(const Matrix& a);       // max |a_ij|
double norm_l2inf(const Matrix& a);      // max row Euclidean norm
int row_sparsity(const Matrix& a, double tol = 1e-10);  // number of rows with norm > tol

Matrix submatrix(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols);

}  // namespace fps
