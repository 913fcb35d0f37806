#include "fps/common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fps {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::InfeasibleConstraint: return "InfeasibleConstraint";
    case ErrorKind::SearchFailure: return "SearchFailure";
    case ErrorKind::GapCollapsed: return "GapCollapsed";
    case ErrorKind::SpsViolated: return "SpsViolated";
    case ErrorKind::DegenerateModel: return "DegenerateModel";
  }
  return "Unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw FpsError(kind, what); }

namespace {

double max_asymmetry(const Matrix& a) {
  double r = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = j + 1; i < a.rows(); ++i) r = std::max(r, std::abs(a(i, j) - a(j, i)));
  return r;
}

}  // namespace

SymMat::SymMat(const Matrix& a) {
  if (a.rows() != a.cols())
    fail(ErrorKind::InvalidInput, "matrix is " + std::to_string(a.rows()) + "x" +
                                      std::to_string(a.cols()) + ", expected square");
  asymmetry_ = max_asymmetry(a);
  m_ = 0.5 * (a + a.transpose());
}

SymMat::SymMat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto p = static_cast<Eigen::Index>(rows.size());
  Matrix a(p, p);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != p) fail(ErrorKind::InvalidInput, "ragged matrix literal");
    Eigen::Index j = 0;
    for (double v : row) a(i, j++) = v;
    ++i;
  }
  *this = SymMat(a);
}

SymMat SymMat::strict(const Matrix& a, const NumericPolicy& policy) {
  SymMat s(a);
  const double scale = 1.0 + (a.size() ? a.cwiseAbs().maxCoeff() : 0.0);
  if (s.asymmetry_ > policy.symmetry_tol * scale)
    fail(ErrorKind::InvalidInput, "matrix is not symmetric (max |A_ij - A_ji| = " +
                                      std::to_string(s.asymmetry_) + ")");
  return s;
}

SymMat SymMat::diagonal(const std::vector<double>& d) {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) a(i, i) = d[i];
  return SymMat(a);
}

bool SymMat::all_finite() const { return m_.allFinite(); }

SupportSet::SupportSet(std::vector<int> indices, int p) : idx_(std::move(indices)), p_(p) {
  std::sort(idx_.begin(), idx_.end());
  idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
  if (!idx_.empty() && (idx_.front() < 0 || idx_.back() >= p))
    fail(ErrorKind::InvalidInput, "support index out of range [0, " + std::to_string(p) + ")");
}

SupportSet SupportSet::range(int first, int last, int p) {
  std::vector<int> v;
  for (int i = first; i < last; ++i) v.push_back(i);
  return SupportSet(std::move(v), p);
}

SupportSet SupportSet::from_diagonal(const Matrix& h, double threshold) {
  std::vector<int> v;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    if (h(i, i) > threshold) v.push_back(static_cast<int>(i));
  return SupportSet(std::move(v), static_cast<int>(h.rows()));
}

bool SupportSet::contains(int i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

SupportSet SupportSet::complement() const {
  std::vector<int> v;
  for (int i = 0; i < p_; ++i)
    if (!contains(i)) v.push_back(i);
  return SupportSet(std::move(v), p_);
}

std::string SupportSet::str() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < idx_.size(); ++i) os << (i ? "," : "") << idx_[i];
  os << '}';
  return os.str();
}

double norm_l11(const Matrix& a) { return a.cwiseAbs().sum(); }

double norm_linf(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

double norm_l2inf(const Matrix& a) { return a.rows() && a.cols() ? a.rowwise().norm().maxCoeff() : 0.0; }

int row_sparsity(const Matrix& a, double tol) {
  int count = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    if (a.row(i).norm() > tol) ++count;
  return count;
}

Matrix submatrix(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  return out;
}

}  // namespace fps
