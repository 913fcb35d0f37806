#include "fps/spectral.hpp"

#include "fps/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fps {

double Spectrum::gap(int k) const {
  if (k < 1 || k > dim()) fail(ErrorKind::InvalidInput, "gap index k out of range");
  if (k == dim()) return std::numeric_limits<double>::infinity();
  return values(k - 1) - values(k);
}

FantopePoint FantopePoint::certify(const Matrix& h, int k, const NumericPolicy& policy) {
  FantopePoint fp;
  const SymMat sym(h);
  fp.h_ = sym.mat();
  fp.k_ = k;
  fp.sym_ = sym.asymmetry();
  const Spectrum s = eig_sym(sym, policy);
  fp.low_ = std::max(0.0, -s.values(s.dim() - 1));
  fp.high_ = std::max(0.0, s.values(0) - 1.0);
  fp.trace_ = std::abs(fp.h_.trace() - k);
  return fp;
}

FantopePoint FantopePoint::from_eigen(const Matrix& v, const Vector& w, int k) {
  FantopePoint fp;
  fp.h_ = kernels::weighted_outer(v, w);
  fp.k_ = k;
  fp.sym_ = 0.0;  // weighted_outer mirrors its upper triangle
  fp.low_ = std::max(0.0, -w.minCoeff());
  fp.high_ = std::max(0.0, w.maxCoeff() - 1.0);
  fp.trace_ = std::abs(fp.h_.trace() - k);
  return fp;
}

double FantopePoint::constraint_residual() const noexcept { return std::max({sym_, low_, high_, trace_}); }

bool FantopePoint::feasible(const NumericPolicy& policy) const {
  return low_ <= policy.fantope_eig_tol && high_ <= policy.fantope_eig_tol &&
         trace_ <= policy.trace_tol * k_ && sym_ <= policy.symmetry_tol * (1.0 + norm_linf(h_));
}

Spectrum eig_sym(const SymMat& a, const NumericPolicy&) {
  if (!a.all_finite()) fail(ErrorKind::InvalidInput, "eig_sym: non-finite entries");
  const int p = a.dim();
  Spectrum s;
  if (p == 0) return s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat(), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    // Eigen caps the implicit symmetric QR at 30 iterations per eigenvalue.
    throw NumericalFailure("eig_sym: symmetric QR did not converge", 30 * p);
  s.values = es.eigenvalues().reverse();
  s.vectors = es.eigenvectors().rowwise().reverse();
  return s;
}

Vector clipped_shares(const Vector& gamma, double theta) {
  return (gamma.array() - theta).max(0.0).min(1.0).matrix();
}

namespace {

double shares_sum(const Vector& gamma, double theta) { return clipped_shares(gamma, theta).sum(); }

}  // namespace

double water_fill_level(const Vector& gamma, int k) {
  const Eigen::Index p = gamma.size();
  if (k <= 0 || k > p) fail(ErrorKind::InvalidInput, "water_fill_level: need 0 < k <= p");

  // g(theta) = sum clamp(gamma - theta, 0, 1) is continuous, non-increasing and
  // linear between consecutive breakpoints. g = p left of every breakpoint and
  // g = 0 right of them, so some segment brackets k.
  std::vector<double> knots;
  knots.reserve(2 * static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    knots.push_back(gamma(j));
    knots.push_back(gamma(j) - 1.0);
  }
  std::sort(knots.begin(), knots.end());

  const double target = static_cast<double>(k);
  double prev_knot = knots.front();
  double prev_val = shares_sum(gamma, prev_knot);  // == p
  if (prev_val <= target) return prev_knot;        // k == p: any theta <= min knot works
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double knot = knots[i];
    if (knot == prev_knot) continue;
    const double val = shares_sum(gamma, knot);
    if (val <= target) {
      if (val == target) return knot;
      // linear on [prev_knot, knot]
      return prev_knot + (prev_val - target) * (knot - prev_knot) / (prev_val - val);
    }
    prev_knot = knot;
    prev_val = val;
  }
  return knots.back();
}

FantopeProjectionResult fantope_project(const Spectrum& spec, int k) {
  const int p = spec.dim();
  if (k <= 0 || k > p) fail(ErrorKind::InvalidInput, "fantope_project: need 0 < k <= p");
  FantopeProjectionResult r;
  r.theta = water_fill_level(spec.values, k);
  if (k == p) {
    // Only the identity is feasible; avoid the rounding of V V^T.
    r.clipped = Vector::Ones(p);
    r.point = FantopePoint::from_eigen(Matrix::Identity(p, p), r.clipped, k);
    return r;
  }
  r.clipped = clipped_shares(spec.values, r.theta);
  r.point = FantopePoint::from_eigen(spec.vectors, r.clipped, k);
  return r;
}

FantopeProjectionResult fantope_project(const SymMat& a, int k, const NumericPolicy& policy) {
  if (k <= 0 || k > a.dim()) fail(ErrorKind::InvalidInput, "fantope_project: need 0 < k <= p");
  return fantope_project(eig_sym(a, policy), k);
}

TopKProjector top_k_projector(const Spectrum& spec, int k, const NumericPolicy& policy) {
  const int p = spec.dim();
  if (k <= 0 || k > p) fail(ErrorKind::InvalidInput, "top_k_projector: need 0 < k <= p");
  TopKProjector t;
  Vector w = Vector::Zero(p);
  w.head(k).setOnes();
  t.point = FantopePoint::from_eigen(spec.vectors, w, k);
  t.basis = spec.vectors.leftCols(k);
  t.gap = spec.gap(k);
  t.unique = t.gap > policy.gap_tol;
  return t;
}

TopKProjector top_k_projector(const SymMat& a, int k, const NumericPolicy& policy) {
  if (k <= 0 || k > a.dim()) fail(ErrorKind::InvalidInput, "top_k_projector: need 0 < k <= p");
  return top_k_projector(eig_sym(a, policy), k, policy);
}

ProcrustesResult procrustes_align(const Matrix& u, const Matrix& v, const NumericPolicy& policy) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    fail(ErrorKind::InvalidInput, "procrustes_align: shape mismatch");
  const Eigen::Index k = u.cols();
  const Matrix eye = Matrix::Identity(k, k);
  if ((u.transpose() * u - eye).norm() > policy.orthonormal_tol ||
      (v.transpose() * v - eye).norm() > policy.orthonormal_tol)
    fail(ErrorKind::InvalidInput, "procrustes_align: inputs must have orthonormal columns");

  ProcrustesResult r;
  if (k == 0) {
    r.rotation = Matrix(0, 0);
    return r;
  }
  // argmin_O ||U - V O||_F over orthogonal O is W Z^T for V^T U = W S Z^T.
  Eigen::JacobiSVD<Matrix> svd(v.transpose() * u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  r.rotation = svd.matrixU() * svd.matrixV().transpose();
  r.distance = (u - v * r.rotation).norm();
  return r;
}

namespace reference {

Spectrum jacobi_eig(const SymMat& a, const NumericPolicy& policy) {
  if (!a.all_finite()) fail(ErrorKind::InvalidInput, "jacobi_eig: non-finite entries");
  const int p = a.dim();
  Matrix m = a.mat();
  Matrix v = Matrix::Identity(p, p);
  const double scale = std::max(1.0, m.norm());

  int sweep = 0;
  for (; sweep < policy.jacobi_max_sweeps; ++sweep) {
    double off = 0.0;
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < j; ++i) off += m(i, j) * m(i, j);
    if (std::sqrt(off) <= 1e-15 * scale) break;

    for (int q = 1; q < p; ++q) {
      for (int r = 0; r < q; ++r) {
        const double apq = m(r, q);
        if (std::abs(apq) < 1e-300) continue;
        // Rotation annihilating m(r, q): tan(2t) = 2 a_rq / (a_qq - a_rr).
        const double tau = (m(q, q) - m(r, r)) / (2.0 * apq);
        const double t = std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int i = 0; i < p; ++i) {
          const double mir = m(i, r), miq = m(i, q);
          m(i, r) = c * mir - s * miq;
          m(i, q) = s * mir + c * miq;
        }
        for (int i = 0; i < p; ++i) {
          const double mri = m(r, i), mqi = m(q, i);
          m(r, i) = c * mri - s * mqi;
          m(q, i) = s * mri + c * mqi;
        }
        for (int i = 0; i < p; ++i) {
          const double vir = v(i, r), viq = v(i, q);
          v(i, r) = c * vir - s * viq;
          v(i, q) = s * vir + c * viq;
        }
      }
    }
  }
  if (sweep == policy.jacobi_max_sweeps)
    throw NumericalFailure("jacobi_eig: no convergence", sweep);

  std::vector<int> order(p);
  for (int i = 0; i < p; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return m(x, x) > m(y, y); });
  Spectrum s;
  s.values.resize(p);
  s.vectors.resize(p, p);
  for (int j = 0; j < p; ++j) {
    s.values(j) = m(order[j], order[j]);
    s.vectors.col(j) = v.col(order[j]);
  }
  return s;
}

}  // namespace reference
}  // namespace fps
