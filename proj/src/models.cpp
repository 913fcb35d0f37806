#include "fps/models.hpp"

#include "fps/kernels.hpp"
#include "fps/rng.hpp"

#include <algorithm>
#include <cmath>

namespace fps {

namespace {

Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix g(rows, cols);
  // Row-major fill order is part of the reproducibility contract.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = rng.normal();
  return g;
}

// Haar-distributed s x k orthonormal frame: QR of a Gaussian matrix with the
// signs of R's diagonal absorbed into Q.
Matrix haar_frame(Rng& rng, int s, int k) {
  const Matrix g = gaussian_matrix(rng, s, k);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(s, k);
  const Matrix r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  for (int j = 0; j < k; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

}  // namespace

ModelInstance gen_spiked(int p, int k, const SupportSet& support, const std::vector<double>& spikes,
                         double noise, std::uint64_t seed) {
  const int s = support.size();
  if (p < 1 || support.dim() != p) fail(ErrorKind::InvalidInput, "gen_spiked: support dimension must equal p");
  if (k < 1 || s < k) fail(ErrorKind::InvalidInput, "gen_spiked: need 1 <= k <= |J|");
  if (static_cast<int>(spikes.size()) != k) fail(ErrorKind::InvalidInput, "gen_spiked: need exactly k spike values");
  for (std::size_t i = 0; i < spikes.size(); ++i) {
    if (!(spikes[i] > 0.0)) fail(ErrorKind::InvalidInput, "gen_spiked: spike values must be > 0");
    if (i && spikes[i] > spikes[i - 1]) fail(ErrorKind::InvalidInput, "gen_spiked: spike values must be descending");
  }

  Rng rng(seed);
  Matrix frame;
  bool ok = false;
  for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
    frame = haar_frame(rng, s, k);
    ok = frame.rowwise().norm().minCoeff() > 1e-8;
  }
  if (!ok) fail(ErrorKind::DegenerateModel, "gen_spiked: every draw of U had a vanishing row");

  Matrix u = Matrix::Zero(p, k);
  for (int i = 0; i < s; ++i) u.row(support.indices()[i]) = frame.row(i);
  Vector lambda(k);
  for (int j = 0; j < k; ++j) lambda(j) = spikes[j];

  ModelInstance m;
  m.sigma = SymMat(u * lambda.asDiagonal() * u.transpose() + noise * Matrix::Identity(p, p));
  m.pi = FantopePoint::from_eigen(u, Vector::Ones(k), k);
  m.support = support;
  m.k = k;
  const Spectrum spec = eig_sym(m.sigma);
  m.eigenvalues = spec.values;
  m.gap = spec.gap(k);
  m.label = "spiked";
  return m;
}

ModelInstance gen_toy(double t) {
  if (!(std::abs(t) < 0.35)) fail(ErrorKind::InvalidInput, "gen_toy: need |t| < 0.35");
  ModelInstance m;
  m.sigma = SymMat{{0.9, 0.8, t}, {0.8, 0.9, -t}, {t, -t, 1.0}};
  const Spectrum spec = eig_sym(m.sigma);
  const TopKProjector top = top_k_projector(spec, 1);
  if (top.point(2, 2) > 1e-8) fail(ErrorKind::DegenerateModel, "gen_toy: leading eigenvector leaks onto coordinate 2");
  m.pi = top.point;
  m.support = SupportSet({0, 1}, 3);
  m.k = 1;
  m.gap = top.gap;
  m.eigenvalues = spec.values;
  m.label = "toy";
  return m;
}

PlantedClique gen_planted_clique(int p, int s, std::uint64_t seed) {
  if (s < 2 || s > p) fail(ErrorKind::InvalidInput, "gen_planted_clique: need 2 <= s <= p");
  Rng rng(seed);
  Matrix a(p, p);
  for (int i = 0; i < p; ++i) {
    a(i, i) = 1.0;
    for (int j = i + 1; j < p; ++j) {
      const bool edge = (j < s) || rng.coin(0.5);
      a(i, j) = a(j, i) = edge ? 1.0 : -1.0;
    }
  }
  const double scale = 1.0 / (p - 1);
  PlantedClique out;
  // A is symmetric, so A A^T = A^T A.
  out.s = SymMat(kernels::scaled_gram(a, scale));

  Matrix sigma = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) sigma(i, i) = p * scale;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      if (i != j) sigma(i, j) = s * scale;
  out.sigma = SymMat(sigma);
  out.clique = SupportSet::range(0, s, p);
  return out;
}

SampleBatch sample_gaussian(const SymMat& sigma, int n, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::InvalidInput, "sample_gaussian: need n >= 1");
  const Spectrum spec = eig_sym(sigma);
  if (spec.values(spec.dim() - 1) < -1e-10)
    fail(ErrorKind::InvalidInput, "sample_gaussian: Sigma is not positive semidefinite");
  const Vector root = spec.values.cwiseMax(0.0).cwiseSqrt();
  const Matrix half = kernels::weighted_outer(spec.vectors, root);

  Rng rng(seed);
  SampleBatch b;
  b.n = n;
  b.seed = seed;
  b.data = gaussian_matrix(rng, n, sigma.dim()) * half;
  return b;
}

SampleBatch sample_gaussian(const ModelInstance& model, int n, std::uint64_t seed) {
  return sample_gaussian(model.sigma, n, seed);
}

SymMat sample_covariance(const SampleBatch& batch) {
  if (batch.n < 2 || batch.data.rows() != batch.n) fail(ErrorKind::InvalidInput, "sample_covariance: need n >= 2");
  const Matrix centered = batch.data.rowwise() - batch.data.colwise().mean();
  return SymMat(kernels::scaled_gram(centered, 1.0 / batch.n));
}

double entrywise_error(const SymMat& s, const SymMat& sigma) {
  if (s.dim() != sigma.dim()) fail(ErrorKind::InvalidInput, "entrywise_error: dimension mismatch");
  return kernels::max_abs_difference(s.mat(), sigma.mat());
}

}  // namespace fps
