#pragma once

#include "fps/common.hpp"
#include "fps/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fps {

/// Population covariance with a known principal subspace.
struct ModelInstance {
  SymMat sigma;
  FantopePoint pi;    // rank-k projector onto the principal subspace
  SupportSet support;
  int k = 1;
  double gap = 0.0;   // lambda_k - lambda_{k+1} of sigma
  Vector eigenvalues;
  std::string label;
};

struct SampleBatch {
  int n = 0;
  Matrix data;  // n x p, one observation per row
  std::uint64_t seed = 0;
};

struct PlantedClique {
  SymMat s;      // A A^T / (p - 1)
  SymMat sigma;  // E[S] in closed form
  SupportSet clique;
};

/// Sigma = U diag(spikes) U^T + noise * I with U a Haar-random orthonormal
/// |J| x k basis embedded on J. U is redrawn until no row of it vanishes so that
/// supp(diag(Pi)) is exactly J.
ModelInstance gen_spiked(int p, int k, const SupportSet& support, const std::vector<double>& spikes,
                         double noise, std::uint64_t seed);

/// The 3 x 3 example [[.9, .8, t], [.8, .9, -t], [t, -t, 1]] with k = 1, J = {0, 1}.
ModelInstance gen_toy(double t);

/// Random +-1 adjacency with a planted clique on {0, ..., s-1}: inside the clique
/// every edge is present, elsewhere each edge is present with probability 1/2.
/// The diagonal of A is +1.
PlantedClique gen_planted_clique(int p, int s, std::uint64_t seed);

/// n i.i.d. rows from N(0, Sigma) via the symmetric square root of Sigma.
SampleBatch sample_gaussian(const SymMat& sigma, int n, std::uint64_t seed);
SampleBatch sample_gaussian(const ModelInstance& model, int n, std::uint64_t seed);

/// Centered sample covariance with 1/n normalization.
SymMat sample_covariance(const SampleBatch& batch);

/// ||S - Sigma||_{inf,inf}.
double entrywise_error(const SymMat& s, const SymMat& sigma);

}  // namespace fps
