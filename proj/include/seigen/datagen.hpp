#pragma once

#include <cstdint>
#include <vector>

#include "seigen/linalg.hpp"
#include "seigen/random.hpp"

namespace seigen {

struct SyntheticSpec {
  std::size_t k = 20;
  std::vector<std::size_t> sizes{15, 15};
  double gap = 0.5;  // lambda_2 / lambda_1
  double top_eigenvalue = 100.0;
  double tail_ratio = 0.5;  // lambda_{j+1} / lambda_j for j >= 2
  std::uint64_t seed = 1;
};

struct SyntheticData {
  DenseMatrix combined;             // k x sum(sizes)
  std::vector<DenseMatrix> parts;   // column blocks, one per party
  std::vector<double> eigenvalues;  // nonzero eigenvalues of M^T M, descending
};

// n x n orthogonal matrix: two sweeps of Givens rotations with seeded angles.
DenseMatrix random_orthogonal(std::size_t n, RandomSource& rng);
DenseMatrix random_gaussian(std::size_t rows, std::size_t cols, RandomSource& rng);
// Gaussian product of rank at most `rank`.
DenseMatrix random_low_rank(std::size_t rows, std::size_t cols, std::size_t rank, RandomSource& rng);

// M = U diag(sigma) V^T with sigma_j^2 following the requested spectrum.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

std::vector<DenseMatrix> split_columns(const DenseMatrix& m, const std::vector<std::size_t>& sizes);

}  // namespace seigen
