#include "seigen/datagen.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "seigen/errors.hpp"

namespace seigen {

DenseMatrix random_orthogonal(std::size_t n, RandomSource& rng) {
  DenseMatrix q = DenseMatrix::identity(n);
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (std::size_t r = 0; r < n; ++r) {
          const double a = q(r, i);
          const double b = q(r, j);
          q(r, i) = c * a - s * b;
          q(r, j) = s * a + c * b;
        }
      }
    }
  }
  return q;
}

DenseMatrix random_gaussian(std::size_t rows, std::size_t cols, RandomSource& rng) {
  DenseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.normal(1.0);
  return m;
}

DenseMatrix random_low_rank(std::size_t rows, std::size_t cols, std::size_t rank, RandomSource& rng) {
  const DenseMatrix left = random_gaussian(rows, rank, rng);
  const DenseMatrix right = random_gaussian(rank, cols, rng);
  return multiply(left, right);
}

std::vector<DenseMatrix> split_columns(const DenseMatrix& m, const std::vector<std::size_t>& sizes) {
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (total != m.cols()) throw DimensionError("column sizes do not sum to the matrix width");
  std::vector<DenseMatrix> parts;
  std::size_t offset = 0;
  for (const std::size_t n : sizes) {
    DenseMatrix part(m.rows(), n);
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < n; ++c) part(r, c) = m(r, offset + c);
    parts.push_back(std::move(part));
    offset += n;
  }
  return parts;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (!(spec.gap > 0.0 && spec.gap < 1.0)) throw DomainError("gap must lie in (0, 1)");
  if (!(spec.tail_ratio > 0.0 && spec.tail_ratio <= 1.0)) throw DomainError("tail ratio must lie in (0, 1]");
  if (spec.k == 0 || spec.sizes.empty()) throw DimensionError("empty dimensions");
  for (const std::size_t n : spec.sizes)
    if (n == 0) throw DimensionError("party with no columns");
  const std::size_t m = std::accumulate(spec.sizes.begin(), spec.sizes.end(), std::size_t{0});
  const std::size_t rank = std::min(spec.k, m);
  if (rank < 2) throw DimensionError("need rank at least 2 to realise a gap");

  RandomSource rng(spec.seed);
  const DenseMatrix u = random_orthogonal(spec.k, rng);
  const DenseMatrix v = random_orthogonal(m, rng);

  SyntheticData data;
  data.eigenvalues.push_back(spec.top_eigenvalue);
  double lambda = spec.top_eigenvalue * spec.gap;
  for (std::size_t j = 1; j < rank; ++j) {
    data.eigenvalues.push_back(lambda);
    lambda *= spec.tail_ratio;
  }

  data.combined = DenseMatrix(spec.k, m, 0.0);
  for (std::size_t j = 0; j < rank; ++j) {
    const double sigma = std::sqrt(data.eigenvalues[j]);
    for (std::size_t r = 0; r < spec.k; ++r)
      for (std::size_t c = 0; c < m; ++c) data.combined(r, c) += sigma * u(r, j) * v(c, j);
  }
  data.parts = split_columns(data.combined, spec.sizes);
  return data;
}

}  // namespace seigen
