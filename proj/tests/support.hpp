#pragma once

// Independent reference computations for tests. Nothing here calls the
// library's own eigensolver or subspace code.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "seigen/linalg.hpp"
#include "seigen/paillier.hpp"
#include "seigen/random.hpp"

namespace testsupport {

inline Eigen::MatrixXd to_eigen(const seigen::DenseMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  return out;
}

inline seigen::RealVector to_vec(const Eigen::VectorXd& v) {
  return seigen::RealVector(v.data(), v.data() + v.size());
}

struct OraclePair {
  double value;
  seigen::RealVector vector;
};

// Eigenpairs of a symmetric matrix by descending |lambda|.
inline std::vector<OraclePair> eigen_pairs(const seigen::DenseMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(s));
  std::vector<OraclePair> out;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    out.push_back({solver.eigenvalues()(i), to_vec(solver.eigenvectors().col(i))});
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return std::fabs(a.value) > std::fabs(b.value); });
  return out;
}

inline seigen::RealVector principal_vector(const seigen::DenseMatrix& s) {
  return eigen_pairs(s).front().vector;
}

// M^T M for the column-concatenated parties.
inline seigen::DenseMatrix combined_gram(const std::vector<seigen::DenseMatrix>& parts) {
  Eigen::MatrixXd m(parts.front().rows(), 0);
  for (const auto& p : parts) {
    Eigen::MatrixXd next(m.rows(), m.cols() + static_cast<Eigen::Index>(p.cols()));
    next << m, to_eigen(p);
    m = next;
  }
  const Eigen::MatrixXd g = m.transpose() * m;
  seigen::DenseMatrix out(g.rows(), g.cols());
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) out(r, c) = g(r, c);
  return out;
}

inline double cosine(const seigen::RealVector& a, const seigen::RealVector& b) {
  const Eigen::Map<const Eigen::VectorXd> x(a.data(), static_cast<Eigen::Index>(a.size()));
  const Eigen::Map<const Eigen::VectorXd> y(b.data(), static_cast<Eigen::Index>(b.size()));
  return std::fabs(x.dot(y)) / (x.norm() * y.norm());
}

// Orthonormal basis of the column space via SVD, rank by relative threshold.
inline std::vector<seigen::RealVector> column_basis(const seigen::DenseMatrix& m, double rel = 1e-9) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m), Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  std::vector<seigen::RealVector> out;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) out.push_back(to_vec(svd.matrixU().col(i)));
  return out;
}

// Largest principal angle, from the smallest singular value of U^T V.
inline double max_angle(const std::vector<seigen::RealVector>& u, const std::vector<seigen::RealVector>& v) {
  if (u.empty() || v.empty()) return 0.0;
  Eigen::MatrixXd a(u.front().size(), u.size());
  Eigen::MatrixXd b(v.front().size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    a.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(u[i].data(), a.rows());
  for (std::size_t i = 0; i < v.size(); ++i)
    b.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(v[i].data(), b.rows());
  if (a.cols() > b.cols()) std::swap(a, b);
  // Residual form keeps precision for tiny angles.
  const Eigen::MatrixXd proj = b * (b.transpose() * a);
  const Eigen::MatrixXd resid = a - proj;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  const double sin_max = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return std::asin(std::min(1.0, sin_max));
}

inline mpz_class pascal_binomial(unsigned n, unsigned k) {
  std::vector<mpz_class> row{1};
  for (unsigned i = 1; i <= n; ++i) {
    std::vector<mpz_class> next(i + 1, 1);
    for (unsigned j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
    row = std::move(next);
  }
  return row[k];
}

inline seigen::DenseMatrix gaussian(std::size_t rows, std::size_t cols, seigen::RandomSource& rng) {
  seigen::DenseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.normal(1.0);
  return m;
}

inline std::shared_ptr<const seigen::paillier::KeyPair> test_keys() {
  static const auto keys = [] {
    seigen::RandomSource rng(424242);
    return std::make_shared<const seigen::paillier::KeyPair>(seigen::paillier::keygen(512, rng));
  }();
  return keys;
}

}  // namespace testsupport
