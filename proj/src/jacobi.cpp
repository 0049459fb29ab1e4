// Cyclic Jacobi eigensolver. Shares no code with the power iteration so it
// can serve as an independent reference.

#include <algorithm>
#include <cmath>

#include "seigen/errors.hpp"
#include "seigen/linalg.hpp"

namespace seigen {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

std::vector<EigenPair> jacobi_eigen_oracle(const DenseMatrix& s) {
  if (s.rows() != s.cols()) throw DomainError("jacobi oracle needs a square matrix");
  const double scale = s.frobenius_norm();
  if (!s.is_symmetric(1e-10 * std::max(1.0, scale)))
    throw DomainError("jacobi oracle needs a symmetric matrix");
  const std::size_t n = s.rows();

  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (s(i, j) + s(j, i));
  DenseMatrix v = DenseMatrix::identity(n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off == 0.0 || off <= 1e-15 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<EigenPair> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i].value = a(i, i);
    pairs[i].vector = v.column(i);
    canonicalize_sign(pairs[i].vector);
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& x, const EigenPair& y) {
    return std::fabs(x.value) > std::fabs(y.value);
  });
  return pairs;
}

}  // namespace seigen
