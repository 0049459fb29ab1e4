#include "seigen/linalg.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "seigen/errors.hpp"

namespace seigen {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_)
    throw DimensionError("matrix entry count does not match rows*cols");
  if (!all_finite()) throw DomainError("matrix entries must be finite");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

DenseMatrix DenseMatrix::from_columns(std::span<const RealVector> columns) {
  if (columns.empty()) return {};
  DenseMatrix m(columns.front().size(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != m.rows()) throw DimensionError("columns of unequal length");
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = columns[c][r];
  }
  return m;
}

std::span<const double> DenseMatrix::row(std::size_t r) const {
  return std::span<const double>(entries_).subspan(r * cols_, cols_);
}

RealVector DenseMatrix::column(std::size_t c) const {
  RealVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double DenseMatrix::frobenius_norm() const { return norm2(entries_); }

bool DenseMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](double x) { return std::isfinite(x); });
}

bool DenseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol) return false;
  return true;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

DenseMatrix hconcat(std::span<const DenseMatrix> blocks) {
  if (blocks.empty()) return {};
  const std::size_t rows = blocks.front().rows();
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) throw DimensionError("hconcat: row counts differ");
    cols += b.cols();
  }
  DenseMatrix out(rows, cols);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, offset + c) = b(r, c);
    offset += b.cols();
  }
  return out;
}

DenseMatrix gram(const DenseMatrix& m) {
  DenseMatrix out(m.cols(), m.cols());
  for (std::size_t i = 0; i < m.cols(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < m.rows(); ++r) s += m(r, i) * m(r, j);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

DenseMatrix outer_gram(const DenseMatrix& m) {
  DenseMatrix out(m.rows(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.rows(); ++j) {
      const double s = dot(m.row(i), m.row(j));
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

RealVector matvec(const DenseMatrix& m, std::span<const double> x) {
  if (m.cols() != x.size()) throw DimensionError("matvec: cols(M) != len(x)");
  RealVector out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = dot(m.row(r), x);
  return out;
}

RealVector matvec_transpose(const DenseMatrix& m, std::span<const double> x) {
  if (m.rows() != x.size()) throw DimensionError("matvec_transpose: rows(M) != len(x)");
  RealVector out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c] * x[r];
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2_squared(std::span<const double> x) { return dot(x, x); }

double norm2(std::span<const double> x) { return std::sqrt(norm2_squared(x)); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

RealVector normalize(std::span<const double> x) {
  const double n = norm2(x);
  if (!(n > 1e-300)) throw DegenerateError("cannot normalize a zero vector");
  return scaled(x, 1.0 / n);
}

RealVector axpy(double a, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
  RealVector out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += a * x[i];
  return out;
}

RealVector scaled(std::span<const double> x, double a) {
  RealVector out(x.begin(), x.end());
  for (double& v : out) v *= a;
  return out;
}

double abs_cosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::min(1.0, std::fabs(dot(a, b)) / (na * nb));
}

void canonicalize_sign(RealVector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::fabs(v[i]) > std::fabs(v[best])) best = i;
  if (!v.empty() && v[best] < 0)
    for (double& x : v) x = -x;
}

namespace {

// Runs a short power iteration on S - lambda v v^T and reports whether the
// deflated operator has an eigenvalue as large as lambda.
bool repeated_top_eigenvalue(const DenseMatrix& s, const RealVector& v, double lambda, int rounds) {
  const std::size_t n = v.size();
  RealVector y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i + 1));
  y = deflate(y, v);
  double estimate = 0.0;
  for (int r = 0; r < rounds; ++r) {
    const double len = norm2(y);
    if (len <= 1e-300) return false;
    y = scaled(y, 1.0 / len);
    RealVector z = deflate(matvec(s, y), v);
    estimate = dot(y, z);
    y = std::move(z);
  }
  return std::fabs(estimate) >= (1.0 - 1e-6) * std::fabs(lambda);
}

}  // namespace

PowerIterationOutcome power_iteration_reference(const DenseMatrix& s, RealVector x0, double eps,
                                                int max_rounds) {
  if (s.rows() != s.cols()) throw DimensionError("power iteration needs a square matrix");
  if (!s.is_symmetric(1e-12 * std::max(1.0, s.frobenius_norm())))
    throw DomainError("power iteration reference expects a symmetric matrix");
  RealVector x = normalize(x0);
  for (int round = 1; round <= max_rounds; ++round) {
    RealVector y = matvec(s, x);
    const double lambda = dot(x, y);
    const double residual = norm2(axpy(-lambda, x, y));
    if (residual <= eps * std::fabs(lambda)) {
      if (repeated_top_eigenvalue(s, x, lambda, std::max(round, 50)))
        throw NonConvergenceError("principal eigenvalue is repeated; no unique direction", x);
      canonicalize_sign(x);
      return {{lambda, std::move(x)}, round};
    }
    x = normalize(y);
  }
  throw NonConvergenceError("power iteration did not converge", std::move(x));
}

DenseMatrix correlation_blocks(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("correlation_blocks: row counts differ");
  const std::size_t m = a.cols();
  const std::size_t n = b.cols();
  DenseMatrix out(m + n, m + n);
  auto block = [&](const DenseMatrix& x, const DenseMatrix& y, std::size_t ro, std::size_t co) {
    for (std::size_t i = 0; i < x.cols(); ++i)
      for (std::size_t j = 0; j < y.cols(); ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) acc += x(r, i) * y(r, j);
        out(ro + i, co + j) = acc;
      }
  };
  block(a, a, 0, 0);
  block(a, b, 0, m);
  block(b, b, m, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out(m + i, j) = out(j, m + i);
  return out;
}

EigenPair map_eigenvector_transpose(const DenseMatrix& m, const EigenPair& pair) {
  if (!(pair.value > 1e-10))
    throw DomainError("transpose mapping needs a non-zero eigenvalue");
  RealVector w = normalize(matvec(m, pair.vector));
  const RealVector mmt_w = matvec(m, matvec_transpose(m, w));
  const double scale = std::max(1.0, m.frobenius_norm() * m.frobenius_norm());
  if (norm2(axpy(-pair.value, w, mmt_w)) > 1e-8 * scale)
    throw DomainError("input is not an eigenpair of M^T M");
  return {pair.value, std::move(w)};
}

DenseMatrix pad_matrix(const DenseMatrix& a, double r) {
  if (!(r > 0.0)) throw DomainError("padding scalar must be positive");
  DenseMatrix out(a.rows(), a.cols() + a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    out(i, a.cols() + i) = r;
  }
  return out;
}

double default_null_tolerance(const DenseMatrix& a) {
  const double f = a.frobenius_norm();
  return std::max(1e-10 * f * f, std::numeric_limits<double>::min());
}

std::vector<RealVector> left_null_space(const DenseMatrix& a, double tol) {
  if (!(tol > 0.0)) throw DomainError("null space tolerance must be positive");
  std::vector<RealVector> basis;
  for (auto& pair : jacobi_eigen_oracle(outer_gram(a)))
    if (pair.value < tol) basis.push_back(std::move(pair.vector));
  return basis;
}

std::vector<RealVector> column_space(const DenseMatrix& a, double tol) {
  std::vector<RealVector> basis;
  for (auto& pair : jacobi_eigen_oracle(outer_gram(a)))
    if (pair.value >= tol) basis.push_back(std::move(pair.vector));
  return basis;
}

std::vector<RealVector> orthonormalize(std::span<const RealVector> vectors, double rel_tol) {
  std::vector<RealVector> basis;
  for (const auto& v : vectors) {
    const double original = norm2(v);
    if (original == 0.0) continue;
    RealVector w = v;
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) w = axpy(-dot(w, q), q, w);
    const double residual = norm2(w);
    if (residual > rel_tol * original) basis.push_back(scaled(w, 1.0 / residual));
  }
  return basis;
}

std::vector<RealVector> dominant_subspace(std::span<const RealVector> vectors, std::size_t rank) {
  if (vectors.empty() || rank == 0) return {};
  const DenseMatrix d = DenseMatrix::from_columns(vectors);
  auto pairs = jacobi_eigen_oracle(outer_gram(d));
  std::vector<RealVector> out;
  for (std::size_t i = 0; i < std::min(rank, pairs.size()); ++i)
    out.push_back(std::move(pairs[i].vector));
  return out;
}

namespace {

void require_orthonormal(std::span<const RealVector> u, const char* name) {
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i; j < u.size(); ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      if (std::fabs(dot(u[i], u[j]) - expected) > 1e-8)
        throw DomainError(std::string("principal_angles: ") + name + " is not orthonormal");
    }
}

std::vector<double> sorted_eigenvalues(const DenseMatrix& s) {
  std::vector<double> values;
  for (const auto& p : jacobi_eigen_oracle(s)) values.push_back(std::max(0.0, p.value));
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace

std::vector<double> principal_angles(std::span<const RealVector> u, std::span<const RealVector> v) {
  require_orthonormal(u, "U");
  require_orthonormal(v, "V");
  if (u.empty() || v.empty()) return {};
  if (u.size() > v.size()) std::swap(u, v);
  const std::size_t p = u.size();
  // cos^2 from (U^T V)(U^T V)^T, sin^2 from the residual of U against span(V).
  DenseMatrix cross(p, v.size());
  std::vector<RealVector> residual;
  for (std::size_t i = 0; i < p; ++i) {
    RealVector r = u[i];
    for (std::size_t j = 0; j < v.size(); ++j) {
      cross(i, j) = dot(u[i], v[j]);
      r = axpy(-cross(i, j), v[j], r);
    }
    residual.push_back(std::move(r));
  }
  DenseMatrix res_gram(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) res_gram(i, j) = dot(residual[i], residual[j]);

  auto cos2 = sorted_eigenvalues(multiply(cross, cross.transpose()));
  std::reverse(cos2.begin(), cos2.end());
  const auto sin2 = sorted_eigenvalues(res_gram);

  std::vector<double> angles(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double c = std::sqrt(std::min(1.0, cos2[i]));
    const double s = std::sqrt(std::min(1.0, sin2[i]));
    angles[i] = c >= std::sqrt(0.5) ? std::asin(s) : std::acos(c);
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

RealVector deflate(std::span<const double> u, std::span<const double> v) {
  if (std::fabs(norm2(v) - 1.0) > 1e-10) throw DomainError("deflate: direction must be unit norm");
  return axpy(-dot(u, v), v, u);
}

DenseMatrix read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing matrix header", 0);
  std::istringstream header(line);
  long long rows = -1;
  long long cols = -1;
  if (!(header >> rows >> cols) || rows < 0 || cols < 0)
    throw ParseError("malformed matrix header", 0);
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(rows * cols));
  for (long long r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw ParseError("missing matrix row " + std::to_string(r), 0);
    std::istringstream row(line);
    double x;
    long long count = 0;
    while (row >> x) {
      entries.push_back(x);
      ++count;
    }
    if (count != cols)
      throw ParseError("row " + std::to_string(r) + " has " + std::to_string(count) +
                           " entries, expected " + std::to_string(cols),
                       0);
  }
  return DenseMatrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                     std::move(entries));
}

void write_matrix(std::ostream& out, const DenseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (c) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

DenseMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open matrix file " + path);
  return read_matrix(in);
}

void save_matrix(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write matrix file " + path);
  write_matrix(out, m);
}

}  // namespace seigen
