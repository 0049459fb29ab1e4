#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace seigen {

using RealVector = std::vector<double>;

// Dense real matrix, row-major storage.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> d);
  // Columns are the given vectors, all of equal length.
  static DenseMatrix from_columns(std::span<const RealVector> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const double> entries() const noexcept { return entries_; }
  std::span<const double> row(std::size_t r) const;
  RealVector column(std::size_t c) const;

  DenseMatrix transpose() const;
  double frobenius_norm() const;
  bool all_finite() const;
  bool is_symmetric(double tol) const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

struct EigenPair {
  double value = 0.0;
  RealVector vector;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix hconcat(std::span<const DenseMatrix> blocks);
// M^T M.
DenseMatrix gram(const DenseMatrix& m);
// M M^T.
DenseMatrix outer_gram(const DenseMatrix& m);

RealVector matvec(const DenseMatrix& m, std::span<const double> x);
// M^T x without forming the transpose.
RealVector matvec_transpose(const DenseMatrix& m, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2_squared(std::span<const double> x);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);
RealVector normalize(std::span<const double> x);
RealVector axpy(double a, std::span<const double> x, std::span<const double> y);  // a*x + y
RealVector scaled(std::span<const double> x, double a);
// |<a, b>| / (|a| |b|); sign-blind since eigenvectors are direction-only.
double abs_cosine(std::span<const double> a, std::span<const double> b);
// Flips the sign so the largest-magnitude entry is positive.
void canonicalize_sign(RealVector& v);

struct PowerIterationOutcome {
  EigenPair pair;
  int rounds = 0;
};

// Textbook power iteration on a symmetric matrix. Converged when
// |S v - lambda v| <= eps |lambda| with lambda the Rayleigh quotient.
// Throws NonConvergenceError after max_rounds.
PowerIterationOutcome power_iteration_reference(const DenseMatrix& s, RealVector x0, double eps,
                                                int max_rounds);

// Cyclic Jacobi eigensolver; all pairs sorted by descending |lambda|,
// vectors sign-canonicalized.
std::vector<EigenPair> jacobi_eigen_oracle(const DenseMatrix& s);

// [A^T A, A^T B; B^T A, B^T B]
DenseMatrix correlation_blocks(const DenseMatrix& a, const DenseMatrix& b);

// (lambda, v) of M^T M  ->  (lambda, normalize(M v)) of M M^T.
EigenPair map_eigenvector_transpose(const DenseMatrix& m, const EigenPair& pair);

// [A | r I_k]
DenseMatrix pad_matrix(const DenseMatrix& a, double r);

// Default zero-eigenvalue threshold for null spaces, 1e-10 * |A|_F^2.
double default_null_tolerance(const DenseMatrix& a);
// Orthonormal basis of {x : x^T A = 0}: eigenvectors of A A^T whose
// eigenvalue is below tol.
std::vector<RealVector> left_null_space(const DenseMatrix& a, double tol);
// Orthonormal basis of the column space (eigenvalues of A A^T above tol).
std::vector<RealVector> column_space(const DenseMatrix& a, double tol);

// Modified Gram-Schmidt; drops vectors whose residual norm falls below
// rel_tol times their original norm.
std::vector<RealVector> orthonormalize(std::span<const RealVector> vectors, double rel_tol);
// Leading `rank` left singular directions of the matrix whose columns are
// `vectors`.
std::vector<RealVector> dominant_subspace(std::span<const RealVector> vectors, std::size_t rank);

// Principal angles in [0, pi/2], ascending. Inputs must be orthonormal.
std::vector<double> principal_angles(std::span<const RealVector> u, std::span<const RealVector> v);

// u - (u.v) v for unit v.
RealVector deflate(std::span<const double> u, std::span<const double> v);

// Matrix text format: "rows cols" then one line per row of space-separated reals.
DenseMatrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const DenseMatrix& m);
DenseMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const DenseMatrix& m);

}  // namespace seigen
