#pragma once

// Dense real/complex matrices and the handful of spectral routines the
// policy-optimization engines need. Problem sizes are small (n <= ~100), so
// everything is plain row-major storage with O(n^3) kernels.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "polgeo/error.hpp"

namespace polgeo {

/// Centralized numerical tolerances.
namespace tol {
inline constexpr double kStructural = 1e-10;   // symmetry / Hermitian checks
inline constexpr double kConvergence = 1e-12;  // relative stop for iterations
inline constexpr double kPivotFloor = 1e-14;   // relative pivot floor in elimination
inline constexpr double kStabilityMargin = 1e-12;
}  // namespace tol

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols);
  /// Entries are row-major; throws kDimension on a size mismatch and kContract on non-finite input.
  Mat(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat zeros(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }
  static Mat identity(std::size_t n);
  static Mat scalar(double v) { return Mat(1, 1, {v}); }
  static Mat column(std::span<const double> v);
  static Mat diag(std::span<const double> v);
  static Mat unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Mat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Mat& b);

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  bool operator==(const Mat& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator-(Mat a);
Mat operator*(Mat a, double s);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b);

Mat matmul(const Mat& x, const Mat& y);
Mat transpose(const Mat& m);
double trace(const Mat& m);
double frobenius_norm(const Mat& m);
/// tr(x^T y), the Frobenius pairing.
double frobenius_inner(const Mat& x, const Mat& y);
double max_abs(const Mat& m);
Mat symmetrize(const Mat& m);
bool is_symmetric(const Mat& m, double tol = tol::kStructural);
bool all_finite(const Mat& m);

/// Block-diagonal assembly diag(a, b).
Mat block_diag(const Mat& a, const Mat& b);
/// [[a, b], [c, d]] with compatible shapes.
Mat block2x2(const Mat& a, const Mat& b, const Mat& c, const Mat& d);
Mat hstack(const Mat& a, const Mat& b);
Mat vstack(const Mat& a, const Mat& b);
Mat kron(const Mat& a, const Mat& b);
/// Column-stacking vectorization and its inverse.
Mat vec(const Mat& m);
Mat unvec(const Mat& v, std::size_t rows, std::size_t cols);

/// Gaussian elimination with partial pivoting. `b` may carry several columns.
/// Throws kSingular when a pivot drops below 1e-14 * ||G||_F.
Mat solve_linear(const Mat& g, const Mat& b);
Mat inverse(const Mat& g);
/// Numerical rank via the eigenvalues of M^T M against rel_tol * sigma_max.
std::size_t numerical_rank(const Mat& m, double rel_tol);

/// rho(M) from the norms of repeated squares, r_k = ||M^(2^k)||_F^(1/2^k).
double spectral_radius(const Mat& m);
/// Largest eigenvalue of a symmetric matrix.
double sym_lambda_max(const Mat& s);
double sym_lambda_min(const Mat& s);
/// sigma_max(M).
double spectral_norm(const Mat& m);

using cplx = std::complex<double>;

class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols);
  CMat(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  explicit CMat(const Mat& real);

  static CMat identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

CMat matmul(const CMat& x, const CMat& y);
CMat adjoint(const CMat& m);
CMat operator-(const CMat& a, const CMat& b);
CMat operator*(cplx s, const CMat& a);
double frobenius_norm(const CMat& m);
CMat solve_linear(const CMat& g, const CMat& b);
bool is_hermitian(const CMat& h, double tol = tol::kStructural);
/// Largest eigenvalue of a Hermitian matrix.
double hermitian_lambda_max(const CMat& h);

}  // namespace polgeo
