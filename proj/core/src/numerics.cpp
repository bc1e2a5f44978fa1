#include "polgeo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace polgeo {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kSingular: return "singular-matrix";
    case ErrorKind::kContract: return "contract";
    case ErrorKind::kNotSchurStable: return "not-schur-stable";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kStalled: return "stalled";
    case ErrorKind::kInternalInvariant: return "internal-invariant";
    case ErrorKind::kStabilizabilitySuspect: return "stabilizability-suspect";
    case ErrorKind::kMinimalityLost: return "minimality-lost";
    case ErrorKind::kGramianSingular: return "gramian-singular";
    case ErrorKind::kTooCloseToBoundary: return "too-close-to-boundary";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

namespace {

std::string shape(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    raise(ErrorKind::kDimension, std::string(op) + ": shape mismatch " + shape(a) + " vs " + shape(b));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Mat

Mat::Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    raise(ErrorKind::kDimension, "Mat: " + std::to_string(data_.size()) + " entries for a " +
                                     std::to_string(rows_) + "x" + std::to_string(cols_) + " matrix");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) raise(ErrorKind::kContract, "Mat: non-finite entry");
  }
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) raise(ErrorKind::kDimension, "Mat: ragged initializer");
    for (double v : r) {
      if (!std::isfinite(v)) raise(ErrorKind::kContract, "Mat: non-finite entry");
      data_.push_back(v);
    }
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::column(std::span<const double> v) { return Mat(v.size(), 1, std::vector<double>(v.begin(), v.end())); }

Mat Mat::diag(std::span<const double> v) {
  Mat m(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m(i, i) = v[i];
  return m;
}

Mat Mat::unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j) {
  Mat m(rows, cols);
  m(i, j) = 1.0;
  return m;
}

Mat Mat::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) raise(ErrorKind::kDimension, "block: out of range");
  Mat b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void Mat::set_block(std::size_t r0, std::size_t c0, const Mat& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) raise(ErrorKind::kDimension, "set_block: out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Mat& Mat::operator+=(const Mat& o) {
  require_same_shape(*this, o, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  require_same_shape(*this, o, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator-(Mat a) { return a *= -1.0; }
Mat operator*(Mat a, double s) { return a *= s; }
Mat operator*(double s, Mat a) { return a *= s; }
Mat operator*(const Mat& a, const Mat& b) { return matmul(a, b); }

Mat matmul(const Mat& x, const Mat& y) {
  if (x.cols() != y.rows()) raise(ErrorKind::kDimension, "matmul: " + shape(x) + " * " + shape(y));
  Mat r(x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const double a = x(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < y.cols(); ++j) r(i, j) += a * y(k, j);
    }
  }
  return r;
}

Mat transpose(const Mat& m) {
  Mat t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

double trace(const Mat& m) {
  if (!m.is_square()) raise(ErrorKind::kDimension, "trace: non-square " + shape(m));
  double t = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

double frobenius_norm(const Mat& m) {
  double scale = max_abs(m);
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : m.data()) s += (v / scale) * (v / scale);
  return scale * std::sqrt(s);
}

double frobenius_inner(const Mat& x, const Mat& y) {
  require_same_shape(x, y, "frobenius_inner");
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

double max_abs(const Mat& m) {
  double r = 0.0;
  for (double v : m.data()) r = std::max(r, std::abs(v));
  return r;
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + transpose(m)); }

bool is_symmetric(const Mat& m, double tol) {
  if (!m.is_square()) return false;
  const double bound = tol * (1.0 + max_abs(m));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > bound) return false;
  return true;
}

bool all_finite(const Mat& m) {
  return std::all_of(m.data().begin(), m.data().end(), [](double v) { return std::isfinite(v); });
}

Mat block_diag(const Mat& a, const Mat& b) {
  Mat r(a.rows() + b.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), a.cols(), b);
  return r;
}

Mat block2x2(const Mat& a, const Mat& b, const Mat& c, const Mat& d) {
  if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols()) {
    raise(ErrorKind::kDimension, "block2x2: incompatible blocks");
  }
  Mat r(a.rows() + c.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  r.set_block(a.rows(), 0, c);
  r.set_block(a.rows(), a.cols(), d);
  return r;
}

Mat hstack(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) raise(ErrorKind::kDimension, "hstack: row mismatch");
  Mat r(a.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  return r;
}

Mat vstack(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) raise(ErrorKind::kDimension, "vstack: column mismatch");
  Mat r(a.rows() + b.rows(), a.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), 0, b);
  return r;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return r;
}

Mat vec(const Mat& m) {
  Mat v(m.size(), 1);
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) v(j * m.rows() + i, 0) = m(i, j);
  return v;
}

Mat unvec(const Mat& v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols) raise(ErrorKind::kDimension, "unvec: size mismatch");
  Mat m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = v[j * rows + i];
  return m;
}

// ---------------------------------------------------------------------------
// Linear solves

namespace {

template <typename M>
M eliminate(M g, M b, double norm_g) {
  using std::abs;
  const std::size_t n = g.rows();
  const std::size_t nrhs = b.cols();
  const double floor = tol::kPivotFloor * norm_g;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = abs(g(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (abs(g(r, col)) > best) {
        best = abs(g(r, col));
        piv = r;
      }
    }
    if (!(best > floor)) raise(ErrorKind::kSingular, "solve_linear: pivot below floor");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(g(col, j), g(piv, j));
      for (std::size_t j = 0; j < nrhs; ++j) std::swap(b(col, j), b(piv, j));
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const auto f = g(r, col) / g(col, col);
      if (f == decltype(f){}) continue;
      for (std::size_t j = col; j < n; ++j) g(r, j) -= f * g(col, j);
      for (std::size_t j = 0; j < nrhs; ++j) b(r, j) -= f * b(col, j);
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = 0; j < nrhs; ++j) {
      auto s = b(i, j);
      for (std::size_t k = i + 1; k < n; ++k) s -= g(i, k) * b(k, j);
      b(i, j) = s / g(i, i);
    }
  }
  return b;
}

}  // namespace

Mat solve_linear(const Mat& g, const Mat& b) {
  if (!g.is_square()) raise(ErrorKind::kDimension, "solve_linear: non-square " + shape(g));
  if (b.rows() != g.rows()) raise(ErrorKind::kDimension, "solve_linear: rhs " + shape(b) + " for " + shape(g));
  return eliminate(g, b, frobenius_norm(g));
}

Mat inverse(const Mat& g) { return solve_linear(g, Mat::identity(g.rows())); }

namespace {

// One-sided Jacobi; returns singular values in descending order.
std::vector<double> singular_values(const Mat& m) {
  Mat u = m.rows() >= m.cols() ? m : transpose(m);
  const std::size_t rows = u.rows();
  const std::size_t cols = u.cols();
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += u(i, p) * u(i, p);
          beta += u(i, q) * u(i, q);
          gamma += u(i, p) * u(i, q);
        }
        if (gamma == 0.0) continue;
        const double denom = std::sqrt(alpha * beta);
        if (denom == 0.0) continue;
        off = std::max(off, std::abs(gamma) / denom);
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const double up = u(i, p);
          const double uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
      }
    }
    if (off < 1e-15) break;
  }
  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += u(i, j) * u(i, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

}  // namespace

std::size_t numerical_rank(const Mat& m, double rel_tol) {
  if (m.empty()) return 0;
  const auto sv = singular_values(m);
  if (sv.empty() || sv.front() == 0.0) return 0;
  const double cut = rel_tol * sv.front();
  return static_cast<std::size_t>(std::count_if(sv.begin(), sv.end(), [cut](double s) { return s > cut; }));
}

// ---------------------------------------------------------------------------
// Spectral quantities

namespace {

// Double-double arithmetic for the squaring loop. In plain double precision a
// defective dominant eigenvalue splits by ~sqrt(eps) after ~25 squarings and
// the estimate settles about 1e-7 high; the extra word pushes that past k = 40.
struct Dd {
  double hi = 0.0;
  double lo = 0.0;
};

Dd quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

Dd dd_add(Dd a, Dd b) {
  const double s = a.hi + b.hi;
  const double bb = s - a.hi;
  const double e = (a.hi - (s - bb)) + (b.hi - bb) + a.lo + b.lo;
  return quick_two_sum(s, e);
}

Dd dd_mul(Dd a, Dd b) {
  const double p = a.hi * b.hi;
  const double e = std::fma(a.hi, b.hi, -p) + (a.hi * b.lo + a.lo * b.hi);
  return quick_two_sum(p, e);
}

}  // namespace

double spectral_radius(const Mat& m) {
  if (!m.is_square()) raise(ErrorKind::kDimension, "spectral_radius: non-square " + shape(m));
  if (m.empty()) return 0.0;
  const std::size_t n = m.rows();
  // X_k = M^(2^k) / ||M^(2^k)||_F with log_scale = log ||M^(2^k)||_F.
  double s = frobenius_norm(m);
  if (s == 0.0) return 0.0;
  std::vector<Dd> x(n * n), y(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) x[i * n + j] = {m(i, j) / s, 0.0};
  }
  double log_scale = std::log(s);
  double prev = log_scale;
  double power = 1.0;
  for (int k = 1; k <= 40; ++k) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        Dd acc;
        for (std::size_t l = 0; l < n; ++l) acc = dd_add(acc, dd_mul(x[i * n + l], x[l * n + j]));
        y[i * n + j] = acc;
        sq += acc.hi * acc.hi;
      }
    }
    s = std::sqrt(sq);
    if (s == 0.0 || !std::isfinite(s)) return 0.0;
    const Dd inv{1.0 / s, 0.0};
    for (std::size_t i = 0; i < n * n; ++i) x[i] = dd_mul(y[i], inv);
    log_scale = 2.0 * log_scale + std::log(s);
    power *= 2.0;
    const double est = log_scale / power;
    if (std::abs(est - prev) < 1e-10) return std::exp(est);
    prev = est;
  }
  return std::exp(prev);
}

namespace {

// Power iteration accelerated by squaring: the columns of (S + sigma I)^(2^k)
// align with the dominant eigenspace; the largest column gives the Rayleigh
// quotient. Starting from the identity guarantees a column with a component
// along the top eigenvector.
template <typename M, typename Rayleigh>
double shifted_power_max(const M& s, double sigma, Rayleigh rayleigh) {
  const std::size_t n = s.rows();
  M x = s;
  for (std::size_t i = 0; i < n; ++i) x(i, i) += sigma;
  double nrm = frobenius_norm(x);
  if (nrm == 0.0) return -sigma;  // S = -sigma I
  x = (1.0 / nrm) * x;
  double prev = std::numeric_limits<double>::quiet_NaN();
  double lambda = 0.0;
  for (int k = 0; k < 64; ++k) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) c += std::norm(x(i, j));
      if (c > best_norm) {
        best_norm = c;
        best = j;
      }
    }
    lambda = rayleigh(x, best);
    if (k >= 2 && std::abs(lambda - prev) <= 1e-13 * sigma) break;
    prev = lambda;
    x = matmul(x, x);
    nrm = frobenius_norm(x);
    if (nrm == 0.0) break;
    x = (1.0 / nrm) * x;
  }
  return lambda;
}

}  // namespace

double sym_lambda_max(const Mat& s) {
  if (!s.is_square()) raise(ErrorKind::kDimension, "sym_lambda_max: non-square " + shape(s));
  if (!is_symmetric(s)) raise(ErrorKind::kContract, "sym_lambda_max: matrix is not symmetric");
  if (s.empty()) raise(ErrorKind::kDimension, "sym_lambda_max: empty matrix");
  const double sigma = frobenius_norm(s);
  if (sigma == 0.0) return 0.0;
  const std::size_t n = s.rows();
  return shifted_power_max(s, sigma, [&](const Mat& x, std::size_t j) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sv = 0.0;
      for (std::size_t k = 0; k < n; ++k) sv += s(i, k) * x(k, j);
      num += x(i, j) * sv;
      den += x(i, j) * x(i, j);
    }
    return num / den;
  });
}

double sym_lambda_min(const Mat& s) { return -sym_lambda_max(-s); }

double spectral_norm(const Mat& m) {
  if (m.empty()) return 0.0;
  const Mat g = m.rows() >= m.cols() ? matmul(transpose(m), m) : matmul(m, transpose(m));
  return std::sqrt(std::max(0.0, sym_lambda_max(symmetrize(g))));
}

// ---------------------------------------------------------------------------
// Complex

CMat::CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

CMat::CMat(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) raise(ErrorKind::kDimension, "CMat: entry count mismatch");
  for (const auto& v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) raise(ErrorKind::kContract, "CMat: non-finite entry");
  }
}

CMat::CMat(const Mat& real) : rows_(real.rows()), cols_(real.cols()), data_(real.size()) {
  for (std::size_t k = 0; k < real.size(); ++k) data_[k] = real[k];
}

CMat CMat::identity(std::size_t n) {
  CMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat matmul(const CMat& x, const CMat& y) {
  if (x.cols() != y.rows()) raise(ErrorKind::kDimension, "matmul: complex shape mismatch");
  CMat r(x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const cplx a = x(i, k);
      for (std::size_t j = 0; j < y.cols(); ++j) r(i, j) += a * y(k, j);
    }
  return r;
}

CMat adjoint(const CMat& m) {
  CMat t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = std::conj(m(i, j));
  return t;
}

CMat operator-(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) raise(ErrorKind::kDimension, "CMat operator-: shape mismatch");
  CMat r = a;
  for (std::size_t k = 0; k < r.data().size(); ++k) r.data()[k] -= b.data()[k];
  return r;
}

CMat operator*(cplx s, const CMat& a) {
  CMat r = a;
  for (auto& v : r.data()) v *= s;
  return r;
}

double frobenius_norm(const CMat& m) {
  double s = 0.0;
  for (const auto& v : m.data()) s += std::norm(v);
  return std::sqrt(s);
}

CMat solve_linear(const CMat& g, const CMat& b) {
  if (g.rows() != g.cols() || b.rows() != g.rows()) raise(ErrorKind::kDimension, "solve_linear: complex shape mismatch");
  return eliminate(g, b, frobenius_norm(g));
}

bool is_hermitian(const CMat& h, double tol) {
  if (h.rows() != h.cols()) return false;
  double scale = 0.0;
  for (const auto& v : h.data()) scale = std::max(scale, std::abs(v));
  const double bound = tol * (1.0 + scale);
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = i; j < h.cols(); ++j)
      if (std::abs(h(i, j) - std::conj(h(j, i))) > bound) return false;
  return true;
}

double hermitian_lambda_max(const CMat& h) {
  if (h.rows() != h.cols() || h.rows() == 0) raise(ErrorKind::kDimension, "hermitian_lambda_max: not square");
  if (!is_hermitian(h)) raise(ErrorKind::kContract, "hermitian_lambda_max: matrix is not Hermitian");
  const double sigma = frobenius_norm(h);
  if (sigma == 0.0) return 0.0;
  const std::size_t n = h.rows();
  return shifted_power_max(h, sigma, [&](const CMat& x, std::size_t j) {
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx hv = 0.0;
      for (std::size_t k = 0; k < n; ++k) hv += h(i, k) * x(k, j);
      num += std::conj(x(i, j)) * hv;
      den += std::norm(x(i, j));
    }
    return num.real() / den;
  });
}

}  // namespace polgeo
