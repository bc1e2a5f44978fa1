#include "polgeo/lyapunov.hpp"

#include <cmath>
#include <string>

namespace polgeo {

namespace {

double residual_of(const Mat& a, const Mat& q, const Mat& p) {
  return frobenius_norm(p - a * p * transpose(a) - q);
}

}  // namespace

LyapSolution dlyap(const Mat& a, const Mat& q) {
  if (!a.is_square()) raise(ErrorKind::kDimension, "dlyap: A is not square");
  if (q.rows() != a.rows() || q.cols() != a.cols()) raise(ErrorKind::kDimension, "dlyap: Q does not match A");
  const double rho = spectral_radius(a);
  if (!(rho < 1.0)) {
    raise(ErrorKind::kNotSchurStable, "dlyap: spectral radius " + std::to_string(rho) + " >= 1");
  }

  LyapSolution sol;
  const double q_norm = frobenius_norm(q);
  if (q_norm == 0.0) {
    sol.P = Mat(q.rows(), q.cols());
    return sol;
  }

  // P_{k+1} = P_k + M_k P_k M_k^T, M_{k+1} = M_k^2. After k steps P_k holds
  // the first 2^k terms of sum_j A^j Q A^jT; the tail is about ||M_k||^2 ||P||.
  Mat p = q;
  Mat m = a;
  int k = 0;
  for (; k < 64; ++k) {
    const double m_norm = frobenius_norm(m);
    if (m_norm * m_norm <= 1e-13) break;
    p += m * p * transpose(m);
    m = m * m;
    const double p_norm = frobenius_norm(p);
    if (!std::isfinite(p_norm) || p_norm > 1e8 * q_norm * (1.0 + 1.0 / ((1.0 - rho) * (1.0 + rho)))) {
      raise(ErrorKind::kNotSchurStable, "dlyap: doubling iterates diverge");
    }
  }
  sol.P = p;
  sol.iterations = k;
  sol.residual = residual_of(a, q, p);
  return sol;
}

Mat lyap(const Mat& a, const Mat& q) { return dlyap(a, q).P; }

Mat dlyap_kron_oracle(const Mat& a, const Mat& q) {
  if (!a.is_square() || q.rows() != a.rows() || q.cols() != a.cols()) {
    raise(ErrorKind::kDimension, "dlyap_kron_oracle: shape mismatch");
  }
  const std::size_t n = a.rows();
  if (n > 12) raise(ErrorKind::kContract, "dlyap_kron_oracle: n > 12 refused");
  if (!(spectral_radius(a) < 1.0)) raise(ErrorKind::kNotSchurStable, "dlyap_kron_oracle: A not Schur stable");
  const Mat lhs = Mat::identity(n * n) - kron(a, a);
  return unvec(solve_linear(lhs, vec(q)), n, n);
}

Mat dlyap_diff(const Mat& a, const Mat& q, const Mat& e, const Mat& f) {
  const Mat p = lyap(a, q);
  const Mat rhs = e * p * transpose(a) + a * p * transpose(e) + f;
  return lyap(a, rhs);
}

double lyap_trace_check(const Mat& a, const Mat& q, const Mat& sigma) {
  const double lhs = trace(lyap(transpose(a), q) * sigma);
  const double rhs = trace(lyap(a, sigma) * q);
  return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

}  // namespace polgeo
