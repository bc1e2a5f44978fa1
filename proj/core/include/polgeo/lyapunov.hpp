#pragma once

#include "polgeo/numerics.hpp"

namespace polgeo {

/// Solution P of P = A P A^T + Q.
struct LyapSolution {
  Mat P;
  int iterations = 0;
  double residual = 0.0;  // ||P - A P A^T - Q||_F
};

/// Discrete Lyapunov map L(A, Q) by Smith doubling. Throws kNotSchurStable when
/// rho(A) >= 1 or the doubling iterates blow up.
LyapSolution dlyap(const Mat& a, const Mat& q);

/// Shorthand for dlyap(a, q).P.
Mat lyap(const Mat& a, const Mat& q);

/// vec(P) = (I - A kron A)^{-1} vec(Q). O(n^6); refuses n > 12.
Mat dlyap_kron_oracle(const Mat& a, const Mat& q);

/// Differential of L at (A, Q) along (E, F):
/// L(A, E P A^T + A P E^T + F) with P = L(A, Q).
Mat dlyap_diff(const Mat& a, const Mat& q, const Mat& e, const Mat& f);

/// Relative residual of tr(L(A^T, Q) S) = tr(L(A, S) Q).
double lyap_trace_check(const Mat& a, const Mat& q, const Mat& sigma);

}  // namespace polgeo
