#pragma once

#include <variant>

#include "polgeo/descent.hpp"
#include "polgeo/policy.hpp"

namespace polgeo {

/// Augmented closed loop of a plant and a dynamic controller:
///   Acl = [[A, B C_K], [B_K C, A_K]],  Bcl = diag(I, B_K),  Ccl = diag(C, C_K).
struct ClosedLoop {
  Mat Acl;
  Mat Bcl;
  Mat Ccl;
};

ClosedLoop closed_loop(const Plant& plant, const DynamicPolicy& kd);

/// X = L(Acl, diag(W, B_K V B_K^T)),  Y = L(Acl^T, diag(Q, C_K^T R C_K)),
/// J = tr(diag(Q, C_K^T R C_K) X); `J_dual` is the Y-side expression.
struct LqgEval {
  double J = 0.0;
  double J_dual = 0.0;
  Mat X;
  Mat Y;
};

/// Throws kInfeasible when Kd is not stabilizing.
LqgEval lqg_eval(const Plant& plant, const DynamicPolicy& kd);

/// A tangent vector (or gradient) at a dynamic policy, one block per parameter.
struct PolicyTangent {
  Mat dA_K;
  Mat dB_K;
  Mat dC_K;
};

double frobenius_norm(const PolicyTangent& v);
double frobenius_inner(const PolicyTangent& x, const PolicyTangent& y);
/// kd + alpha * v
DynamicPolicy step(const DynamicPolicy& kd, const PolicyTangent& v, double alpha);

/// Euclidean gradient of J_LQG in (A_K, B_K, C_K).
PolicyTangent lqg_grad(const Plant& plant, const DynamicPolicy& kd);

/// (T A_K T^-1, T B_K, C_K T^-1). Throws kContract for a singular T.
DynamicPolicy similarity_transform(const DynamicPolicy& kd, const Mat& t);
/// The induced action on tangent vectors, same formula.
PolicyTangent similarity_transform(const PolicyTangent& v, const Mat& t);

/// Controllability of (A_K, B_K) and observability of (A_K, C_K), ranks taken
/// with singular values above 1e-8 sigma_max.
bool is_minimal(const DynamicPolicy& kd);

/// (Lambda, 0, 0). Throws kContract unless both Lambda and the plant's A are Schur stable.
DynamicPolicy saddle_policy(const Plant& plant, const Mat& lambda);

/// Wc = L(Acl, Bcl Bcl^T), Wo = L(Acl^T, Ccl^T Ccl). Throws kGramianSingular
/// when either is not positive definite.
struct Gramians {
  Mat Wc;
  Mat Wo;
};

Gramians gramians(const Plant& plant, const DynamicPolicy& kd);

/// Krishnaprasad-Martin inner product with embeddings
///   E(V) = [[0, B G], [F C, E]],  F(V) = diag(0, F),  G(V) = diag(0, G):
///   w1 tr(Wo E1 Wc E2^T) + w2 tr(F1^T Wo F2) + w3 tr(G1 Wc G2^T).
double km_inner(const Plant& plant, const DynamicPolicy& kd, const PolicyTangent& v1, const PolicyTangent& v2,
                const KmMetric& weights);

/// Riemannian gradient under the KM metric. Throws kMinimalityLost when the
/// Gram system over the canonical tangent basis is singular.
PolicyTangent km_grad(const Plant& plant, const DynamicPolicy& kd, const KmMetric& weights);

struct EuclideanMode {};
using LqgMode = std::variant<EuclideanMode, KmMetric>;

struct LqgRun {
  Trace trace;
  std::vector<DynamicPolicy> iterates;  // iterates[i] matches trace[i]
  DynamicPolicy K;
  bool minimal = false;
};

/// Gradient descent on J_LQG for full-order controllers (q = n). Each trial
/// step (FixedStep eta, or the cap of a CertificateStep) is halved until the
/// candidate is stabilizing and J does not increase. grad_norm is the Frobenius
/// norm in Euclidean mode and the KM norm in KM mode.
LqgRun lqg_gd_run(const Plant& plant, const DynamicPolicy& kd0, const LqgMode& mode, const StepRule& step,
                  const StopRule& stop);

/// Default LQG trial step: 1e-2.
inline constexpr double kLqgDefaultStep = 1e-2;

}  // namespace polgeo
