#pragma once

#include "polgeo/descent.hpp"
#include "polgeo/policy.hpp"

namespace polgeo {

/// Cost and Lyapunov data at a stabilizing static gain.
///
///   J = 1/2 tr(P_K Sigma) = 1/2 tr((Q + K^T R K) Y_K)
///   P_K = L(A_cl^T, Q + K^T R K),  Y_K = L(A_cl, Sigma),  A_cl = A + BK
///
/// Both expressions are computed; `J_dual` holds the Y_K form.
struct LqrEval {
  double J = 0.0;
  double J_dual = 0.0;
  Mat P;
  Mat Y;
  Mat A_cl;
};

/// Throws kInfeasible for an uncertified gain.
LqrEval lqr_eval(const Plant& plant, const StaticGain& k);

/// Riemannian gradient under the Lyapunov metric: RK + B^T P_K A_cl.
Mat lqr_grad_riemannian(const Plant& plant, const StaticGain& k);
Mat lqr_grad_riemannian(const Plant& plant, const StaticGain& k, const LqrEval& ev);

/// Euclidean gradient (RK + B^T P_K A_cl) Y_K.
Mat lqr_grad_euclidean(const Plant& plant, const StaticGain& k);
Mat lqr_grad_euclidean(const Plant& plant, const StaticGain& k, const LqrEval& ev);

/// S_K(V) = L(A_cl^T, V^T grad + grad^T V), the derivative of P_K along V.
Mat s_map(const Plant& plant, const StaticGain& k, const Mat& v);

/// Directional derivative of the Riemannian gradient along V:
/// (R + B^T P_K B) V + B^T S_K(V) A_cl.
Mat lqr_hvp_pseudo(const Plant& plant, const StaticGain& k, const Mat& v);

/// Euclidean Hessian-vector product, the derivative of grad * Y_K along V:
/// hvp_pseudo(V) Y_K + grad * dL_(A_cl, Sigma)[BV, 0].
Mat lqr_hvp_euclidean(const Plant& plant, const StaticGain& k, const Mat& v);

struct DareSolution {
  Mat P;
  StaticGain K;
  int iterations = 0;
};

/// Riccati value iteration from P = Q; throws kStabilizabilitySuspect when it
/// does not converge in 1e5 sweeps or the resulting gain is not stabilizing.
DareSolution dare_solve(const Plant& plant);

/// K+ = -(R + B^T P_K B)^{-1} B^T P_K A. Throws kInternalInvariant if K+ is not stabilizing.
StaticGain hewer_step(const Plant& plant, const StaticGain& k);

enum class LqrDirection {
  kEuclidean,     // -grad J Y_K
  kRiemannian,    // -(RK + B^T P_K A_cl)
  kPseudoNewton,  // solves hvp_pseudo(V) = -grad
  kQuasiNewton,   // solves (R + B^T P_K B) V = -grad (Hewer's update at unit step)
};

struct LqrRun {
  Trace trace;
  StaticGain K;
};

/// Descent on J_LQR from a certified K0. Each trial step is halved until the
/// candidate is stabilizing and J does not increase; kMaxBacktracks failures
/// raise StalledError. Stops when the gradient norm (Euclidean gradient for
/// kEuclidean, Riemannian otherwise) is <= stop.tol or after stop.max_iter steps.
LqrRun gd_run(const Plant& plant, const StaticGain& k0, LqrDirection direction, const StepRule& step,
              const StopRule& stop);

/// Default fixed step 1e-3 / ||R||_2.
double default_fixed_step(const Plant& plant);

}  // namespace polgeo
