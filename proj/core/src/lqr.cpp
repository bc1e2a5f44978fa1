#include "polgeo/lqr.hpp"

#include <cmath>
#include <string>

#include "polgeo/lyapunov.hpp"
#include "detail/static_descent.hpp"

namespace polgeo {

namespace {

void require_certified(const StaticGain& k, const char* where) {
  if (!k.certified()) raise(ErrorKind::kInfeasible, std::string(where) + ": gain is not certified stabilizing");
}

Mat riemannian_from(const Plant& plant, const Mat& k, const LqrEval& ev) {
  return plant.R * k + transpose(plant.B) * ev.P * ev.A_cl;
}

Mat s_map_from(const Mat& acl, const Mat& grad, const Mat& v) {
  const Mat vg = transpose(v) * grad;
  return lyap(transpose(acl), vg + transpose(vg));
}

Mat hvp_pseudo_from(const Plant& plant, const LqrEval& ev, const Mat& grad, const Mat& v) {
  const Mat bt = transpose(plant.B);
  return (plant.R + bt * ev.P * plant.B) * v + bt * s_map_from(ev.A_cl, grad, v) * ev.A_cl;
}

}  // namespace

LqrEval lqr_eval(const Plant& plant, const StaticGain& k) {
  require_certified(k, "lqr_eval");
  LqrEval ev;
  ev.A_cl = closed_loop_static(plant, k.K());
  const Mat weight = plant.Q + transpose(k.K()) * plant.R * k.K();
  ev.P = symmetrize(lyap(transpose(ev.A_cl), weight));
  ev.Y = symmetrize(lyap(ev.A_cl, plant.Sigma));
  ev.J = 0.5 * trace(ev.P * plant.Sigma);
  ev.J_dual = 0.5 * trace(weight * ev.Y);
  return ev;
}

Mat lqr_grad_riemannian(const Plant& plant, const StaticGain& k) {
  return lqr_grad_riemannian(plant, k, lqr_eval(plant, k));
}

Mat lqr_grad_riemannian(const Plant& plant, const StaticGain& k, const LqrEval& ev) {
  require_certified(k, "lqr_grad_riemannian");
  return riemannian_from(plant, k.K(), ev);
}

Mat lqr_grad_euclidean(const Plant& plant, const StaticGain& k) {
  return lqr_grad_euclidean(plant, k, lqr_eval(plant, k));
}

Mat lqr_grad_euclidean(const Plant& plant, const StaticGain& k, const LqrEval& ev) {
  require_certified(k, "lqr_grad_euclidean");
  return riemannian_from(plant, k.K(), ev) * ev.Y;
}

Mat s_map(const Plant& plant, const StaticGain& k, const Mat& v) {
  const LqrEval ev = lqr_eval(plant, k);
  return s_map_from(ev.A_cl, riemannian_from(plant, k.K(), ev), v);
}

Mat lqr_hvp_pseudo(const Plant& plant, const StaticGain& k, const Mat& v) {
  const LqrEval ev = lqr_eval(plant, k);
  return hvp_pseudo_from(plant, ev, riemannian_from(plant, k.K(), ev), v);
}

Mat lqr_hvp_euclidean(const Plant& plant, const StaticGain& k, const Mat& v) {
  const LqrEval ev = lqr_eval(plant, k);
  const Mat grad = riemannian_from(plant, k.K(), ev);
  const Mat dy = dlyap_diff(ev.A_cl, plant.Sigma, plant.B * v, Mat(plant.n(), plant.n()));
  return hvp_pseudo_from(plant, ev, grad, v) * ev.Y + grad * dy;
}

DareSolution dare_solve(const Plant& plant) {
  const Mat& a = plant.A;
  const Mat& b = plant.B;
  const Mat at = transpose(a);
  const Mat bt = transpose(b);
  Mat p = plant.Q;
  int it = 0;
  bool converged = false;
  for (; it < 100000; ++it) {
    const Mat btpa = bt * p * a;
    const Mat gain = solve_linear(plant.R + bt * p * b, btpa);
    Mat next = symmetrize(plant.Q + at * p * a - transpose(btpa) * gain);
    if (!all_finite(next)) break;
    const double delta = frobenius_norm(next - p);
    p = std::move(next);
    if (delta <= 1e-12 * (1.0 + frobenius_norm(p))) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) raise(ErrorKind::kStabilizabilitySuspect, "dare_solve: Riccati iteration did not converge");
  Mat kstar = -solve_linear(plant.R + bt * p * b, bt * p * a);
  if (!is_stabilizing_static(plant, kstar)) {
    raise(ErrorKind::kStabilizabilitySuspect, "dare_solve: Riccati gain is not stabilizing");
  }
  return DareSolution{p, StaticGain::certify(plant, std::move(kstar)), it};
}

StaticGain hewer_step(const Plant& plant, const StaticGain& k) {
  const LqrEval ev = lqr_eval(plant, k);
  const Mat bt = transpose(plant.B);
  Mat next = -solve_linear(plant.R + bt * ev.P * plant.B, bt * ev.P * plant.A);
  if (!is_stabilizing_static(plant, next)) {
    raise(ErrorKind::kInternalInvariant, "hewer_step: unit-step update is not stabilizing");
  }
  return StaticGain::certify(plant, std::move(next));
}

double default_fixed_step(const Plant& plant) { return 1e-3 / spectral_norm(plant.R); }

namespace {

Mat pseudo_newton_direction(const Plant& plant, const LqrEval& ev, const Mat& grad) {
  const std::size_t m = plant.m();
  const std::size_t n = plant.n();
  Mat h(m * n, m * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const Mat col = vec(hvp_pseudo_from(plant, ev, grad, Mat::unit(m, n, i, j)));
      for (std::size_t r = 0; r < m * n; ++r) h(r, j * m + i) = col[r];
    }
  }
  return unvec(solve_linear(h, -vec(grad)), m, n);
}

}  // namespace

namespace detail {

LqrRun descend_static(const Plant& plant, const StaticGain& k0, const StaticDirectionFn& direction,
                      const StepRule& step, const StopRule& stop, const char* name) {
  require_certified(k0, name);
  StaticGain k = k0;
  LqrEval ev = lqr_eval(plant, k);
  Trace trace;
  double taken = 0.0;
  for (int iter = 0;; ++iter) {
    auto [gnorm, v] = direction(k, ev);
    trace.push_back(IterTrace{iter, ev.J, gnorm, taken, spectral_radius(ev.A_cl)});
    if (gnorm <= stop.tol || iter >= stop.max_iter) break;

    double eta = 0.0;
    if (const auto* fixed = std::get_if<FixedStep>(&step)) {
      eta = fixed->eta > 0.0 ? fixed->eta : default_fixed_step(plant);
    } else {
      eta = std::min(std::get<CertificateStep>(step).cap, stability_certificate(plant, k, v));
    }

    bool accepted = false;
    for (int attempt = 0; attempt <= kMaxBacktracks; ++attempt, eta *= 0.5) {
      Mat cand = k.K() + eta * v;
      if (!is_stabilizing_static(plant, cand)) continue;
      StaticGain next = StaticGain::certify(plant, std::move(cand));
      LqrEval next_ev = lqr_eval(plant, next);
      if (next_ev.J <= ev.J) {
        k = std::move(next);
        ev = std::move(next_ev);
        taken = eta;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw StalledError(std::string(name) + ": no acceptable step after " + std::to_string(kMaxBacktracks) +
                             " halvings",
                         trace);
    }
  }
  return LqrRun{std::move(trace), std::move(k)};
}

}  // namespace detail

LqrRun gd_run(const Plant& plant, const StaticGain& k0, LqrDirection direction, const StepRule& step,
              const StopRule& stop) {
  auto dir = [&](const StaticGain& k, const LqrEval& ev) -> std::pair<double, Mat> {
    const Mat grad = riemannian_from(plant, k.K(), ev);
    switch (direction) {
      case LqrDirection::kEuclidean: {
        Mat egrad = grad * ev.Y;
        const double nrm = frobenius_norm(egrad);
        return {nrm, -egrad};
      }
      case LqrDirection::kRiemannian: return {frobenius_norm(grad), -grad};
      case LqrDirection::kPseudoNewton: return {frobenius_norm(grad), pseudo_newton_direction(plant, ev, grad)};
      case LqrDirection::kQuasiNewton: {
        const Mat bt = transpose(plant.B);
        return {frobenius_norm(grad), -solve_linear(plant.R + bt * ev.P * plant.B, grad)};
      }
    }
    raise(ErrorKind::kContract, "gd_run: unknown direction");
  };
  return detail::descend_static(plant, k0, dir, step, stop, "gd_run");
}

}  // namespace polgeo
