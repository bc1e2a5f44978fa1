#include "polgeo/lqg.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "polgeo/lyapunov.hpp"

namespace polgeo {

namespace {

void check_policy(const Plant& plant, const DynamicPolicy& kd) {
  const std::size_t q = kd.order();
  if (!kd.A_K.is_square() || kd.B_K.rows() != q || kd.B_K.cols() != plant.p() || kd.C_K.rows() != plant.m() ||
      kd.C_K.cols() != q) {
    raise(ErrorKind::kDimension, "dynamic policy shapes do not match the plant");
  }
}

// Lower Cholesky factor; pivots below rel * max diagonal fail.
std::optional<Mat> cholesky_lower(const Mat& s, double rel) {
  const std::size_t n = s.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, s(i, i));
  if (!(scale > 0.0)) return std::nullopt;
  Mat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > rel * scale)) return std::nullopt;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

bool positive_definite(const Mat& s, double rel) { return cholesky_lower(s, rel).has_value(); }

struct Embedding {
  Mat E;
  Mat F;
  Mat G;
};

Embedding embed(const Plant& plant, const PolicyTangent& v) {
  const std::size_t n = plant.n();
  const std::size_t m = plant.m();
  const std::size_t p = plant.p();
  const std::size_t q = v.dA_K.rows();
  Embedding out{Mat(n + q, n + q), Mat(n + q, n + p), Mat(p + m, n + q)};
  out.E.set_block(0, n, plant.B * v.dC_K);
  out.E.set_block(n, 0, v.dB_K * plant.C);
  out.E.set_block(n, n, v.dA_K);
  out.F.set_block(n, n, v.dB_K);
  out.G.set_block(p, n, v.dC_K);
  return out;
}

double km_pair(const Gramians& g, const Embedding& a, const Embedding& b, const KmMetric& w) {
  double s = w.w1 * frobenius_inner(g.Wo * a.E * g.Wc, b.E);
  if (w.w2 != 0.0) s += w.w2 * frobenius_inner(a.F, g.Wo * b.F);
  if (w.w3 != 0.0) s += w.w3 * frobenius_inner(a.G * g.Wc, b.G);
  return s;
}

std::vector<PolicyTangent> canonical_basis(std::size_t q, std::size_t p, std::size_t m) {
  std::vector<PolicyTangent> basis;
  const PolicyTangent zero{Mat(q, q), Mat(q, p), Mat(m, q)};
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      PolicyTangent e = zero;
      e.dA_K(i, j) = 1.0;
      basis.push_back(std::move(e));
    }
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      PolicyTangent e = zero;
      e.dB_K(i, j) = 1.0;
      basis.push_back(std::move(e));
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      PolicyTangent e = zero;
      e.dC_K(i, j) = 1.0;
      basis.push_back(std::move(e));
    }
  return basis;
}

}  // namespace

ClosedLoop closed_loop(const Plant& plant, const DynamicPolicy& kd) {
  check_policy(plant, kd);
  return ClosedLoop{closed_loop_dynamic(plant, kd), block_diag(Mat::identity(plant.n()), kd.B_K),
                    block_diag(plant.C, kd.C_K)};
}

LqgEval lqg_eval(const Plant& plant, const DynamicPolicy& kd) {
  check_policy(plant, kd);
  if (!is_stabilizing_dynamic(plant, kd)) raise(ErrorKind::kInfeasible, "lqg_eval: policy is not stabilizing");
  const Mat acl = closed_loop_dynamic(plant, kd);
  const Mat noise = block_diag(plant.W, kd.B_K * plant.V * transpose(kd.B_K));
  const Mat weight = block_diag(plant.Q, transpose(kd.C_K) * plant.R * kd.C_K);
  LqgEval ev;
  ev.X = symmetrize(lyap(acl, noise));
  ev.Y = symmetrize(lyap(transpose(acl), weight));
  ev.J = trace(weight * ev.X);
  ev.J_dual = trace(noise * ev.Y);
  return ev;
}

double frobenius_norm(const PolicyTangent& v) {
  return std::sqrt(frobenius_inner(v, v));
}

double frobenius_inner(const PolicyTangent& x, const PolicyTangent& y) {
  return frobenius_inner(x.dA_K, y.dA_K) + frobenius_inner(x.dB_K, y.dB_K) + frobenius_inner(x.dC_K, y.dC_K);
}

DynamicPolicy step(const DynamicPolicy& kd, const PolicyTangent& v, double alpha) {
  return DynamicPolicy{kd.A_K + alpha * v.dA_K, kd.B_K + alpha * v.dB_K, kd.C_K + alpha * v.dC_K};
}

PolicyTangent lqg_grad(const Plant& plant, const DynamicPolicy& kd) {
  const LqgEval ev = lqg_eval(plant, kd);
  const std::size_t n = plant.n();
  const std::size_t q = kd.order();
  const Mat acl = closed_loop_dynamic(plant, kd);
  // dJ/dAcl = 2 Y Acl X, pulled back through the block structure of Acl,
  // plus the direct dependence of the weights on B_K and C_K.
  const Mat m = 2.0 * ev.Y * acl * ev.X;
  const Mat y22 = ev.Y.block(n, n, q, q);
  const Mat x22 = ev.X.block(n, n, q, q);
  PolicyTangent g;
  g.dA_K = m.block(n, n, q, q);
  g.dB_K = m.block(n, 0, q, n) * transpose(plant.C) + 2.0 * y22 * kd.B_K * plant.V;
  g.dC_K = transpose(plant.B) * m.block(0, n, n, q) + 2.0 * plant.R * kd.C_K * x22;
  return g;
}

DynamicPolicy similarity_transform(const DynamicPolicy& kd, const Mat& t) {
  if (!t.is_square() || t.rows() != kd.order()) raise(ErrorKind::kDimension, "similarity_transform: T shape");
  Mat tinv;
  try {
    tinv = inverse(t);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kSingular) throw;
    raise(ErrorKind::kContract, "similarity_transform: T is singular");
  }
  return DynamicPolicy{t * kd.A_K * tinv, t * kd.B_K, kd.C_K * tinv};
}

PolicyTangent similarity_transform(const PolicyTangent& v, const Mat& t) {
  const DynamicPolicy out = similarity_transform(DynamicPolicy{v.dA_K, v.dB_K, v.dC_K}, t);
  return PolicyTangent{out.A_K, out.B_K, out.C_K};
}

bool is_minimal(const DynamicPolicy& kd) {
  const std::size_t q = kd.order();
  if (q == 0) return true;
  Mat ctrb = kd.B_K;
  Mat obsv = kd.C_K;
  Mat blk_c = kd.B_K;
  Mat blk_o = kd.C_K;
  for (std::size_t k = 1; k < q; ++k) {
    blk_c = kd.A_K * blk_c;
    blk_o = blk_o * kd.A_K;
    ctrb = hstack(ctrb, blk_c);
    obsv = vstack(obsv, blk_o);
  }
  return numerical_rank(ctrb, 1e-8) == q && numerical_rank(obsv, 1e-8) == q;
}

DynamicPolicy saddle_policy(const Plant& plant, const Mat& lambda) {
  if (!lambda.is_square()) raise(ErrorKind::kDimension, "saddle_policy: Lambda must be square");
  if (!(spectral_radius(lambda) < 1.0 - tol::kStabilityMargin)) {
    raise(ErrorKind::kContract, "saddle_policy: Lambda is not Schur stable");
  }
  if (!(spectral_radius(plant.A) < 1.0 - tol::kStabilityMargin)) {
    raise(ErrorKind::kContract, "saddle_policy: plant is not open-loop stable");
  }
  const std::size_t q = lambda.rows();
  return DynamicPolicy{lambda, Mat(q, plant.p()), Mat(plant.m(), q)};
}

Gramians gramians(const Plant& plant, const DynamicPolicy& kd) {
  const ClosedLoop cl = closed_loop(plant, kd);
  if (!is_stabilizing_dynamic(plant, kd)) raise(ErrorKind::kInfeasible, "gramians: policy is not stabilizing");
  Gramians g{symmetrize(lyap(cl.Acl, cl.Bcl * transpose(cl.Bcl))),
             symmetrize(lyap(transpose(cl.Acl), transpose(cl.Ccl) * cl.Ccl))};
  if (!positive_definite(g.Wc, 1e-13)) raise(ErrorKind::kGramianSingular, "gramians: Wc is not positive definite");
  if (!positive_definite(g.Wo, 1e-13)) raise(ErrorKind::kGramianSingular, "gramians: Wo is not positive definite");
  return g;
}

double km_inner(const Plant& plant, const DynamicPolicy& kd, const PolicyTangent& v1, const PolicyTangent& v2,
                const KmMetric& weights) {
  validate_km_weights(weights);
  const Gramians g = gramians(plant, kd);
  return km_pair(g, embed(plant, v1), embed(plant, v2), weights);
}

namespace {

PolicyTangent km_grad_in_coordinates(const Plant& plant, const DynamicPolicy& kd, const KmMetric& weights) {
  const Gramians g = gramians(plant, kd);
  const PolicyTangent egrad = lqg_grad(plant, kd);
  const auto basis = canonical_basis(kd.order(), plant.p(), plant.m());
  const std::size_t d = basis.size();
  std::vector<Embedding> emb;
  emb.reserve(d);
  for (const auto& e : basis) emb.push_back(embed(plant, e));

  Mat gram(d, d);
  Mat rhs(d, 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      gram(i, j) = km_pair(g, emb[i], emb[j], weights);
      gram(j, i) = gram(i, j);
    }
    rhs(i, 0) = frobenius_inner(basis[i], egrad);
  }
  // Diagonal equilibration D G D y = D b, c = D y.
  std::vector<double> scale(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!(gram(i, i) > 0.0)) raise(ErrorKind::kMinimalityLost, "km_grad: Gram matrix has a null diagonal");
    scale[i] = 1.0 / std::sqrt(gram(i, i));
  }
  for (std::size_t i = 0; i < d; ++i) {
    rhs(i, 0) *= scale[i];
    for (std::size_t j = 0; j < d; ++j) gram(i, j) *= scale[i] * scale[j];
  }
  Mat c;
  try {
    c = solve_linear(gram, rhs);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kSingular) throw;
    raise(ErrorKind::kMinimalityLost, "km_grad: Gram system is singular");
  }
  PolicyTangent out{Mat(kd.order(), kd.order()), Mat(kd.order(), plant.p()), Mat(plant.m(), kd.order())};
  for (std::size_t i = 0; i < d; ++i) {
    const double ci = c[i] * scale[i];
    out.dA_K += ci * basis[i].dA_K;
    out.dB_K += ci * basis[i].dB_K;
    out.dC_K += ci * basis[i].dC_K;
  }
  return out;
}

}  // namespace

// The Gram system is solved in coordinates where the controller block of Wc is
// the identity, then mapped back by equivariance; solving directly in skewed
// coordinates squares cond(T) twice into the Gram matrix.
PolicyTangent km_grad(const Plant& plant, const DynamicPolicy& kd, const KmMetric& weights) {
  validate_km_weights(weights);
  const Gramians g = gramians(plant, kd);
  const std::size_t n = plant.n();
  const std::size_t q = kd.order();
  if (q == 0) return km_grad_in_coordinates(plant, kd, weights);
  const auto l = cholesky_lower(g.Wc.block(n, n, q, q), 1e-13);
  if (!l) raise(ErrorKind::kGramianSingular, "km_grad: controller controllability Gramian is singular");
  const DynamicPolicy white = similarity_transform(kd, inverse(*l));
  return similarity_transform(km_grad_in_coordinates(plant, white, weights), *l);
}

LqgRun lqg_gd_run(const Plant& plant, const DynamicPolicy& kd0, const LqgMode& mode, const StepRule& step_rule,
                  const StopRule& stop) {
  check_policy(plant, kd0);
  if (kd0.order() != plant.n()) raise(ErrorKind::kContract, "lqg_gd_run: controller order must equal plant order");
  if (!is_stabilizing_dynamic(plant, kd0)) raise(ErrorKind::kInfeasible, "lqg_gd_run: K0 is not stabilizing");
  const KmMetric* km = std::get_if<KmMetric>(&mode);
  if (km != nullptr) {
    validate_km_weights(*km);
    if (!is_minimal(kd0)) raise(ErrorKind::kMinimalityLost, "lqg_gd_run: K0 is not minimal");
  }
  double eta0 = kLqgDefaultStep;
  if (const auto* f = std::get_if<FixedStep>(&step_rule)) {
    if (f->eta > 0.0) eta0 = f->eta;
  } else {
    eta0 = std::get<CertificateStep>(step_rule).cap;
  }

  LqgRun run;
  DynamicPolicy kd = kd0;
  LqgEval ev = lqg_eval(plant, kd);
  double taken = 0.0;
  for (int iter = 0;; ++iter) {
    PolicyTangent g;
    double gnorm = 0.0;
    if (km != nullptr) {
      try {
        g = km_grad(plant, kd, *km);
        gnorm = std::sqrt(std::max(0.0, km_inner(plant, kd, g, g, *km)));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kGramianSingular) throw;
        raise(ErrorKind::kMinimalityLost, std::string("lqg_gd_run: ") + e.what());
      }
    } else {
      g = lqg_grad(plant, kd);
      gnorm = frobenius_norm(g);
    }
    run.trace.push_back(IterTrace{iter, ev.J, gnorm, taken, spectral_radius(closed_loop_dynamic(plant, kd))});
    run.iterates.push_back(kd);
    if (gnorm <= stop.tol || iter >= stop.max_iter) break;

    bool accepted = false;
    double eta = eta0;
    for (int attempt = 0; attempt <= kMaxBacktracks; ++attempt, eta *= 0.5) {
      DynamicPolicy cand = step(kd, g, -eta);
      if (!is_stabilizing_dynamic(plant, cand)) continue;
      LqgEval cand_ev = lqg_eval(plant, cand);
      if (cand_ev.J <= ev.J) {
        kd = std::move(cand);
        ev = std::move(cand_ev);
        taken = eta;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw StalledError("lqg_gd_run: no acceptable step after " + std::to_string(kMaxBacktracks) + " halvings",
                         run.trace);
    }
  }
  run.K = kd;
  run.minimal = is_minimal(kd);
  return run;
}

}  // namespace polgeo
