#include "polgeo/hinf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>

#include "polgeo/rng.hpp"

namespace polgeo {

namespace {

struct Response {
  Mat acl;
  Mat weight;

  double operator()(double omega) const {
    const std::size_t n = acl.rows();
    const cplx z = std::polar(1.0, omega);
    CMat shifted(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) shifted(i, j) = (i == j ? z : cplx(0.0)) - acl(i, j);
    CMat res;
    try {
      res = solve_linear(shifted, CMat::identity(n));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kSingular) throw;
      raise(ErrorKind::kInternalInvariant, "hinf_freq_response: resolvent is singular on the unit circle");
    }
    CMat h = matmul(adjoint(res), matmul(CMat(weight), res));
    if (n == 1) return h(0, 0).real();
    for (std::size_t i = 0; i < n; ++i) {
      h(i, i) = h(i, i).real();
      for (std::size_t j = i + 1; j < n; ++j) {
        const cplx avg = 0.5 * (h(i, j) + std::conj(h(j, i)));
        h(i, j) = avg;
        h(j, i) = std::conj(avg);
      }
    }
    return hermitian_lambda_max(h);
  }
};

Response make_response(const Plant& plant, const StaticGain& k) {
  if (!k.certified()) raise(ErrorKind::kInfeasible, "hinf: gain is not certified stabilizing");
  return Response{closed_loop_static(plant, k.K()), plant.Q + transpose(k.K()) * plant.R * k.K()};
}

struct Peak {
  double omega;
  double value;
};

Peak golden_max(const Response& f, double a, double b, double tol, Peak best) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c);
  double fd = f(d);
  auto keep = [&](double w, double v) {
    if (v > best.value) best = Peak{w, v};
  };
  keep(c, fc);
  keep(d, fd);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
      keep(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
      keep(d, fd);
    }
  }
  return best;
}

std::optional<double> cost_at(const Plant& plant, const Mat& k, const HinfDescentConfig& cfg) {
  if (!is_stabilizing_static(plant, k)) return std::nullopt;
  return hinf_cost(plant, StaticGain::certify(plant, k), cfg.grid, cfg.refine_tol).J;
}

// Central differences; nullopt when a one-sided pair disagrees (a kink inside
// the stencil) or the stencil leaves the stabilizing set.
std::optional<Mat> fd_gradient(const Plant& plant, const Mat& k, double j0, double h, const HinfDescentConfig& cfg) {
  Mat g(k.rows(), k.cols());
  for (std::size_t i = 0; i < k.size(); ++i) {
    Mat kp = k;
    Mat km = k;
    kp[i] += h;
    km[i] -= h;
    const auto jp = cost_at(plant, kp, cfg);
    const auto jm = cost_at(plant, km, cfg);
    if (!jp || !jm) return std::nullopt;
    const double fwd = (*jp - j0) / h;
    const double bwd = (j0 - *jm) / h;
    const double central = 0.5 * (fwd + bwd);
    if (std::abs(fwd - bwd) > 1e-3 * (1.0 + std::abs(central))) return std::nullopt;
    g[i] = central;
  }
  return g;
}

Mat ball_sample(std::size_t rows, std::size_t cols, CounterRng& rng) {
  Mat u(rows, cols);
  double nrm = 0.0;
  while (nrm == 0.0) {
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = rng.normal();
    nrm = frobenius_norm(u);
  }
  const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(u.size()));
  return (radius / nrm) * u;
}

}  // namespace

double hinf_freq_response(const Plant& plant, const StaticGain& k, double omega) {
  return make_response(plant, k)(omega);
}

HinfEval hinf_cost(const Plant& plant, const StaticGain& k, std::size_t grid, double refine_tol) {
  if (grid < 64) raise(ErrorKind::kContract, "hinf_cost: grid must have at least 64 points");
  if (!(refine_tol > 0.0)) raise(ErrorKind::kContract, "hinf_cost: refine_tol must be positive");
  const Response f = make_response(plant, k);
  const double pi = std::numbers::pi;
  std::vector<double> w(grid);
  std::vector<double> v(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    w[i] = pi * static_cast<double>(i) / static_cast<double>(grid - 1);
    v[i] = f(w[i]);
  }
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < grid; ++i) {
    const bool left = i == 0 || v[i] >= v[i - 1];
    const bool right = i + 1 == grid || v[i] >= v[i + 1];
    if (left && right) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  if (peaks.size() > 3) peaks.resize(3);

  const std::size_t top = peaks.front();
  const Peak grid_best{w[top], v[top]};
  Peak best = grid_best;
  for (std::size_t i : peaks) {
    const double a = w[i == 0 ? 0 : i - 1];
    const double b = w[i + 1 == grid ? i : i + 1];
    best = golden_max(f, a, b, refine_tol, best);
  }
  return HinfEval{best.value, best.omega, grid, best.value > grid_best.value};
}

std::vector<double> min_norm_convex_weights(const std::vector<Mat>& points) {
  const std::size_t k = points.size();
  if (k == 0) raise(ErrorKind::kContract, "min_norm_convex_weights: no points");
  Mat gram(k, k);
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      gram(i, j) = frobenius_inner(points[i], points[j]);
      gram(j, i) = gram(i, j);
    }
    scale = std::max(scale, gram(i, i));
  }
  std::vector<double> lam(k, 0.0);
  std::size_t first = 0;
  for (std::size_t i = 1; i < k; ++i)
    if (gram(i, i) < gram(first, first)) first = i;
  lam[first] = 1.0;
  if (scale == 0.0) return lam;
  std::vector<std::size_t> active{first};

  auto dot_x = [&](std::size_t j) {
    double s = 0.0;
    for (std::size_t i : active) s += lam[i] * gram(i, j);
    return s;
  };
  for (int major = 0; major < 1000; ++major) {
    double xx = 0.0;
    for (std::size_t i : active) xx += lam[i] * dot_x(i);
    std::size_t jbest = 0;
    double dbest = dot_x(0);
    for (std::size_t j = 1; j < k; ++j) {
      const double d = dot_x(j);
      if (d < dbest) {
        dbest = d;
        jbest = j;
      }
    }
    if (dbest >= xx - 1e-12 * scale) break;
    if (std::find(active.begin(), active.end(), jbest) != active.end()) break;
    active.push_back(jbest);

    bool stuck = false;
    for (int minor = 0; minor < 1000; ++minor) {
      const std::size_t s = active.size();
      Mat kkt(s + 1, s + 1);
      Mat rhs(s + 1, 1);
      for (std::size_t a = 0; a < s; ++a) {
        for (std::size_t b = 0; b < s; ++b) kkt(a, b) = gram(active[a], active[b]);
        kkt(a, s) = 1.0;
        kkt(s, a) = 1.0;
      }
      rhs(s, 0) = 1.0;
      Mat alpha;
      try {
        alpha = solve_linear(kkt, rhs);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kSingular) throw;
        active.pop_back();
        stuck = true;
        break;
      }
      bool interior = true;
      for (std::size_t a = 0; a < s; ++a) interior = interior && alpha[a] > 0.0;
      if (interior) {
        for (std::size_t a = 0; a < s; ++a) lam[active[a]] = alpha[a];
        break;
      }
      double theta = 1.0;
      for (std::size_t a = 0; a < s; ++a) {
        if (alpha[a] <= 0.0) {
          const double li = lam[active[a]];
          theta = std::min(theta, li / (li - alpha[a]));
        }
      }
      for (std::size_t a = 0; a < s; ++a) lam[active[a]] = theta * alpha[a] + (1.0 - theta) * lam[active[a]];
      std::vector<std::size_t> kept;
      for (std::size_t i : active) {
        if (lam[i] > 1e-15) {
          kept.push_back(i);
        } else {
          lam[i] = 0.0;
        }
      }
      if (kept.empty()) {
        kept.push_back(active.front());
        lam[kept[0]] = 1.0;
      }
      active = std::move(kept);
    }
    if (stuck) break;
  }
  double total = 0.0;
  for (double l : lam) total += l;
  for (double& l : lam) l /= total;
  return lam;
}

HinfRun hinf_descent_run(const Plant& plant, const StaticGain& k0, const HinfDescentConfig& cfg, const StepRule& step,
                         const StopRule& stop) {
  if (!k0.certified()) raise(ErrorKind::kInfeasible, "hinf_descent_run: K0 is not certified stabilizing");
  const std::size_t m = k0.K().rows();
  const std::size_t n = k0.K().cols();
  int samples = cfg.samples > 0 ? cfg.samples : static_cast<int>(2 * m * n + 2);
  samples += samples % 2;
  const double k0_scale = 1.0 + frobenius_norm(k0.K());
  double radius = cfg.radius > 0.0 ? cfg.radius : 1e-4 * k0_scale;
  double min_radius = cfg.min_radius > 0.0 ? cfg.min_radius : 1e-9 * k0_scale;
  min_radius = std::min(min_radius, radius);

  HinfRun run;
  StaticGain k = k0;
  double j = hinf_cost(plant, k, cfg.grid, cfg.refine_tol).J;
  double taken = 0.0;
  for (int iter = 0;; ++iter) {
    const double h = std::min(1e-7 * (1.0 + frobenius_norm(k.K())), 0.25 * radius);
    std::vector<Mat> grads;
    auto add_sample = [&](const Mat& pt) {
      const auto jp = cost_at(plant, pt, cfg);
      if (!jp) return;
      if (auto g = fd_gradient(plant, pt, *jp, h, cfg)) grads.push_back(std::move(*g));
    };
    add_sample(k.K());
    for (int s = 0; s < samples / 2; ++s) {
      CounterRng rng(cfg.seed, static_cast<std::uint64_t>(iter), static_cast<std::uint64_t>(s));
      const Mat u = radius * ball_sample(m, n, rng);
      add_sample(k.K() + u);
      add_sample(k.K() - u);
    }
    Mat x(m, n);
    if (!grads.empty()) {
      const auto lam = min_norm_convex_weights(grads);
      for (std::size_t i = 0; i < grads.size(); ++i) x += lam[i] * grads[i];
    }
    const double gnorm = frobenius_norm(x);
    run.trace.push_back(IterTrace{iter, j, gnorm, taken, spectral_radius(closed_loop_static(plant, k.K()))});
    if (iter >= stop.max_iter) break;
    taken = 0.0;
    if (gnorm <= stop.tol) {
      if (radius <= min_radius) break;
      radius = std::max(0.1 * radius, min_radius);
      continue;
    }

    const Mat v = -x;
    double eta = 0.0;
    if (const auto* fixed = std::get_if<FixedStep>(&step)) {
      eta = fixed->eta > 0.0 ? fixed->eta : 1e-3 / spectral_norm(plant.R);
    } else {
      eta = std::min(std::get<CertificateStep>(step).cap, stability_certificate(plant, k, v));
    }
    bool accepted = false;
    for (int attempt = 0; attempt <= kMaxBacktracks; ++attempt, eta *= 0.5) {
      const Mat cand = k.K() + eta * v;
      const auto jc = cost_at(plant, cand, cfg);
      if (jc && *jc < j - 1e-6 * eta * gnorm * gnorm) {
        k = StaticGain::certify(plant, cand);
        j = *jc;
        taken = eta;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (radius <= min_radius) {
        throw StalledError("hinf_descent_run: no acceptable step after " + std::to_string(kMaxBacktracks) +
                               " halvings at the minimum sampling radius",
                           run.trace);
      }
      radius = std::max(0.1 * radius, min_radius);
    }
  }
  run.K = k;
  run.final_radius = radius;
  return run;
}

}  // namespace polgeo
