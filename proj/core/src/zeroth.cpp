#include "polgeo/zeroth.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace polgeo {

std::string_view to_string(ZoEstimator e) noexcept {
  switch (e) {
    case ZoEstimator::kOnePoint: return "one_point";
    case ZoEstimator::kTwoPoint: return "two_point";
    case ZoEstimator::kBaseline: return "baseline";
  }
  return "unknown";
}

void validate(const ZoConfig& cfg) {
  if (!std::isfinite(cfg.epsilon)) raise(ErrorKind::kContract, "ZoConfig: epsilon must be finite");
  if (cfg.samples < 0) raise(ErrorKind::kContract, "ZoConfig: samples must be >= 1 (0 selects the default)");
}

std::vector<double> sample_sphere(std::size_t d, CounterRng& rng) {
  if (d == 0) raise(ErrorKind::kContract, "sample_sphere: dimension must be >= 1");
  std::vector<double> u(d);
  double nrm = 0.0;
  while (!(nrm > 0.0)) {
    double s = 0.0;
    for (auto& x : u) {
      x = rng.normal();
      s += x * x;
    }
    nrm = std::sqrt(s);
  }
  for (auto& x : u) x /= nrm;
  return u;
}

Mat zo_direction(const ZoConfig& cfg, std::size_t rows, std::size_t cols, std::uint64_t iter, std::uint64_t sample,
                 std::uint64_t retry) {
  CounterRng rng(cfg.seed, iter, sample, retry);
  return Mat(rows, cols, sample_sphere(rows * cols, rng));
}

namespace {

struct Resolved {
  double eps;
  int samples;
  double d;
};

Resolved resolve(const ZoConfig& cfg, const Mat& theta) {
  validate(cfg);
  if (theta.size() == 0) raise(ErrorKind::kContract, "zeroth-order estimator: empty parameter");
  const double d = static_cast<double>(theta.size());
  return Resolved{cfg.epsilon > 0.0 ? cfg.epsilon : 1e-3 * (1.0 + frobenius_norm(theta)),
                  cfg.samples > 0 ? cfg.samples : static_cast<int>(2 * theta.size()), d};
}

// Averages coeff(U) * U over samples; coeff returns nullopt to request a redraw.
template <typename Coeff>
Mat average(const Mat& theta, const ZoConfig& cfg, const Resolved& r, std::uint64_t iter, Coeff coeff) {
  Mat acc(theta.rows(), theta.cols());
  for (int s = 0; s < r.samples; ++s) {
    bool done = false;
    for (int retry = 0; retry <= kZoMaxResamples && !done; ++retry) {
      const Mat u = zo_direction(cfg, theta.rows(), theta.cols(), iter, static_cast<std::uint64_t>(s),
                                 static_cast<std::uint64_t>(retry));
      if (const auto c = coeff(u)) {
        acc += *c * u;
        done = true;
      }
    }
    if (!done) {
      raise(ErrorKind::kTooCloseToBoundary, "zeroth-order estimator: " + std::to_string(kZoMaxResamples) +
                                                " redraws left the feasible set");
    }
  }
  acc *= 1.0 / static_cast<double>(r.samples);
  return acc;
}

}  // namespace

Mat zo_grad_two_point(const CostFn& cost, const Mat& theta, const ZoConfig& cfg, std::uint64_t iter) {
  const Resolved r = resolve(cfg, theta);
  return average(theta, cfg, r, iter, [&](const Mat& u) -> std::optional<double> {
    const auto jp = cost(theta + r.eps * u);
    if (!jp) return std::nullopt;
    const auto jm = cost(theta - r.eps * u);
    if (!jm) return std::nullopt;
    return (*jp - *jm) * r.d / (2.0 * r.eps);
  });
}

Mat zo_grad_one_point(const CostFn& cost, const Mat& theta, const ZoConfig& cfg, std::uint64_t iter) {
  const Resolved r = resolve(cfg, theta);
  return average(theta, cfg, r, iter, [&](const Mat& u) -> std::optional<double> {
    const auto jp = cost(theta + r.eps * u);
    if (!jp) return std::nullopt;
    return *jp * r.d / r.eps;
  });
}

Mat zo_grad_baseline(const CostFn& cost, const CostFn& baseline, const Mat& theta, const ZoConfig& cfg,
                     std::uint64_t iter) {
  const Resolved r = resolve(cfg, theta);
  return average(theta, cfg, r, iter, [&](const Mat& u) -> std::optional<double> {
    const auto jp = cost(theta + r.eps * u);
    if (!jp) return std::nullopt;
    const auto b = baseline(theta);
    if (!b) raise(ErrorKind::kInfeasible, "zo_grad_baseline: baseline is not evaluable at theta");
    return (*jp - *b) * r.d / r.eps;
  });
}

Mat zo_estimate(const CostFn& cost, const Mat& theta, const ZoConfig& cfg, std::uint64_t iter) {
  switch (cfg.estimator) {
    case ZoEstimator::kOnePoint: return zo_grad_one_point(cost, theta, cfg, iter);
    case ZoEstimator::kTwoPoint: return zo_grad_two_point(cost, theta, cfg, iter);
    case ZoEstimator::kBaseline: return zo_grad_baseline(cost, cost, theta, cfg, iter);
  }
  raise(ErrorKind::kContract, "zo_estimate: unknown estimator");
}

ZoRun zo_gd_run(const CostFn& cost, const Feasibility& feasible, const Mat& theta0, const ZoConfig& cfg,
                const StepRule& step, const StopRule& stop, const std::function<double(const Mat&)>& rho) {
  validate(cfg);
  if (!feasible(theta0)) raise(ErrorKind::kInfeasible, "zo_gd_run: theta0 is not feasible");
  double eta0 = 1e-3;
  if (const auto* f = std::get_if<FixedStep>(&step)) {
    if (f->eta > 0.0) eta0 = f->eta;
  } else {
    eta0 = std::get<CertificateStep>(step).cap;
  }
  ZoRun run;
  Mat theta = theta0;
  double taken = 0.0;
  for (int iter = 0;; ++iter) {
    const auto j = cost(theta);
    if (!j) raise(ErrorKind::kInternalInvariant, "zo_gd_run: feasible iterate has no finite cost");
    const Mat g = zo_estimate(cost, theta, cfg, static_cast<std::uint64_t>(iter));
    const double gnorm = frobenius_norm(g);
    run.trace.push_back(IterTrace{iter, *j, gnorm, taken, rho ? rho(theta) : 0.0});
    if (gnorm <= stop.tol || iter >= stop.max_iter) break;
    bool accepted = false;
    double eta = eta0;
    for (int attempt = 0; attempt <= kMaxBacktracks; ++attempt, eta *= 0.5) {
      Mat cand = theta - eta * g;
      if (feasible(cand) && cost(cand)) {
        theta = std::move(cand);
        taken = eta;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw StalledError("zo_gd_run: no feasible step after " + std::to_string(kMaxBacktracks) + " halvings",
                         run.trace);
    }
  }
  run.theta = std::move(theta);
  return run;
}

}  // namespace polgeo
