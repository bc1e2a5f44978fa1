#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "polgeo/lqr.hpp"
#include "polgeo/zeroth.hpp"

using namespace polgeo;

namespace {

const CostFn half_sq = [](const Mat& x) { return std::optional<double>(0.5 * frobenius_inner(x, x)); };

double cosine(const Mat& a, const Mat& b) { return frobenius_inner(a, b) / (frobenius_norm(a) * frobenius_norm(b)); }

ZoConfig cfg_of(double eps, int n, std::uint64_t seed, ZoEstimator e = ZoEstimator::kTwoPoint) {
  ZoConfig c;
  c.epsilon = eps;
  c.samples = n;
  c.seed = seed;
  c.estimator = e;
  return c;
}

}  // namespace

TEST_SUITE("zeroth") {
  TEST_CASE("sphere sampling") {
    CounterRng rng(1);
    for (int i = 0; i < 100; ++i) {
      const auto u = sample_sphere(1, rng);
      CHECK(std::abs(u[0]) == 1.0);
    }
    std::vector<double> mean(5, 0.0);
    const int count = 100000;
    for (int i = 0; i < count; ++i) {
      const auto u = sample_sphere(5, rng);
      double s = 0.0;
      for (std::size_t j = 0; j < 5; ++j) {
        s += u[j] * u[j];
        mean[j] += u[j] / count;
      }
      CHECK(std::abs(std::sqrt(s) - 1.0) <= 1e-14);
    }
    double mn = 0.0;
    for (double m : mean) mn += m * m;
    CHECK(std::sqrt(mn) <= 0.02);
    CHECK_THROWS_AS(sample_sphere(0, rng), Error);

    CounterRng a(42, 1, 2, 3), b(42, 1, 2, 3), c(42, 1, 2, 4);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.normal() == b.normal());
    CHECK(a.next_u64() != c.next_u64());
  }

  TEST_CASE("two-point estimator hand values") {
    const Mat theta{{1.0}, {0.0}};
    // Direct evaluation of single-sample formula with chosen directions.
    const double eps = 0.1, d = 2.0;
    auto est = [&](const Mat& u) {
      return ((*half_sq(theta + eps * u) - *half_sq(theta - eps * u)) * d / (2 * eps)) * u;
    };
    const Mat e1{{1.0}, {0.0}}, e2{{0.0}, {1.0}};
    CHECK(oracle::rel_err(est(e1), Mat{{2.0}, {0.0}}) <= 1e-12);
    CHECK(max_abs(est(e2)) <= 1e-15);
    CHECK(oracle::rel_err(0.5 * (est(e1) + est(e2)), Mat{{1.0}, {0.0}}) <= 1e-12);

    // The library's estimator with the same recorded directions.
    const ZoConfig cfg = cfg_of(0.1, 1, 9);
    const Mat u = zo_direction(cfg, 2, 1, 0, 0, 0);
    CHECK(oracle::rel_err(zo_grad_two_point(half_sq, theta, cfg), est(u)) <= 1e-12);
  }

  TEST_CASE("linear and constant functions") {
    const Mat a{{1.0}, {-2.0}, {0.5}, {3.0}};
    const CostFn lin = [&](const Mat& x) { return std::optional<double>(frobenius_inner(a, x)); };
    const Mat theta{{0.3}, {0.1}, {-0.2}, {1.0}};
    const Mat g = zo_grad_two_point(lin, theta, cfg_of(1e-3, 500, 3));
    CHECK(frobenius_norm(g - a) <= 0.15 * frobenius_norm(a));
    const ZoConfig one = cfg_of(1e-3, 1, 3);
    const Mat u = zo_direction(one, 4, 1, 0, 0, 0);
    CHECK(oracle::rel_err(zo_grad_two_point(lin, theta, one), 4.0 * frobenius_inner(a, u) * u) <= 1e-9);

    const CostFn constant = [](const Mat&) { return std::optional<double>(2.0); };
    CHECK(max_abs(zo_grad_two_point(constant, theta, cfg_of(1e-3, 50, 3))) == 0.0);
    const CostFn zero = [](const Mat&) { return std::optional<double>(0.0); };
    CHECK(max_abs(zo_grad_baseline(zero, zero, theta, cfg_of(1e-3, 50, 3))) == 0.0);
    const Mat single = zo_grad_one_point(constant, theta, cfg_of(0.1, 1, 3));
    CHECK(frobenius_norm(single) == doctest::Approx(2.0 * 4.0 / 0.1));
    MESSAGE("one-point estimate of a constant, N=10000: |g| = "
            << frobenius_norm(zo_grad_one_point(constant, theta, cfg_of(0.1, 10000, 3))));
  }

  TEST_CASE("one-point and baseline estimators") {
    const Mat theta{{1.0}, {0.0}};
    // Per sample the estimate is about 20 U, so with N = 5000 the squared error
    // has mean ~400 / 5000 = 0.08 and the 0.25 ball holds with probability
    // ~1 - exp(-0.0625 / 0.08) = 0.54; checked over independent seeds.
    int within = 0;
    double mse = 0.0;
    const int seeds = 200;
    for (int r = 0; r < seeds; ++r) {
      const Mat g = zo_grad_one_point(half_sq, theta, cfg_of(0.05, 5000, 4 + static_cast<std::uint64_t>(r)));
      const double err = frobenius_norm(g - theta);
      within += err <= 0.25 ? 1 : 0;
      mse += err * err / seeds;
    }
    MESSAGE("one-point N=5000: " << within << "/" << seeds << " estimates within 0.25, mean squared error " << mse);
    CHECK(mse == doctest::Approx(0.08).epsilon(0.2));
    CHECK(within >= 80);
    CHECK(within <= 140);

    const CostFn fixed = [&](const Mat&) { return half_sq(theta); };
    const ZoConfig cfg = cfg_of(0.05, 20, 4);
    const Mat base = zo_grad_baseline(half_sq, fixed, theta, cfg);
    Mat fwd(2, 1);
    for (int s = 0; s < 20; ++s) {
      const Mat u = zo_direction(cfg, 2, 1, 0, static_cast<std::uint64_t>(s), 0);
      fwd += ((*half_sq(theta + 0.05 * u) - *half_sq(theta)) * 2.0 / 0.05) * u;
    }
    fwd *= 1.0 / 20.0;
    CHECK(oracle::rel_err(base, fwd) <= 1e-12);

    // Paired-seed variance comparison and cosine comparison at equal budget.
    const Mat th5{{1.0}, {-0.5}, {0.3}, {0.8}, {-1.2}};
    double var_one = 0.0, var_base = 0.0, cos_one = 0.0, cos_two = 0.0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
      const ZoConfig c = cfg_of(0.05, 20, 1000 + static_cast<std::uint64_t>(r));
      const Mat g1 = zo_grad_one_point(half_sq, th5, c);
      const Mat gb = zo_grad_baseline(half_sq, half_sq, th5, c);
      const Mat g2 = zo_grad_two_point(half_sq, th5, cfg_of(0.05, 10, 1000 + static_cast<std::uint64_t>(r)));
      var_one += std::pow(frobenius_norm(g1 - th5), 2) / reps;
      var_base += std::pow(frobenius_norm(gb - th5), 2) / reps;
      cos_one += cosine(g1, th5) / reps;
      cos_two += cosine(g2, th5) / reps;
    }
    MESSAGE("mean squared error one-point " << var_one << ", baseline " << var_base);
    MESSAGE("mean cosine one-point " << cos_one << ", two-point " << cos_two);
    CHECK(var_base < var_one);
    CHECK(cos_one < cos_two);
  }

  TEST_CASE("cosine similarity and linearity") {
    oracle::Rand rnd(80);
    for (std::size_t d = 1; d <= 6; ++d) {
      const Mat h = rnd.spd(d);
      const CostFn quad = [&](const Mat& x) { return std::optional<double>(0.5 * frobenius_inner(x, h * x)); };
      const Mat theta = rnd.gaussian(d, 1);
      const Mat g = zo_grad_two_point(quad, theta, cfg_of(1e-3, 200, 17));
      CHECK(cosine(g, h * theta) >= 0.9);
    }
    const Mat theta{{0.4}, {0.2}, {-0.1}};
    const CostFn f = [](const Mat& x) { return std::optional<double>(std::sin(x[0]) + x[1] * x[2]); };
    const CostFn g = [](const Mat& x) { return std::optional<double>(x[0] * x[0] * x[1]); };
    const CostFn fg = [&](const Mat& x) { return std::optional<double>(*f(x) + *g(x)); };
    const ZoConfig c = cfg_of(1e-2, 30, 5, ZoEstimator::kOnePoint);
    CHECK(oracle::rel_err(zo_grad_one_point(fg, theta, c), zo_grad_one_point(f, theta, c) + zo_grad_one_point(g, theta, c)) <=
          1e-12);
    const ZoConfig c2 = cfg_of(1e-2, 30, 5);
    CHECK(oracle::rel_err(zo_grad_two_point(fg, theta, c2),
                          zo_grad_two_point(f, theta, c2) + zo_grad_two_point(g, theta, c2)) <= 1e-10);
  }

  TEST_CASE("infeasible samples are redrawn, then refused") {
    const CostFn half_plane = [](const Mat& x) -> std::optional<double> {
      if (x[0] < 0.0) return std::nullopt;
      return x[0];
    };
    const Mat near{{0.05}, {0.0}};
    CHECK_NOTHROW(zo_grad_one_point(half_plane, near, cfg_of(0.1, 50, 6)));
    const CostFn never = [](const Mat&) -> std::optional<double> { return std::nullopt; };
    try {
      zo_grad_two_point(never, near, cfg_of(0.1, 5, 6));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kTooCloseToBoundary);
    }
  }

  TEST_CASE("descent") {
    const Plant p = scalar_plant(1.0, 1.0);
    const CostFn lqr = [&](const Mat& k) -> std::optional<double> {
      if (!is_stabilizing_static(p, k)) return std::nullopt;
      return lqr_eval(p, StaticGain::certify(p, k)).J;
    };
    const Feasibility feas = [&](const Mat& k) { return is_stabilizing_static(p, k); };
    const double jstar = lqr_eval(p, dare_solve(p).K).J;
    const ZoRun run = zo_gd_run(lqr, feas, Mat::scalar(-1.0), cfg_of(1e-3, 200, 7), FixedStep{0.05}, StopRule{0.0, 3000});
    CHECK(run.trace.back().J <= 1.01 * jstar);
    const ZoRun again =
        zo_gd_run(lqr, feas, Mat::scalar(-1.0), cfg_of(1e-3, 200, 7), FixedStep{0.05}, StopRule{0.0, 3000});
    CHECK(again.trace == run.trace);
    CHECK(again.theta == run.theta);

    const ZoRun quad = zo_gd_run(half_sq, [](const Mat&) { return true; }, Mat{{1.0}, {-2.0}, {0.5}, {0.3}, {1.5}},
                                 cfg_of(1e-3, 20, 8), FixedStep{0.1}, StopRule{0.0, 2000});
    CHECK(frobenius_norm(quad.theta) <= 1e-2);

    const Mat start = dare_solve(p).K.K();
    const ZoRun still = zo_gd_run(lqr, feas, start, cfg_of(1e-3, 200, 9), FixedStep{0.05}, StopRule{0.0, 200});
    CHECK(frobenius_norm(still.theta - start) <= 5e-3);

    CHECK_THROWS_AS(zo_gd_run(lqr, feas, Mat::scalar(1.0), cfg_of(1e-3, 20, 7), FixedStep{0.05}, StopRule{}), Error);
  }
}
