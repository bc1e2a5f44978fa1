#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "polgeo/lqr.hpp"
#include "polgeo/lqg.hpp"
#include "polgeo/policy.hpp"

using namespace polgeo;

namespace {

Plant triple_integrator() {
  return identity_weighted_plant(Mat{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}, Mat::identity(3));
}

Membership lqg_member(double a) {
  return [a](std::span<const double> x) {
    const Plant p = scalar_plant(a, 1.0);
    return is_stabilizing_dynamic(p, DynamicPolicy{Mat::scalar(x[0]), Mat::scalar(x[1]), Mat::scalar(x[2])});
  };
}

}  // namespace

TEST_SUITE("policy_core") {
  TEST_CASE("plant validation reports every violation") {
    Plant p = scalar_plant(1.0, 1.0);
    CHECK(plant_violations(p).empty());
    p.R = Mat::scalar(0.0);
    p.Q = Mat{{1.0, 0.0}, {0.0, 1.0}};
    const auto v = plant_violations(p);
    REQUIRE(!v.empty());
    CHECK(v[0].rfind("Q", 0) == 0);
    Plant p2 = identity_weighted_plant(Mat::identity(2), Mat{{1.0}, {0.0}});
    p2.Q = Mat{{1.0, 0.0}, {0.0, -0.5}};
    p2.R = Mat::scalar(-1.0);
    const auto v2 = plant_violations(p2);
    REQUIRE(v2.size() == 2);
    CHECK(v2[0].find("Q") == 0);
    CHECK(v2[0].find("-0.5") != std::string::npos);
    CHECK(v2[1].find("R") == 0);
    CHECK_THROWS_AS(validate_plant(p2), Error);
  }

  TEST_CASE("static membership") {
    CHECK(is_stabilizing_static(scalar_plant(1.0, 1.0), Mat::scalar(-1.0)));
    CHECK_FALSE(is_stabilizing_static(scalar_plant(0.0, 1.0), Mat::scalar(1.5)));
    CHECK(is_stabilizing_static(scalar_plant(0.0, 1.0), Mat::scalar(-0.5)));
    CHECK_FALSE(is_stabilizing_static(scalar_plant(0.0, 1.0), Mat::scalar(-1.0)));
    CHECK(is_stabilizing_static(triple_integrator(), Mat(3, 3)));
    CHECK_THROWS_AS(is_stabilizing_static(scalar_plant(0.0, 1.0), Mat(2, 1)), Error);
    CHECK_THROWS_AS(StaticGain::certify(scalar_plant(0.0, 1.0), Mat::scalar(2.0)), Error);
  }

  TEST_CASE("dynamic membership") {
    CHECK(is_stabilizing_dynamic(scalar_plant(0.9, 1.0), DynamicPolicy{Mat::scalar(-0.5), Mat(1, 1), Mat(1, 1)}));
    CHECK_FALSE(is_stabilizing_dynamic(scalar_plant(1.1, 1.0), DynamicPolicy{Mat(1, 1), Mat(1, 1), Mat(1, 1)}));
  }

  TEST_CASE("membership agrees with trajectory decay") {
    oracle::Rand rnd(20);
    int checked = 0;
    while (checked < 200) {
      const std::size_t n = static_cast<std::size_t>(rnd.integer(1, 4));
      const Plant p = identity_weighted_plant(rnd.with_radius(n, rnd.uniform(0.2, 1.5)), rnd.gaussian(n, 1));
      const Mat k = 0.3 * rnd.gaussian(1, n);
      const double rho = oracle::spectral_radius(p.A + p.B * k);
      if (std::abs(rho - 1.0) < 0.05) continue;
      ++checked;
      const bool stable = is_stabilizing_static(p, k);
      CHECK(stable == (rho < 1.0));
      if (rho < 0.5) CHECK(oracle::trajectory_decays(p.A + p.B * k, 200, rnd));
      if (rho > 1.05) CHECK_FALSE(oracle::trajectory_decays(p.A + p.B * k, 2000, rnd));
    }
  }

  TEST_CASE("stability certificate") {
    const Plant p = scalar_plant(0.0, 1.0);
    const StaticGain k = StaticGain::certify(p, Mat::scalar(-0.5));
    CHECK(stability_certificate(p, k, Mat::scalar(1.0)) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(std::isinf(stability_certificate(p, k, Mat::scalar(0.0))));
    CHECK(certified_step(p, k, Mat::scalar(1.0), 1.0).K()(0, 0) == doctest::Approx(-0.125).epsilon(1e-12));
    CHECK(certified_step(p, k, Mat::scalar(0.0), 1.0).K() == k.K());
    CHECK(certified_step(p, k, Mat::scalar(1.0), 0.0).K() == k.K());
    CHECK_THROWS_AS(stability_certificate(p, StaticGain::uncertified(Mat::scalar(-0.5)), Mat::scalar(1.0)), Error);

    oracle::Rand rnd(21);
    for (int t = 0; t < 200; ++t) {
      const auto inst = oracle::random_lqr_instance(rnd, static_cast<std::size_t>(rnd.integer(1, 3)),
                                                    static_cast<std::size_t>(rnd.integer(1, 2)));
      const StaticGain kk = StaticGain::certify(inst.plant, inst.K);
      const Mat v = rnd.gaussian(inst.K.rows(), inst.K.cols());
      const double c = rnd.uniform(0.1, 10.0);
      CHECK(stability_certificate(inst.plant, kk, c * v) ==
            doctest::Approx(stability_certificate(inst.plant, kk, v) / c).epsilon(1e-10));
      const StaticGain next = certified_step(inst.plant, kk, v, 1e9);
      CHECK(oracle::spectral_radius(inst.plant.A + inst.plant.B * next.K()) < 1.0);
    }
  }

  TEST_CASE("constraint subspaces") {
    const ConstraintSubspace diag = ConstraintSubspace::sparsity(Mat{{1.0, 0.0}, {0.0, 1.0}});
    CHECK(diag.dim() == 2);
    CHECK(diag.contains(Mat{{3.0, 0.0}, {0.0, -1.0}}));
    CHECK_FALSE(diag.contains(Mat{{3.0, 1e-3}, {0.0, -1.0}}));
    const ConstraintSubspace of = ConstraintSubspace::output_feedback(Mat{{1.0, 1.0, 0.0}}, 2);
    CHECK(of.dim() == 2);
    CHECK(of.contains(Mat{{2.0, 2.0, 0.0}, {-1.0, -1.0, 0.0}}));
    CHECK_FALSE(of.contains(Mat{{2.0, 1.0, 0.0}, {0.0, 0.0, 0.0}}));
    CHECK_THROWS_AS(ConstraintSubspace::output_feedback(Mat{{1.0, 1.0}, {2.0, 2.0}}, 1), Error);
    CHECK(ConstraintSubspace::full(2, 3).dim() == 6);
  }

  TEST_CASE("KM weights") {
    CHECK_NOTHROW(validate_km_weights(KmMetric{1.0, 0.0, 0.0}));
    CHECK_THROWS_AS(validate_km_weights(KmMetric{0.0, 1.0, 1.0}), Error);
    CHECK_THROWS_AS(validate_km_weights(KmMetric{1.0, -1.0, 1.0}), Error);
  }

  TEST_CASE("connectivity of the LQG feasible region") {
    const std::pair<double, double> box3[] = {{-3, 3}, {-3, 3}, {-3, 3}};
    const auto unstable = connectivity_scan(lqg_member(1.1), box3, 61);
    CHECK(unstable.components == 2);
    const auto stable = connectivity_scan(lqg_member(0.9), box3, 61);
    CHECK(stable.components == 1);
    for (std::size_t res : {41u, 81u}) {
      CHECK(connectivity_scan(lqg_member(1.1), box3, res).components == 2);
      CHECK(connectivity_scan(lqg_member(0.9), box3, res).components == 1);
    }
    // Face adjacency alone splits the thin feasible sheet into many pieces.
    MESSAGE("face-adjacency components at A=1.1: "
            << connectivity_scan(lqg_member(1.1), box3, 61, Adjacency::kFace).components);
  }

  TEST_CASE("connectivity of a scalar interval") {
    const Plant p = scalar_plant(0.0, 1.0);
    const std::pair<double, double> box[] = {{-3, 1}};
    const auto r = connectivity_scan([&](std::span<const double> x) { return is_stabilizing_static(p, Mat::scalar(x[0])); },
                                     box, 101);
    CHECK(r.components == 1);
    CHECK(r.labels.size() == 101);
    const std::pair<double, double> box2[] = {{-3, 3}};
    CHECK_THROWS_AS(connectivity_scan([](std::span<const double>) { return true; }, box2, 7), Error);
    const std::pair<double, double> box5[] = {{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}};
    CHECK_THROWS_AS(connectivity_scan([](std::span<const double>) { return true; }, box5, 8), Error);
  }

  TEST_CASE("landscape slices") {
    const CostFn constant = [](const Mat&) { return std::optional<double>(3.0); };
    const auto g = landscape_slice(constant, Mat(1, 2), Mat{{1.0, 0.0}}, Mat{{0.0, 1.0}}, SliceBox{}, 9);
    CHECK(g.values.size() == 81);
    for (const auto& v : g.values) CHECK(*v == 3.0);
    CHECK_THROWS_AS(landscape_slice(constant, Mat(1, 2), Mat{{1.0, 0.0}}, Mat{{2.0, 0.0}}, SliceBox{}, 9), Error);

    std::ostringstream os;
    write_grid_csv(os, g);
    const std::string csv = os.str();
    CHECK(csv.rfind("s,t,value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 82);
  }

  TEST_CASE("structured LQR slice is nonconvex") {
    const Plant p = identity_weighted_plant(Mat{{0.8, 1.0}, {0.0, 0.8}}, Mat{{0.0, 1.0}, {1.0, 0.0}});
    const CostFn cost = [&](const Mat& k) -> std::optional<double> {
      if (!is_stabilizing_static(p, k)) return std::nullopt;
      return lqr_eval(p, StaticGain::certify(p, k)).J;
    };
    const std::size_t res = 41;
    const auto g = landscape_slice(cost, Mat(2, 2), Mat{{1.0, 0.0}, {0.0, 0.0}}, Mat{{0.0, 0.0}, {0.0, 1.0}},
                                   SliceBox{-3, 3, -3, 3}, res);
    CHECK(g.values[(res / 2) * res + res / 2].has_value());
    bool nonconvex = false;
    for (std::size_t i = 0; i < res && !nonconvex; ++i)
      for (std::size_t j = 0; j < res && !nonconvex; ++j)
        for (std::size_t k = 0; k < res && !nonconvex; k += 2)
          for (std::size_t l = 0; l < res && !nonconvex; l += 2) {
            if ((i + k) % 2 || (j + l) % 2) continue;
            if (g.values[i * res + j] && g.values[k * res + l] && !g.values[((i + k) / 2) * res + (j + l) / 2]) {
              nonconvex = true;
            }
          }
    CHECK(nonconvex);
  }

  TEST_CASE("LQG slice has a flat stationary point at the origin") {
    const Plant p = scalar_plant(0.9, 1.0);
    const CostFn cost = [&](const Mat& x) -> std::optional<double> {
      const DynamicPolicy kd{Mat::scalar(-0.1753), Mat::scalar(x(0, 0)), Mat::scalar(x(0, 1))};
      if (!is_stabilizing_dynamic(p, kd)) return std::nullopt;
      return lqg_eval(p, kd).J;
    };
    const std::size_t res = 41;
    const auto g = landscape_slice(cost, Mat(1, 2), Mat{{1.0, 0.0}}, Mat{{0.0, 1.0}}, SliceBox{-1, 1, -1, 1}, res);
    const std::size_t c = res / 2;
    const double j0 = *g.values[c * res + c];
    CHECK(j0 == doctest::Approx(1.0 / (1.0 - 0.81)).epsilon(1e-10));
    const double h = 2.0 / (res - 1);
    const double ds = (*g.values[(c + 1) * res + c] - *g.values[(c - 1) * res + c]) / (2 * h);
    const double dt = (*g.values[c * res + c + 1] - *g.values[c * res + c - 1]) / (2 * h);
    CHECK(std::abs(ds) <= 1e-9);
    CHECK(std::abs(dt) <= 1e-9);
  }

  TEST_CASE("LQR coercivity probes") {
    oracle::Rand rnd(22);
    int exceeded_at_1e6 = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
      const auto inst = oracle::random_lqr_instance(rnd, 2, 1);
      const DareSolution opt = dare_solve(inst.plant);
      const CostFn cost = [&](const Mat& k) -> std::optional<double> {
        if (!is_stabilizing_static(inst.plant, k)) return std::nullopt;
        return lqr_eval(inst.plant, StaticGain::certify(inst.plant, k)).J;
      };
      const Mat v = rnd.gaussian(1, 2);
      const RayProbe coarse = coercivity_probe(inst.plant, opt.K.K(), v, cost, 1e6, 1e-6, 1e6);
      exceeded_at_1e6 += coarse.exceeded ? 1 : 0;
      const RayProbe fine = coercivity_probe(inst.plant, opt.K.K(), v, cost, 1e6, 1e-10, 1e6);
      CHECK(fine.exceeded);
      CHECK(fine.nondecreasing_tail);
    }
    MESSAGE("rays exceeding 1e6 before rho = 1 - 1e-6: " << exceeded_at_1e6 << " / " << trials);
    // The scalar instance stays near 2.5e5 at rho = 1 - 1e-6 towards k = 0.
    const Plant s = scalar_plant(1.0, 1.0);
    const CostFn scost = [&](const Mat& k) -> std::optional<double> {
      if (!is_stabilizing_static(s, k)) return std::nullopt;
      return lqr_eval(s, StaticGain::certify(s, k)).J;
    };
    const RayProbe sp = coercivity_probe(s, Mat::scalar(-0.618), Mat::scalar(1.0), scost, 1e6, 1e-6, 1e6);
    CHECK(sp.hit_boundary);
    CHECK(sp.max_cost == doctest::Approx(2.5e5).epsilon(1e-3));
  }
}
