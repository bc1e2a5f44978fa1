#include <cmath>
#include <complex>

#include "doctest.h"
#include "oracles.hpp"
#include "polgeo/numerics.hpp"

using namespace polgeo;

TEST_SUITE("numerics") {
  TEST_CASE("construction rejects bad data") {
    CHECK_THROWS_AS(Mat(2, 2, {1.0, 2.0, 3.0}), Error);
    CHECK_THROWS_AS(Mat(1, 2, {1.0, std::nan("")}), Error);
    CHECK_THROWS_AS(Mat(1, 1, {INFINITY}), Error);
    CHECK_THROWS_AS((Mat{{1.0, 2.0}, {3.0}}), Error);
  }

  TEST_CASE("matmul") {
    const Mat m{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(matmul(Mat::identity(2), m) == m);
    CHECK(matmul(m, Mat{{0.0}, {1.0}}) == Mat{{2.0}, {4.0}});
    CHECK_THROWS_AS(matmul(m, Mat(3, 1)), Error);
    try {
      matmul(m, Mat(3, 1));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDimension);
    }
    oracle::Rand rnd(1);
    const Mat x = rnd.gaussian(5, 5), y = rnd.gaussian(5, 5);
    CHECK(max_abs(matmul(x, y) - oracle::naive_matmul(x, y)) <= 1e-14);
  }

  TEST_CASE("solve_linear") {
    const Mat v{{1.0}, {-2.0}, {3.0}};
    CHECK(solve_linear(Mat::identity(3), v) == v);
    const Mat x = solve_linear(Mat{{2.0, 0.0}, {0.0, 4.0}}, Mat{{2.0}, {8.0}});
    CHECK(x(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x(1, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(solve_linear(Mat{{1.0, 2.0}, {2.0, 4.0}}, Mat{{1.0}, {1.0}}), Error);
    try {
      solve_linear(Mat(2, 2), Mat(2, 1));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kSingular);
    }
    oracle::Rand rnd(2);
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = static_cast<std::size_t>(rnd.integer(1, 8));
      const Mat g = rnd.spd(n, 0.5, 3.0) + 0.3 * rnd.gaussian(n, n);
      if (oracle::condition_number(g) > 1e4) continue;
      const Mat b = rnd.gaussian(n, 1);
      const Mat sol = solve_linear(g, b);
      CHECK(frobenius_norm(g * sol - b) <= 1e-10 * (1.0 + frobenius_norm(b)));
    }
  }

  TEST_CASE("spectral_radius") {
    CHECK(spectral_radius(Mat{{0.3, 0.0}, {0.0, -0.7}}) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(spectral_radius(Mat{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}) == 0.0);
    CHECK(spectral_radius(Mat{{0.0, 1.0}, {-0.25, 1.0}}) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(spectral_radius(Mat{{0.0, 1.0}, {-1.0, 0.0}}) == doctest::Approx(1.0).epsilon(1e-10));
    oracle::Rand rnd(3);
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = static_cast<std::size_t>(rnd.integer(1, 6));
      const Mat m = rnd.gaussian(n, n);
      const double want = oracle::spectral_radius(m);
      CHECK(spectral_radius(m) == doctest::Approx(want).epsilon(1e-8));
      const double c = rnd.uniform(-5.0, 5.0);
      CHECK(spectral_radius(c * m) == doctest::Approx(std::abs(c) * spectral_radius(m)).epsilon(1e-8));
      CHECK(spectral_norm(m) >= spectral_radius(m) * (1.0 - 1e-9));
    }
    // Huge entries are rescaled, never overflow.
    CHECK(spectral_radius(Mat{{1e200, 0.0}, {0.0, 1.0}}) == doctest::Approx(1e200).epsilon(1e-8));
  }

  TEST_CASE("sym_lambda_max") {
    CHECK(sym_lambda_max(Mat{{1.0, 0.0}, {0.0, 4.0 / 3.0}}) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(sym_lambda_max(Mat::identity(4)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(sym_lambda_max(Mat{{1.0, 2.0}, {0.0, 1.0}}), Error);
    oracle::Rand rnd(4);
    for (int t = 0; t < 100; ++t) {
      const Mat g = rnd.gaussian(6, 6);
      const Mat s = symmetrize(g);
      CHECK(sym_lambda_max(s) == doctest::Approx(oracle::bisection_lambda_max(s)).epsilon(1e-8).scale(1.0));
      CHECK(sym_lambda_min(s) == doctest::Approx(oracle::sym_eig_min(s)).epsilon(1e-8).scale(1.0));
    }
    const Mat s = symmetrize(rnd.gaussian(5, 5));
    const double lmax = sym_lambda_max(s);
    for (int t = 0; t < 1000; ++t) {
      Mat u = rnd.gaussian(5, 1);
      u *= 1.0 / frobenius_norm(u);
      CHECK(trace(transpose(u) * s * u) <= lmax + 1e-10);
    }
  }

  TEST_CASE("spectral_norm") {
    CHECK(spectral_norm(Mat(3, 2)) == 0.0);
    CHECK(spectral_norm(Mat{{3.0}, {4.0}}) == doctest::Approx(5.0).epsilon(1e-12));
    oracle::Rand rnd(5);
    for (int t = 0; t < 50; ++t) {
      const Mat m = rnd.gaussian(4, 3);
      CHECK(spectral_norm(m) == doctest::Approx(oracle::sigma_max(m)).epsilon(1e-9));
    }
  }

  TEST_CASE("hermitian_lambda_max") {
    using c = std::complex<double>;
    CHECK(hermitian_lambda_max(CMat(Mat{{2.0, 0.0}, {0.0, 5.0}})) == doctest::Approx(5.0).epsilon(1e-12));
    CMat h(2, 2, {c(1, 0), c(0, 1), c(0, -1), c(1, 0)});
    CHECK(hermitian_lambda_max(h) == doctest::Approx(2.0).epsilon(1e-10));
    CMat v(3, 1, {c(0.6, 0.0), c(0.0, 0.48), c(0.0, -0.64)});
    CHECK(hermitian_lambda_max(matmul(v, adjoint(v))) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(hermitian_lambda_max(CMat(2, 2, {c(1, 0), c(0, 1), c(0, 1), c(1, 0)})), Error);
  }

  TEST_CASE("block helpers and vec") {
    const Mat a{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(unvec(vec(a), 2, 2) == a);
    CHECK(vec(a) == Mat{{1.0}, {3.0}, {2.0}, {4.0}});
    const Mat bd = block_diag(a, Mat::scalar(5.0));
    CHECK(bd.rows() == 3);
    CHECK(bd(2, 2) == 5.0);
    CHECK(bd(0, 2) == 0.0);
    CHECK(kron(Mat::identity(2), a).block(2, 2, 2, 2) == a);
    CHECK(numerical_rank(Mat{{1.0, 2.0}, {2.0, 4.0}}, 1e-8) == 1);
    CHECK(numerical_rank(Mat::identity(3), 1e-8) == 3);
  }
}
