#pragma once

// Independent reference computations for tests. Everything here is built on
// Eigen or on plain loops, never on the library's own linear algebra.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "polgeo/lqg.hpp"
#include "polgeo/policy.hpp"

namespace oracle {

using polgeo::DynamicPolicy;
using polgeo::Mat;
using polgeo::Plant;
using EMat = Eigen::MatrixXd;
using CEMat = Eigen::MatrixXcd;

inline EMat to_eigen(const Mat& m) {
  EMat e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Mat from_eigen(const EMat& e) {
  Mat m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline Mat naive_matmul(const Mat& x, const Mat& y) {
  Mat out(x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x.cols(); ++k) s += x(i, k) * y(k, j);
      out(i, j) = s;
    }
  return out;
}

inline double spectral_radius(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::EigenSolver<EMat> es(to_eigen(m), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double sym_eig_max(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<EMat> es(to_eigen(s), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline double sym_eig_min(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<EMat> es(to_eigen(s), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double sigma_max(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<EMat> svd(to_eigen(m));
  return svd.singularValues()(0);
}

inline double condition_number(const Mat& m) {
  Eigen::JacobiSVD<EMat> svd(to_eigen(m));
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

/// Largest eigenvalue of a symmetric matrix by bisection on the sign pattern
/// of det(lambda I - S): above lambda_max the matrix lambda I - S is positive
/// definite, which an LLT factorization detects.
inline double bisection_lambda_max(const Mat& s) {
  const EMat e = to_eigen(s);
  const double bound = e.norm() + 1.0;
  double lo = -bound, hi = bound;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * bound; ++it) {
    const double mid = 0.5 * (lo + hi);
    const EMat shifted = mid * EMat::Identity(e.rows(), e.cols()) - e;
    Eigen::LLT<EMat> llt(shifted);
    if (llt.info() == Eigen::Success) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// P = A P A^T + Q by the Kronecker form (I - A (x) A) vec P = vec Q.
inline Mat lyap_kron(const Mat& a, const Mat& q) {
  const EMat ea = to_eigen(a);
  const Eigen::Index n = ea.rows();
  EMat big = EMat::Identity(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) big.block(i * n, j * n, n, n) -= ea(i, j) * ea;
  const EMat eq = to_eigen(q);
  Eigen::VectorXd rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) rhs(j * n + i) = eq(i, j);
  // vec(A P A^T) = (A (x) A) vec P with column-stacking; the block (i, j) of A (x) A is a_ij A.
  const Eigen::VectorXd sol = big.fullPivLu().solve(rhs);
  Mat p(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) p(i, j) = sol(j * n + i);
  return p;
}

/// Riccati value iteration in Eigen; returns (P*, K*).
inline std::pair<Mat, Mat> riccati_oracle(const Plant& plant) {
  const EMat a = to_eigen(plant.A), b = to_eigen(plant.B), q = to_eigen(plant.Q), r = to_eigen(plant.R);
  EMat p = q;
  for (int it = 0; it < 200000; ++it) {
    const EMat gain = (r + b.transpose() * p * b).ldlt().solve(b.transpose() * p * a);
    const EMat next = q + a.transpose() * p * a - a.transpose() * p * b * gain;
    const double delta = (next - p).norm();
    p = 0.5 * (next + next.transpose());
    if (delta <= 1e-13 * (1.0 + p.norm())) break;
  }
  const EMat k = -(r + b.transpose() * p * b).ldlt().solve(b.transpose() * p * a);
  return {from_eigen(p), from_eigen(k)};
}

class Rand {
 public:
  explicit Rand(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  Mat gaussian(std::size_t r, std::size_t c) {
    Mat m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = normal();
    return m;
  }

  /// Symmetric positive definite with eigenvalues in [floor, floor + spread].
  Mat spd(std::size_t n, double floor = 0.2, double spread = 2.0) {
    const EMat g = to_eigen(gaussian(n, n));
    Eigen::HouseholderQR<EMat> qr(g);
    const EMat u = qr.householderQ();
    Eigen::VectorXd d(n);
    for (std::size_t i = 0; i < n; ++i) d(i) = floor + uniform(0.0, spread);
    return from_eigen(u * d.asDiagonal() * u.transpose());
  }

  /// Random matrix rescaled to spectral radius rho.
  Mat with_radius(std::size_t n, double rho) {
    Mat g = gaussian(n, n);
    const double r = oracle::spectral_radius(g);
    if (r < 1e-8) return with_radius(n, rho);
    return (rho / r) * g;
  }

  /// Invertible T with 2-norm condition number <= cond.
  Mat conditioned(std::size_t n, double cond) {
    const EMat g1 = to_eigen(gaussian(n, n)), g2 = to_eigen(gaussian(n, n));
    const EMat u = Eigen::HouseholderQR<EMat>(g1).householderQ();
    const EMat v = Eigen::HouseholderQR<EMat>(g2).householderQ();
    Eigen::VectorXd s(n);
    const double lc = std::log(cond);
    for (std::size_t i = 0; i < n; ++i) s(i) = std::exp(uniform(0.0, lc));
    s(0) = 1.0;
    if (n > 1) s(1) = cond;
    for (std::size_t i = 0; i < n; ++i)
      if (normal() < 0) s(i) = -s(i);
    return from_eigen(u * s.asDiagonal() * v.transpose());
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct LqrInstance {
  Plant plant;
  Mat K;  // stabilizing, spectral radius of A + BK at most 0.95
};

/// Random plant (possibly open-loop unstable) with a random stabilizing gain,
/// obtained by perturbing the Riccati gain.
inline LqrInstance random_lqr_instance(Rand& rnd, std::size_t n, std::size_t m) {
  for (;;) {
    Plant p;
    p.A = rnd.with_radius(n, rnd.uniform(0.5, 1.3));
    p.B = rnd.gaussian(n, m);
    p.C = Mat::identity(n);
    p.Sigma = rnd.spd(n);
    p.W = rnd.spd(n);
    p.V = rnd.spd(n);
    p.Q = rnd.spd(n);
    p.R = rnd.spd(m);
    const auto [pstar, kstar] = riccati_oracle(p);
    if (!(oracle::spectral_radius(p.A + p.B * kstar) < 0.95)) continue;
    for (int tries = 0; tries < 50; ++tries) {
      const Mat k = kstar + rnd.uniform(0.0, 0.5) * rnd.gaussian(m, n);
      const double rho = oracle::spectral_radius(p.A + p.B * k);
      if (rho < 0.95) return LqrInstance{p, k};
    }
  }
}

/// Scalar-style LQG instance data with a stabilizing full-order controller.
struct LqgInstance {
  Plant plant;
  DynamicPolicy K;
};

inline LqgInstance random_lqg_instance(Rand& rnd, std::size_t n, std::size_t m, std::size_t p) {
  for (;;) {
    Plant pl;
    pl.A = rnd.with_radius(n, rnd.uniform(0.3, 0.9));
    pl.B = rnd.gaussian(n, m);
    pl.C = rnd.gaussian(p, n);
    pl.Sigma = Mat::identity(n);
    pl.W = rnd.spd(n);
    pl.V = rnd.spd(p);
    pl.Q = rnd.spd(n);
    pl.R = rnd.spd(m);
    DynamicPolicy kd{rnd.with_radius(n, rnd.uniform(0.2, 0.8)), 0.5 * rnd.gaussian(n, p),
                     0.5 * rnd.gaussian(m, n)};
    const Mat acl = polgeo::block2x2(pl.A, pl.B * kd.C_K, kd.B_K * pl.C, kd.A_K);
    if (oracle::spectral_radius(acl) < 0.95) return LqgInstance{pl, kd};
  }
}

/// Central-difference gradient of a scalar function of a matrix.
template <typename F>
Mat fd_gradient(F&& f, const Mat& x, double h) {
  Mat g(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Mat xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// Central-difference directional derivative of a matrix-valued function.
template <typename F>
Mat fd_directional(F&& f, const Mat& x, const Mat& v, double h) {
  return (1.0 / (2.0 * h)) * (f(x + h * v) - f(x - h * v));
}

inline double frob(const Mat& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

inline double rel_err(const Mat& got, const Mat& want) {
  return frob(got - want) / std::max(frob(want), 1e-300);
}

/// ||x_steps|| < ||x_0|| for a random start under x+ = A x.
inline bool trajectory_decays(const Mat& a, int steps, Rand& rnd) {
  const EMat ea = to_eigen(a);
  Eigen::VectorXd x(ea.rows());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rnd.normal();
  const double n0 = x.norm();
  for (int t = 0; t < steps; ++t) x = ea * x;
  return x.norm() < n0;
}

/// Long-run average LQG stage cost x^T Q x + u^T R u by simulation.
/// Returns (mean, standard error from batch means).
inline std::pair<double, double> lqg_monte_carlo(const Plant& pl, const DynamicPolicy& kd, long steps, Rand& rnd) {
  const EMat a = to_eigen(pl.A), b = to_eigen(pl.B), c = to_eigen(pl.C), q = to_eigen(pl.Q), r = to_eigen(pl.R);
  const EMat ak = to_eigen(kd.A_K), bk = to_eigen(kd.B_K), ck = to_eigen(kd.C_K);
  const EMat lw = to_eigen(pl.W).llt().matrixL();
  const EMat lv = to_eigen(pl.V).llt().matrixL();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.rows()), xi = Eigen::VectorXd::Zero(ak.rows());
  auto noise = [&](const EMat& l) {
    Eigen::VectorXd z(l.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rnd.normal();
    return Eigen::VectorXd(l * z);
  };
  for (int t = 0; t < 2000; ++t) {
    const Eigen::VectorXd u = ck * xi;
    const Eigen::VectorXd y = c * x + noise(lv);
    x = a * x + b * u + noise(lw);
    xi = ak * xi + bk * y;
  }
  const long batches = 100;
  const long per = steps / batches;
  std::vector<double> means;
  for (long bidx = 0; bidx < batches; ++bidx) {
    double acc = 0.0;
    for (long t = 0; t < per; ++t) {
      const Eigen::VectorXd u = ck * xi;
      acc += x.dot(q * x) + u.dot(r * u);
      const Eigen::VectorXd y = c * x + noise(lv);
      x = a * x + b * u + noise(lw);
      xi = ak * xi + bk * y;
    }
    means.push_back(acc / static_cast<double>(per));
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(batches);
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(batches - 1);
  return {mean, std::sqrt(var / static_cast<double>(batches))};
}

/// H-infinity cost by a dense frequency sweep with Eigen's Hermitian eigensolver.
inline double hinf_brute(const Plant& pl, const Mat& k, int grid) {
  const EMat acl = to_eigen(pl.A + pl.B * k);
  const EMat w = to_eigen(pl.Q + polgeo::transpose(k) * pl.R * k);
  const Eigen::Index n = acl.rows();
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double om = M_PI * i / (grid - 1);
    const CEMat shifted = std::polar(1.0, om) * CEMat::Identity(n, n) - acl.cast<std::complex<double>>();
    const CEMat m = shifted.inverse();
    const CEMat h = m.adjoint() * w.cast<std::complex<double>>() * m;
    Eigen::SelfAdjointEigenSolver<CEMat> es(h, Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().maxCoeff());
  }
  return best;
}

}  // namespace oracle
