#include "polgeo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <sstream>

#include "polgeo/lyapunov.hpp"

namespace polgeo {

namespace {

std::string dims(const Mat& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void check_shape(std::vector<std::string>& out, const char* name, const Mat& m, std::size_t r, std::size_t c) {
  if (m.rows() != r || m.cols() != c) {
    out.push_back(std::string(name) + ": expected " + std::to_string(r) + "x" + std::to_string(c) + ", got " +
                  dims(m));
  }
}

void check_definite(std::vector<std::string>& out, const char* name, const Mat& m, bool strict) {
  if (!is_symmetric(m)) {
    out.push_back(std::string(name) + ": not symmetric");
    return;
  }
  const double lmin = sym_lambda_min(m);
  if (strict ? !(lmin > 0.0) : lmin < -tol::kStructural) {
    std::ostringstream os;
    os << name << ": not positive " << (strict ? "definite" : "semidefinite") << " (min eigenvalue " << lmin << ")";
    out.push_back(os.str());
  }
}

}  // namespace

std::vector<std::string> plant_violations(const Plant& plant) {
  std::vector<std::string> out;
  const std::size_t n = plant.A.rows();
  if (!plant.A.is_square() || n == 0) {
    out.push_back("A: must be square and non-empty, got " + dims(plant.A));
    return out;
  }
  const std::size_t m = plant.B.cols();
  const std::size_t p = plant.C.rows();
  check_shape(out, "B", plant.B, n, m);
  if (m == 0) out.push_back("B: must have at least one column");
  check_shape(out, "C", plant.C, p, n);
  if (p == 0) out.push_back("C: must have at least one row");
  check_shape(out, "Sigma", plant.Sigma, n, n);
  check_shape(out, "W", plant.W, n, n);
  check_shape(out, "V", plant.V, p, p);
  check_shape(out, "Q", plant.Q, n, n);
  check_shape(out, "R", plant.R, m, m);
  if (!out.empty()) return out;
  check_definite(out, "Sigma", plant.Sigma, true);
  check_definite(out, "W", plant.W, false);
  check_definite(out, "V", plant.V, true);
  check_definite(out, "Q", plant.Q, false);
  check_definite(out, "R", plant.R, true);
  return out;
}

void validate_plant(const Plant& plant) {
  const auto v = plant_violations(plant);
  if (v.empty()) return;
  std::string msg = "invalid plant:";
  for (const auto& s : v) msg += " " + s + ";";
  raise(ErrorKind::kContract, msg);
}

Plant scalar_plant(double a, double b, double c, double q, double r, double sigma, double w, double v) {
  return Plant{Mat::scalar(a), Mat::scalar(b), Mat::scalar(c), Mat::scalar(sigma),
               Mat::scalar(w), Mat::scalar(v), Mat::scalar(q), Mat::scalar(r)};
}

Plant identity_weighted_plant(Mat a, Mat b) {
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  return Plant{std::move(a), std::move(b), Mat::identity(n), Mat::identity(n),
               Mat::identity(n), Mat::identity(n), Mat::identity(n), Mat::identity(m)};
}

StaticGain StaticGain::certify(const Plant& plant, Mat k) {
  if (!is_stabilizing_static(plant, k)) {
    raise(ErrorKind::kInfeasible, "gain is not stabilizing (rho(A+BK) = " +
                                      std::to_string(spectral_radius(closed_loop_static(plant, k))) + ")");
  }
  return StaticGain(std::move(k), true);
}

// ---------------------------------------------------------------------------
// Constraint subspaces

ConstraintSubspace ConstraintSubspace::sparsity(const Mat& mask) {
  std::vector<Mat> basis;
  for (std::size_t i = 0; i < mask.rows(); ++i)
    for (std::size_t j = 0; j < mask.cols(); ++j)
      if (mask(i, j) != 0.0) basis.push_back(Mat::unit(mask.rows(), mask.cols(), i, j));
  if (basis.empty()) raise(ErrorKind::kContract, "sparsity mask allows no entries");
  return ConstraintSubspace(SparsityPattern{mask}, std::move(basis), mask.rows(), mask.cols());
}

ConstraintSubspace ConstraintSubspace::output_feedback(const Mat& cout, std::size_t inputs) {
  const std::size_t d = cout.rows();
  const std::size_t n = cout.cols();
  if (d == 0 || n == 0 || inputs == 0) raise(ErrorKind::kDimension, "output_feedback: empty Cout");
  // Modified Gram-Schmidt on the rows.
  Mat q = cout;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += q(i, j) * q(k, j);
      for (std::size_t j = 0; j < n; ++j) q(i, j) -= dot * q(k, j);
    }
    double nrm = 0.0;
    for (std::size_t j = 0; j < n; ++j) nrm += q(i, j) * q(i, j);
    nrm = std::sqrt(nrm);
    if (nrm <= 1e-10 * (1.0 + frobenius_norm(cout))) {
      raise(ErrorKind::kContract, "output_feedback: Cout does not have full row rank");
    }
    for (std::size_t j = 0; j < n; ++j) q(i, j) /= nrm;
  }
  std::vector<Mat> basis;
  for (std::size_t i = 0; i < inputs; ++i) {
    for (std::size_t r = 0; r < d; ++r) {
      Mat e(inputs, n);
      for (std::size_t j = 0; j < n; ++j) e(i, j) = q(r, j);
      basis.push_back(std::move(e));
    }
  }
  return ConstraintSubspace(OutputFeedback{cout}, std::move(basis), inputs, n);
}

ConstraintSubspace ConstraintSubspace::full(std::size_t rows, std::size_t cols) {
  Mat mask(rows, cols);
  for (auto& v : mask.data()) v = 1.0;
  return sparsity(mask);
}

bool ConstraintSubspace::contains(const Mat& k, double tol) const {
  if (k.rows() != rows_ || k.cols() != cols_) return false;
  if (const auto* sp = std::get_if<SparsityPattern>(&kind_)) {
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (sp->mask(i, j) == 0.0 && std::abs(k(i, j)) > tol) return false;
    return true;
  }
  // Orthonormal basis: residual of the Frobenius projection.
  Mat proj(rows_, cols_);
  for (const auto& e : basis_) proj += frobenius_inner(e, k) * e;
  return frobenius_norm(k - proj) <= tol * (1.0 + frobenius_norm(k)) * 1e2;
}

void validate_km_weights(const KmMetric& w) {
  if (!(w.w1 > 0.0) || !(w.w2 >= 0.0) || !(w.w3 >= 0.0)) {
    raise(ErrorKind::kContract, "KM weights require w1 > 0 and w2, w3 >= 0");
  }
}

// ---------------------------------------------------------------------------
// Stability

Mat closed_loop_static(const Plant& plant, const Mat& k) {
  if (k.rows() != plant.m() || k.cols() != plant.n()) {
    raise(ErrorKind::kDimension, "gain has shape " + dims(k) + ", expected " + std::to_string(plant.m()) + "x" +
                                     std::to_string(plant.n()));
  }
  return plant.A + plant.B * k;
}

Mat closed_loop_dynamic(const Plant& plant, const DynamicPolicy& kd) {
  const std::size_t q = kd.order();
  if (!kd.A_K.is_square() || kd.B_K.rows() != q || kd.B_K.cols() != plant.p() || kd.C_K.rows() != plant.m() ||
      kd.C_K.cols() != q) {
    raise(ErrorKind::kDimension, "dynamic policy shapes do not match the plant");
  }
  return block2x2(plant.A, plant.B * kd.C_K, kd.B_K * plant.C, kd.A_K);
}

bool is_stabilizing_static(const Plant& plant, const Mat& k) {
  return spectral_radius(closed_loop_static(plant, k)) < 1.0 - tol::kStabilityMargin;
}

bool is_stabilizing_dynamic(const Plant& plant, const DynamicPolicy& kd) {
  return spectral_radius(closed_loop_dynamic(plant, kd)) < 1.0 - tol::kStabilityMargin;
}

double stability_certificate(const Plant& plant, const StaticGain& k, const Mat& v) {
  if (!k.certified()) raise(ErrorKind::kContract, "stability_certificate: gain is not certified");
  const double bv = spectral_norm(plant.B * v);
  if (bv == 0.0) return std::numeric_limits<double>::infinity();
  const Mat acl = closed_loop_static(plant, k.K());
  const Mat l = lyap(transpose(acl), Mat::identity(plant.n()));
  return 1.0 / (2.0 * sym_lambda_max(symmetrize(l)) * bv);
}

StaticGain certified_step(const Plant& plant, const StaticGain& k, const Mat& v, double eta_cap) {
  const double s = stability_certificate(plant, k, v);
  const double eta = std::min(eta_cap, s);
  if (eta == 0.0 || max_abs(v) == 0.0) return k;
  if (!std::isfinite(eta)) raise(ErrorKind::kContract, "certified_step: unbounded step needs a finite cap");
  Mat next = k.K() + eta * v;
  if (!is_stabilizing_static(plant, next)) {
    raise(ErrorKind::kInternalInvariant, "certified step left the stabilizing set");
  }
  return StaticGain::certify(plant, std::move(next));
}

// ---------------------------------------------------------------------------
// Scans

double grid_point(double lo, double hi, std::size_t resolution, std::size_t i) {
  if (resolution <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1);
}

ConnectivityResult connectivity_scan(const Membership& member, std::span<const std::pair<double, double>> box,
                                     std::size_t resolution, Adjacency adjacency) {
  const std::size_t d = box.size();
  if (d == 0 || d > 4) raise(ErrorKind::kContract, "connectivity_scan: dimension must be 1..4");
  if (resolution < 8) raise(ErrorKind::kContract, "connectivity_scan: resolution below 8 is meaningless");

  ConnectivityResult res;
  res.resolution.assign(d, resolution);
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) total *= resolution;

  std::vector<std::size_t> stride(d);
  stride[d - 1] = 1;
  for (std::size_t a = d - 1; a-- > 0;) stride[a] = stride[a + 1] * resolution;

  std::vector<char> feasible(total, 0);
  std::vector<double> point(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t i = rem / stride[a];
      rem %= stride[a];
      point[a] = grid_point(box[a].first, box[a].second, resolution, i);
    }
    feasible[idx] = member(point) ? 1 : 0;
  }

  const int max_nonzero = adjacency == Adjacency::kFace ? 1 : adjacency == Adjacency::kEdge ? 2 : static_cast<int>(d);
  std::vector<std::vector<int>> offsets;
  std::size_t combos = 1;
  for (std::size_t a = 0; a < d; ++a) combos *= 3;
  for (std::size_t c = 0; c < combos; ++c) {
    std::vector<int> off(d);
    std::size_t rem = c;
    int nonzero = 0;
    for (std::size_t a = 0; a < d; ++a) {
      off[a] = static_cast<int>(rem % 3) - 1;
      rem /= 3;
      if (off[a] != 0) ++nonzero;
    }
    if (nonzero >= 1 && nonzero <= max_nonzero) offsets.push_back(std::move(off));
  }

  res.labels.assign(total, 0);
  std::vector<std::size_t> coord(d);
  std::deque<std::size_t> queue;
  int label = 0;
  for (std::size_t seed = 0; seed < total; ++seed) {
    if (!feasible[seed] || res.labels[seed] != 0) continue;
    ++label;
    std::size_t size = 0;
    res.labels[seed] = label;
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      ++size;
      std::size_t rem = cur;
      for (std::size_t a = 0; a < d; ++a) {
        coord[a] = rem / stride[a];
        rem %= stride[a];
      }
      for (const auto& off : offsets) {
        std::size_t nb = 0;
        bool inside = true;
        for (std::size_t a = 0; a < d; ++a) {
          const long c = static_cast<long>(coord[a]) + off[a];
          if (c < 0 || c >= static_cast<long>(resolution)) {
            inside = false;
            break;
          }
          nb += static_cast<std::size_t>(c) * stride[a];
        }
        if (inside && feasible[nb] && res.labels[nb] == 0) {
          res.labels[nb] = label;
          queue.push_back(nb);
        }
      }
    }
    res.component_sizes.push_back(size);
  }
  res.components = label;
  return res;
}

LandscapeGrid landscape_slice(const CostFn& costfn, const Mat& origin, const Mat& dir1, const Mat& dir2,
                              const SliceBox& box, std::size_t resolution) {
  if (dir1.rows() != origin.rows() || dir1.cols() != origin.cols() || dir2.rows() != origin.rows() ||
      dir2.cols() != origin.cols()) {
    raise(ErrorKind::kDimension, "landscape_slice: directions must match the origin shape");
  }
  if (numerical_rank(hstack(vec(dir1), vec(dir2)), 1e-12) < 2) {
    raise(ErrorKind::kContract, "landscape_slice: directions are linearly dependent");
  }
  if (resolution < 2) raise(ErrorKind::kContract, "landscape_slice: resolution must be at least 2");
  LandscapeGrid grid;
  for (std::size_t i = 0; i < resolution; ++i) {
    grid.s.push_back(grid_point(box.s_lo, box.s_hi, resolution, i));
    grid.t.push_back(grid_point(box.t_lo, box.t_hi, resolution, i));
  }
  grid.values.reserve(resolution * resolution);
  for (double s : grid.s) {
    for (double t : grid.t) grid.values.push_back(costfn(origin + s * dir1 + t * dir2));
  }
  return grid;
}

void write_grid_csv(std::ostream& out, const LandscapeGrid& grid) {
  out << "s,t,value\n";
  char buf[96];
  for (std::size_t i = 0; i < grid.s.size(); ++i) {
    for (std::size_t j = 0; j < grid.t.size(); ++j) {
      const auto& v = grid.values[i * grid.t.size() + j];
      if (v && std::isfinite(*v)) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.s[i], grid.t[j], *v);
      } else {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,inf\n", grid.s[i], grid.t[j]);
      }
      out << buf;
    }
  }
}

RayProbe coercivity_probe(const Plant& plant, const Mat& k0, const Mat& v, const CostFn& cost, double threshold,
                          double rho_margin, double norm_cap) {
  RayProbe probe;
  const double vn = frobenius_norm(v);
  if (vn == 0.0) raise(ErrorKind::kContract, "coercivity_probe: zero direction");
  auto rho_at = [&](double t) { return spectral_radius(closed_loop_static(plant, k0 + t * v)); };
  auto record = [&](double t) {
    const Mat k = k0 + t * v;
    const auto c = cost(k);
    const double val = c ? *c : std::numeric_limits<double>::infinity();
    if (!probe.costs.empty() && val < probe.costs.back()) probe.nondecreasing_tail = false;
    probe.costs.push_back(val);
    probe.max_cost = std::max(probe.max_cost, val);
    probe.rho_at_exit = spectral_radius(closed_loop_static(plant, k));
    probe.norm_at_exit = frobenius_norm(k);
    if (val > threshold) probe.exceeded = true;
    return probe.exceeded;
  };

  // Bracket the first exit from the stabilizing set, if any, before the norm cap.
  double t_lo = 0.0;
  double t = 1e-3 * (1.0 + frobenius_norm(k0)) / vn;
  double t_hi = -1.0;
  while (frobenius_norm(k0 + t * v) < norm_cap) {
    if (!(rho_at(t) < 1.0)) {
      t_hi = t;
      break;
    }
    t_lo = t;
    t *= 2.0;
  }

  if (t_hi < 0.0) {
    for (double s = std::max(t_lo, 1.0 / vn);; s *= 2.0) {
      if (frobenius_norm(k0 + s * v) >= norm_cap) {
        record(s);
        break;
      }
      if (record(s)) break;
    }
    return probe;
  }

  probe.hit_boundary = true;
  for (double delta = 1e-1; delta >= rho_margin * (1.0 - 1e-9); delta *= 0.1) {
    const double target = 1.0 - delta;
    double lo = t_lo;
    double hi = t_hi;
    if (!(rho_at(lo) < target)) {
      if (record(lo)) break;
      continue;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (rho_at(mid) < target ? lo : hi) = mid;
    }
    t_lo = lo;
    if (record(lo)) break;
  }
  return probe;
}

}  // namespace polgeo
