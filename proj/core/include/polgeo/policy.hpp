#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "polgeo/descent.hpp"
#include "polgeo/numerics.hpp"

namespace polgeo {

/// LTI plant x+ = Ax + Bu + w, y = Cx + v with cost weights and noise data.
struct Plant {
  Mat A;      // n x n
  Mat B;      // n x m
  Mat C;      // p x n
  Mat Sigma;  // n x n, SPD initial-state / noise covariance (LQR)
  Mat W;      // n x n, PSD process noise (LQG)
  Mat V;      // p x p, SPD measurement noise (LQG)
  Mat Q;      // n x n, PSD
  Mat R;      // m x m, SPD

  std::size_t n() const noexcept { return A.rows(); }
  std::size_t m() const noexcept { return B.cols(); }
  std::size_t p() const noexcept { return C.rows(); }

  bool operator==(const Plant&) const = default;
};

/// All violated plant invariants, each prefixed with its field name. Empty when valid.
std::vector<std::string> plant_violations(const Plant& plant);
/// Throws kContract listing every violation.
void validate_plant(const Plant& plant);

/// Single-state plant with every weight and covariance scalar.
Plant scalar_plant(double a, double b, double c = 1.0, double q = 1.0, double r = 1.0, double sigma = 1.0,
                   double w = 1.0, double v = 1.0);

/// Plant with C, Sigma, W, V, Q, R all identity of the matching size.
Plant identity_weighted_plant(Mat a, Mat b);

/// Static state feedback u = Kx.
class StaticGain {
 public:
  StaticGain() = default;

  /// Verifies rho(A + BK) < 1 - margin; throws kInfeasible otherwise.
  static StaticGain certify(const Plant& plant, Mat k);
  static StaticGain uncertified(Mat k) { return StaticGain(std::move(k), false); }

  const Mat& K() const noexcept { return k_; }
  bool certified() const noexcept { return certified_; }

 private:
  StaticGain(Mat k, bool certified) : k_(std::move(k)), certified_(certified) {}

  Mat k_;
  bool certified_ = false;
};

/// Dynamic output feedback xi+ = A_K xi + B_K y, u = C_K xi.
struct DynamicPolicy {
  Mat A_K;  // q x q
  Mat B_K;  // q x p
  Mat C_K;  // m x q

  std::size_t order() const noexcept { return A_K.rows(); }

  bool operator==(const DynamicPolicy&) const = default;
};

/// Sparsity pattern: mask(i, j) != 0 marks a free entry.
struct SparsityPattern {
  Mat mask;
};

/// K = L * Cout for some L.
struct OutputFeedback {
  Mat Cout;
};

/// Linear subspace of m x n gains with an explicit basis.
class ConstraintSubspace {
 public:
  static ConstraintSubspace sparsity(const Mat& mask);
  /// Basis e_i f_j^T Cout' where Cout' has orthonormalized rows. `inputs` is m.
  static ConstraintSubspace output_feedback(const Mat& cout, std::size_t inputs);
  static ConstraintSubspace full(std::size_t rows, std::size_t cols);

  const std::variant<SparsityPattern, OutputFeedback>& kind() const noexcept { return kind_; }
  const std::vector<Mat>& basis() const noexcept { return basis_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t dim() const noexcept { return basis_.size(); }

  /// Membership within tol (exact zeros outside the mask for sparsity).
  bool contains(const Mat& k, double tol = 1e-12) const;

 private:
  ConstraintSubspace(std::variant<SparsityPattern, OutputFeedback> kind, std::vector<Mat> basis, std::size_t rows,
                     std::size_t cols)
      : kind_(std::move(kind)), basis_(std::move(basis)), rows_(rows), cols_(cols) {}

  std::variant<SparsityPattern, OutputFeedback> kind_;
  std::vector<Mat> basis_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

struct FrobeniusMetric {};
/// <V, W>_K = tr(V^T W Y_K), Y_K = L(A + BK, Sigma).
struct LyapunovMetric {};
struct KmMetric {
  double w1 = 1.0;
  double w2 = 1.0;
  double w3 = 1.0;
};

using MetricChoice = std::variant<FrobeniusMetric, LyapunovMetric, KmMetric>;

/// Throws kContract unless w1 > 0 and w2, w3 >= 0.
void validate_km_weights(const KmMetric& w);

Mat closed_loop_static(const Plant& plant, const Mat& k);
/// [[A, B C_K], [B_K C, A_K]].
Mat closed_loop_dynamic(const Plant& plant, const DynamicPolicy& kd);

bool is_stabilizing_static(const Plant& plant, const Mat& k);
bool is_stabilizing_dynamic(const Plant& plant, const DynamicPolicy& kd);

/// s_K(V) = 1 / (2 lambda_max(L(A_cl^T, I)) ||B V||_2); +infinity when BV = 0.
double stability_certificate(const Plant& plant, const StaticGain& k, const Mat& v);

/// K + min(eta_cap, s_K(V)) V, re-certified. Throws kInternalInvariant if the
/// certified step is not stabilizing.
StaticGain certified_step(const Plant& plant, const StaticGain& k, const Mat& v, double eta_cap);

// ---------------------------------------------------------------------------
// Desk-scale scans

enum class Adjacency {
  kFace,    // neighbours differ by one step in one coordinate
  kEdge,    // ... in at most two coordinates
  kVertex,  // ... in any subset of coordinates
};

struct ConnectivityResult {
  int components = 0;
  std::vector<std::size_t> resolution;
  /// Row-major over axes (axis 0 slowest); 0 = infeasible, otherwise 1-based component id.
  std::vector<int> labels;
  std::vector<std::size_t> component_sizes;
};

using Membership = std::function<bool(std::span<const double>)>;

/// Rasterizes the box at `resolution` points per axis (endpoints included),
/// marks feasible points and counts connected components. Dimension <= 4;
/// resolution < 8 is refused with kContract.
ConnectivityResult connectivity_scan(const Membership& member, std::span<const std::pair<double, double>> box,
                                     std::size_t resolution, Adjacency adjacency = Adjacency::kEdge);

/// Grid coordinate of index i on [lo, hi] with `resolution` points.
double grid_point(double lo, double hi, std::size_t resolution, std::size_t i);

struct LandscapeGrid {
  std::vector<double> s;
  std::vector<double> t;
  std::vector<std::optional<double>> values;  // values[i * t.size() + j] at (s[i], t[j])
};

struct SliceBox {
  double s_lo = -1.0, s_hi = 1.0;
  double t_lo = -1.0, t_hi = 1.0;
};

/// costfn(origin + s dir1 + t dir2) over a resolution x resolution grid.
LandscapeGrid landscape_slice(const CostFn& costfn, const Mat& origin, const Mat& dir1, const Mat& dir2,
                              const SliceBox& box, std::size_t resolution);

/// CSV with header "s,t,value"; infeasible cells are written as "inf".
void write_grid_csv(std::ostream& out, const LandscapeGrid& grid);

struct RayProbe {
  bool exceeded = false;        // cost passed the threshold before an exit condition
  bool hit_boundary = false;    // the ray leaves the stabilizing set
  double max_cost = 0.0;
  double rho_at_exit = 0.0;
  double norm_at_exit = 0.0;
  bool nondecreasing_tail = true;  // costs at the probe points never decreased
  std::vector<double> costs;
};

/// Walks K(t) = K0 + tV outward. If the ray reaches the stability boundary, the
/// probe points are where rho(A_cl) = 1 - 10^-j for j = 1..; otherwise t doubles
/// until ||K|| reaches norm_cap. Stops once the cost exceeds `threshold`, rho
/// reaches 1 - rho_margin, or ||K|| reaches norm_cap.
RayProbe coercivity_probe(const Plant& plant, const Mat& k0, const Mat& v, const CostFn& cost, double threshold,
                          double rho_margin, double norm_cap);

}  // namespace polgeo
