#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "polgeo/policy.hpp"

namespace polgeo::cli {

using Json = nlohmann::ordered_json;

enum class Task {
  kLqrGd,
  kHewer,
  kStructuredGd,
  kLqgGd,
  kLqgRgd,
  kHinfEval,
  kHinfDescent,
  kZoGd,
  kLandscape,
  kConnectivity,
  kDare,
};

/// Accepts '-' in place of '_' (e.g. "hinf-eval").
std::optional<Task> task_from_string(std::string_view name);
std::string_view to_string(Task task) noexcept;

struct StepConfig {
  std::string rule = "certificate";  // "certificate" | "fixed"
  double value = 1.0;                // cap or eta; fixed eta <= 0 selects the engine default

  bool operator==(const StepConfig&) const = default;
};

struct StopConfig {
  double tol = 1e-8;
  int max_iter = 1000;

  bool operator==(const StopConfig&) const = default;
};

struct ConstraintConfig {
  std::string type = "sparsity";  // "sparsity" (matrix = mask) | "output_feedback" (matrix = C)
  Mat matrix;

  bool operator==(const ConstraintConfig&) const = default;
};

/// Fully resolved experiment: every option carries its default when absent
/// from the file, so the echo in summary.json re-parses to an equal value.
struct ExperimentConfig {
  Task task = Task::kLqrGd;
  std::uint64_t seed = 0;
  Plant plant;

  Mat K0;                  // static tasks; default zero
  DynamicPolicy policy;    // LQG tasks and the "lqg" landscape; default zero policy of order n
  std::string direction = "euclidean";
  StepConfig step;
  StopConfig stop;

  std::optional<ConstraintConfig> constraint;  // structured_gd
  std::string metric = "lyapunov";             // structured_gd: "frobenius" | "lyapunov"
  double w1 = 1.0, w2 = 1.0, w3 = 1.0;        // lqg_rgd

  std::size_t grid = 2048;
  double refine_tol = 1e-10;
  int samples = 0;
  double radius = 0.0;
  double min_radius = 0.0;

  double epsilon = 0.0;
  std::string estimator = "two_point";

  std::string cost = "lqr";  // landscape: "lqr" | "hinf" | "lqg"
  Mat dir1, dir2;            // landscape directions; default unit matrices
  double s_lo = -1.0, s_hi = 1.0, t_lo = -1.0, t_hi = 1.0;
  std::size_t resolution = 41;

  std::string region = "lqg";  // connectivity: "lqg" | "lqr"
  std::vector<std::pair<double, double>> box;
  std::string adjacency = "edge";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Every violation found, each as "<field path>: <message>".
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Parses and validates. `task_override` (from the command line) must agree
/// with a "task" key when both are present; `source` names the input in messages.
ExperimentConfig parse_config(const std::string& text, std::optional<Task> task_override = std::nullopt,
                              const std::string& source = "<config>");
ExperimentConfig parse_config_file(const std::string& path, std::optional<Task> task_override = std::nullopt);

Json to_json(const ExperimentConfig& cfg);
Json matrix_to_json(const Mat& m);

/// Default values of every tunable, echoed into summary.json.
Json defaults_table();

}  // namespace polgeo::cli
