#include "run.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include "polgeo/hinf.hpp"
#include "polgeo/lqg.hpp"
#include "polgeo/lqr.hpp"
#include "polgeo/rng.hpp"
#include "polgeo/structured.hpp"
#include "polgeo/zeroth.hpp"

namespace polgeo::cli {

namespace {

struct Outcome {
  Trace trace;
  Json result = Json::object();
};

StepRule step_rule(const StepConfig& s) {
  if (s.rule == "fixed") return FixedStep{s.value};
  return CertificateStep{s.value};
}

StopRule stop_rule(const StopConfig& s) { return StopRule{s.tol, s.max_iter}; }

Json policy_to_json(const DynamicPolicy& kd) {
  return {{"A_K", matrix_to_json(kd.A_K)}, {"B_K", matrix_to_json(kd.B_K)}, {"C_K", matrix_to_json(kd.C_K)}};
}

void describe_trace(Json& result, const Trace& trace) {
  if (trace.empty()) return;
  const IterTrace& last = trace.back();
  result["J"] = last.J;
  result["grad_norm"] = last.grad_norm;
  result["iterations"] = last.iter;
  result["rho"] = last.rho;
}

std::optional<double> lqr_cost(const Plant& plant, const Mat& k) {
  if (!is_stabilizing_static(plant, k)) return std::nullopt;
  return lqr_eval(plant, StaticGain::certify(plant, k)).J;
}

std::optional<double> hinf_cost_of(const Plant& plant, const Mat& k, const ExperimentConfig& c) {
  if (!is_stabilizing_static(plant, k)) return std::nullopt;
  return hinf_cost(plant, StaticGain::certify(plant, k), c.grid, c.refine_tol).J;
}

// A dynamic policy of order q packed as [[A_K, B_K], [C_K, 0]].
Mat pack(const DynamicPolicy& kd, std::size_t m, std::size_t p) {
  return block2x2(kd.A_K, kd.B_K, kd.C_K, Mat(m, p));
}

DynamicPolicy unpack(const Mat& x, std::size_t q) {
  const std::size_t p = x.cols() - q;
  const std::size_t m = x.rows() - q;
  return DynamicPolicy{x.block(0, 0, q, q), x.block(0, q, q, p), x.block(q, 0, m, q)};
}

DynamicPolicy policy_from_point(std::span<const double> x, std::size_t q, std::size_t p, std::size_t m) {
  std::size_t at = 0;
  auto take = [&](std::size_t r, std::size_t c) {
    Mat out(r, c, std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(at),
                                      x.begin() + static_cast<std::ptrdiff_t>(at + r * c)));
    at += r * c;
    return out;
  };
  Mat a = take(q, q);
  Mat b = take(q, p);
  Mat c = take(m, q);
  return DynamicPolicy{std::move(a), std::move(b), std::move(c)};
}

Outcome run_static_descent(const ExperimentConfig& c) {
  const StaticGain k0 = StaticGain::certify(c.plant, c.K0);
  LqrRun run;
  if (c.task == Task::kStructuredGd) {
    const ConstraintSubspace sub = c.constraint->type == "sparsity"
                                       ? ConstraintSubspace::sparsity(c.constraint->matrix)
                                       : ConstraintSubspace::output_feedback(c.constraint->matrix, c.plant.m());
    const MetricChoice metric = c.metric == "frobenius" ? MetricChoice{FrobeniusMetric{}} : MetricChoice{LyapunovMetric{}};
    run = structured_gd_run(c.plant, k0, sub, metric, step_rule(c.step), stop_rule(c.stop));
  } else {
    LqrDirection dir = LqrDirection::kEuclidean;
    if (c.direction == "riemannian") dir = LqrDirection::kRiemannian;
    if (c.direction == "pseudo_newton") dir = LqrDirection::kPseudoNewton;
    if (c.direction == "quasi_newton") dir = LqrDirection::kQuasiNewton;
    run = gd_run(c.plant, k0, dir, step_rule(c.step), stop_rule(c.stop));
  }
  Outcome out{run.trace, Json::object()};
  describe_trace(out.result, out.trace);
  out.result["K"] = matrix_to_json(run.K.K());
  return out;
}

Outcome run_hewer(const ExperimentConfig& c) {
  StaticGain k = StaticGain::certify(c.plant, c.K0);
  Outcome out;
  for (int iter = 0;; ++iter) {
    const LqrEval ev = lqr_eval(c.plant, k);
    const double g = frobenius_norm(lqr_grad_riemannian(c.plant, k, ev));
    out.trace.push_back(IterTrace{iter, ev.J, g, iter == 0 ? 0.0 : 1.0, spectral_radius(ev.A_cl)});
    if (g <= c.stop.tol || iter >= c.stop.max_iter) break;
    k = hewer_step(c.plant, k);
  }
  describe_trace(out.result, out.trace);
  out.result["K"] = matrix_to_json(k.K());
  return out;
}

Outcome run_lqg(const ExperimentConfig& c) {
  const LqgMode mode = c.task == Task::kLqgRgd ? LqgMode{KmMetric{c.w1, c.w2, c.w3}} : LqgMode{EuclideanMode{}};
  if (!is_stabilizing_dynamic(c.plant, c.policy)) {
    raise(ErrorKind::kInfeasible, "initial policy is not stabilizing");
  }
  if (c.task == Task::kLqgRgd && !is_minimal(c.policy)) {
    raise(ErrorKind::kInfeasible, "initial policy is not minimal, so the KM metric is undefined there");
  }
  const LqgRun run = lqg_gd_run(c.plant, c.policy, mode, step_rule(c.step), stop_rule(c.stop));
  Outcome out{run.trace, Json::object()};
  describe_trace(out.result, out.trace);
  out.result["policy"] = policy_to_json(run.K);
  out.result["minimal"] = run.minimal;
  return out;
}

Outcome run_hinf_eval(const ExperimentConfig& c) {
  const HinfEval e = hinf_cost(c.plant, StaticGain::certify(c.plant, c.K0), c.grid, c.refine_tol);
  Outcome out;
  out.result["J"] = e.J;
  out.result["omega_star"] = e.omega_star;
  out.result["grid_size"] = e.grid_size;
  out.result["refined"] = e.refined;
  return out;
}

Outcome run_hinf_descent(const ExperimentConfig& c) {
  HinfDescentConfig hc;
  hc.samples = c.samples;
  hc.radius = c.radius;
  hc.min_radius = c.min_radius;
  hc.grid = c.grid;
  hc.refine_tol = c.refine_tol;
  hc.seed = c.seed;
  const HinfRun run =
      hinf_descent_run(c.plant, StaticGain::certify(c.plant, c.K0), hc, step_rule(c.step), stop_rule(c.stop));
  Outcome out{run.trace, Json::object()};
  describe_trace(out.result, out.trace);
  out.result["K"] = matrix_to_json(run.K.K());
  out.result["final_radius"] = run.final_radius;
  return out;
}

Outcome run_zo(const ExperimentConfig& c) {
  StaticGain::certify(c.plant, c.K0);
  ZoConfig zc;
  zc.epsilon = c.epsilon;
  zc.samples = c.samples;
  zc.seed = c.seed;
  zc.estimator = c.estimator == "one_point"  ? ZoEstimator::kOnePoint
                 : c.estimator == "baseline" ? ZoEstimator::kBaseline
                                             : ZoEstimator::kTwoPoint;
  const Plant& plant = c.plant;
  const CostFn cost = [&](const Mat& k) { return lqr_cost(plant, k); };
  const Feasibility feasible = [&](const Mat& k) { return is_stabilizing_static(plant, k); };
  const auto rho = [&](const Mat& k) { return spectral_radius(closed_loop_static(plant, k)); };
  const ZoRun run = zo_gd_run(cost, feasible, c.K0, zc, step_rule(c.step), stop_rule(c.stop), rho);
  Outcome out{run.trace, Json::object()};
  describe_trace(out.result, out.trace);
  out.result["K"] = matrix_to_json(run.theta);
  out.result["estimator"] = std::string(to_string(zc.estimator));
  return out;
}

Outcome run_dare(const ExperimentConfig& c) {
  const DareSolution s = dare_solve(c.plant);
  Outcome out;
  out.result["J"] = lqr_eval(c.plant, s.K).J;
  out.result["P"] = matrix_to_json(s.P);
  out.result["K"] = matrix_to_json(s.K.K());
  out.result["iterations"] = s.iterations;
  return out;
}

Outcome run_landscape(const ExperimentConfig& c, const std::filesystem::path& dir) {
  const Plant& plant = c.plant;
  const std::size_t q = c.policy.order();
  CostFn cost;
  Mat origin = c.K0;
  if (c.cost == "lqr") {
    cost = [&](const Mat& k) { return lqr_cost(plant, k); };
  } else if (c.cost == "hinf") {
    cost = [&](const Mat& k) { return hinf_cost_of(plant, k, c); };
  } else {
    origin = pack(c.policy, plant.m(), plant.p());
    cost = [&plant, q](const Mat& x) -> std::optional<double> {
      const DynamicPolicy kd = unpack(x, q);
      if (!is_stabilizing_dynamic(plant, kd)) return std::nullopt;
      return lqg_eval(plant, kd).J;
    };
  }
  const LandscapeGrid grid =
      landscape_slice(cost, origin, c.dir1, c.dir2, SliceBox{c.s_lo, c.s_hi, c.t_lo, c.t_hi}, c.resolution);
  std::ofstream csv(dir / "grid.csv");
  write_grid_csv(csv, grid);
  Outcome out;
  std::size_t feasible = 0;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    if (!grid.values[i]) continue;
    ++feasible;
    if (!best || *grid.values[i] < *grid.values[*best]) best = i;
  }
  out.result["resolution"] = c.resolution;
  out.result["cells"] = grid.values.size();
  out.result["feasible_cells"] = feasible;
  if (best) {
    out.result["min_value"] = *grid.values[*best];
    out.result["argmin"] = {{"s", grid.s[*best / grid.t.size()]}, {"t", grid.t[*best % grid.t.size()]}};
  }
  return out;
}

Outcome run_connectivity(const ExperimentConfig& c, const std::filesystem::path& dir) {
  const Plant& plant = c.plant;
  const std::size_t n = plant.n(), m = plant.m(), p = plant.p();
  Membership member;
  if (c.region == "lqr") {
    member = [&](std::span<const double> x) {
      return is_stabilizing_static(plant, Mat(m, n, std::vector<double>(x.begin(), x.end())));
    };
  } else {
    member = [&](std::span<const double> x) { return is_stabilizing_dynamic(plant, policy_from_point(x, n, p, m)); };
  }
  const Adjacency adj = c.adjacency == "face" ? Adjacency::kFace
                        : c.adjacency == "vertex" ? Adjacency::kVertex
                                                  : Adjacency::kEdge;
  const ConnectivityResult res = connectivity_scan(member, c.box, c.resolution, adj);

  std::ofstream csv(dir / "grid.csv");
  csv.precision(17);
  const std::size_t d = c.box.size();
  for (std::size_t a = 0; a < d; ++a) csv << "x" << a << ",";
  csv << "label\n";
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t cell = 0; cell < res.labels.size(); ++cell) {
    std::size_t rest = cell;
    for (std::size_t a = d; a-- > 0;) {
      idx[a] = rest % c.resolution;
      rest /= c.resolution;
    }
    for (std::size_t a = 0; a < d; ++a) csv << grid_point(c.box[a].first, c.box[a].second, c.resolution, idx[a]) << ",";
    csv << res.labels[cell] << "\n";
  }
  Outcome out;
  out.result["components"] = res.components;
  out.result["component_sizes"] = res.component_sizes;
  out.result["resolution"] = c.resolution;
  out.result["dimension"] = d;
  out.result["adjacency"] = c.adjacency;
  return out;
}

Outcome dispatch(const ExperimentConfig& c, const std::filesystem::path& dir) {
  switch (c.task) {
    case Task::kLqrGd:
    case Task::kStructuredGd: return run_static_descent(c);
    case Task::kHewer: return run_hewer(c);
    case Task::kLqgGd:
    case Task::kLqgRgd: return run_lqg(c);
    case Task::kHinfEval: return run_hinf_eval(c);
    case Task::kHinfDescent: return run_hinf_descent(c);
    case Task::kZoGd: return run_zo(c);
    case Task::kLandscape: return run_landscape(c, dir);
    case Task::kConnectivity: return run_connectivity(c, dir);
    case Task::kDare: return run_dare(c);
  }
  raise(ErrorKind::kInternalInvariant, "unhandled task");
}

void write_trace(const std::filesystem::path& dir, const Trace& trace) {
  std::ofstream out(dir / "trace.jsonl");
  for (const auto& it : trace) {
    Json line;
    line["iter"] = it.iter;
    line["J"] = it.J;
    line["grad_norm"] = it.grad_norm;
    line["step"] = it.step;
    line["rho"] = it.rho;
    out << line.dump() << "\n";
  }
}

void write_summary(const std::filesystem::path& dir, const Json& summary) {
  std::ofstream out(dir / "summary.json");
  out << summary.dump(2) << "\n";
}

Json error_record(std::string_view kind, const std::string& message) {
  return {{"kind", std::string(kind)}, {"message", message}};
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kContract:
    case ErrorKind::kDimension: return kExitConfig;
    case ErrorKind::kInfeasible:
    case ErrorKind::kNotSchurStable: return kExitInfeasible;
    case ErrorKind::kStalled: return kExitStalled;
    case ErrorKind::kInternalInvariant: return kExitInternal;
    default: return kExitOther;
  }
}

int run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto start = std::chrono::steady_clock::now();
  Json summary;
  summary["task"] = std::string(to_string(cfg.task));
  int code = kExitOk;
  Trace trace;
  Json result = Json::object();
  Json error = nullptr;
  try {
    Outcome out = dispatch(cfg, out_dir);
    trace = std::move(out.trace);
    result = std::move(out.result);
  } catch (const StalledError& e) {
    trace = e.trace();
    describe_trace(result, trace);
    code = kExitStalled;
    error = error_record(to_string(e.kind()), e.what());
  } catch (const Error& e) {
    code = exit_code_for(e.kind());
    error = error_record(to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    code = kExitOther;
    error = error_record("exception", e.what());
  }
  write_trace(out_dir, trace);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary["status"] = code == kExitOk ? "ok" : "error";
  summary["exit_code"] = code;
  summary["result"] = std::move(result);
  summary["error"] = std::move(error);
  summary["seed"] = cfg.seed;
  summary["rng"] = std::string(CounterRng::kName);
  summary["wall_time_s"] = wall;
  summary["config"] = to_json(cfg);
  summary["defaults"] = defaults_table();
  write_summary(out_dir, summary);
  if (code != kExitOk) std::cerr << "polgeo: " << summary["error"]["message"].get<std::string>() << "\n";
  return code;
}

int run_command(const std::string& task, const std::string& config_path, const std::filesystem::path& out_dir,
                std::optional<std::uint64_t> seed) {
  const auto parsed_task = task_from_string(task);
  try {
    if (!parsed_task) throw ConfigError({"task: unknown task \"" + task + "\""});
    ExperimentConfig cfg = parse_config_file(config_path, parsed_task);
    if (seed) cfg.seed = *seed;
    return run_experiment(cfg, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "polgeo: " << e.what() << "\n";
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!ec) {
      Json summary;
      summary["task"] = task;
      summary["status"] = "error";
      summary["exit_code"] = static_cast<int>(kExitConfig);
      summary["error"] = error_record(to_string(ErrorKind::kConfig), e.what());
      summary["error"]["violations"] = e.violations();
      summary["defaults"] = defaults_table();
      write_summary(out_dir, summary);
    }
    return kExitConfig;
  }
}

}  // namespace polgeo::cli
