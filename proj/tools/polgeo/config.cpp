#include "config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace polgeo::cli {

namespace {

constexpr std::array<std::pair<Task, std::string_view>, 11> kTaskNames{{
    {Task::kLqrGd, "lqr_gd"},
    {Task::kHewer, "hewer"},
    {Task::kStructuredGd, "structured_gd"},
    {Task::kLqgGd, "lqg_gd"},
    {Task::kLqgRgd, "lqg_rgd"},
    {Task::kHinfEval, "hinf_eval"},
    {Task::kHinfDescent, "hinf_descent"},
    {Task::kZoGd, "zo_gd"},
    {Task::kLandscape, "landscape"},
    {Task::kConnectivity, "connectivity"},
    {Task::kDare, "dare"},
}};

const std::set<std::string> kTopKeys = {"task", "seed", "plant", "options"};
const std::set<std::string> kPlantKeys = {"A", "B", "C", "Sigma", "W", "V", "Q", "R"};
const std::set<std::string> kOptionKeys = {
    "K0",         "policy",  "direction", "step",      "stop",    "constraint", "metric",     "weights",
    "grid",       "refine_tol", "samples", "radius",   "min_radius", "epsilon", "estimator", "cost",
    "dir1",       "dir2",    "box",       "resolution", "region", "adjacency"};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string shape_of(const Mat& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

/// Collects violations while walking the document.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  void reject_unknown(const Json& obj, const std::set<std::string>& known, const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
      if (!known.contains(key)) fail(join(path, key), "unknown key");
    }
  }

  std::optional<Mat> matrix(const Json& j, const std::string& path) {
    if (j.is_number()) return Mat::scalar(j.get<double>());
    if (j.is_object()) {
      if (!j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
        fail(path, "matrix object needs rows, cols and data");
        return std::nullopt;
      }
      const auto rows = count(j["rows"], join(path, "rows"));
      const auto cols = count(j["cols"], join(path, "cols"));
      const Json& data = j["data"];
      if (!rows || !cols) return std::nullopt;
      if (!data.is_array() || data.size() != *rows * *cols) {
        fail(join(path, "data"), "expected an array of " + std::to_string(*rows * *cols) + " numbers");
        return std::nullopt;
      }
      std::vector<double> v;
      for (const auto& x : data) {
        if (!x.is_number()) {
          fail(join(path, "data"), "non-numeric entry");
          return std::nullopt;
        }
        v.push_back(x.get<double>());
      }
      return Mat(*rows, *cols, std::move(v));
    }
    if (!j.is_array()) {
      fail(path, "expected a matrix (nested arrays or {rows, cols, data})");
      return std::nullopt;
    }
    if (j.empty()) return Mat();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const Json& row = j[i];
      if (!row.is_array() || row.size() != cols || cols == 0) {
        fail(path, "row " + std::to_string(i) + " is not an array of " + std::to_string(std::max<std::size_t>(cols, 1)) +
                       " numbers");
        return std::nullopt;
      }
      for (const auto& x : row) {
        if (!x.is_number()) {
          fail(path, "non-numeric entry in row " + std::to_string(i));
          return std::nullopt;
        }
        v.push_back(x.get<double>());
      }
    }
    return Mat(j.size(), cols, std::move(v));
  }

  std::optional<std::size_t> count(const Json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
      fail(path, "expected a non-negative integer");
      return std::nullopt;
    }
    return j.get<std::size_t>();
  }

  void number(const Json& obj, const char* key, const std::string& path, double& out) {
    if (!obj.contains(key)) return;
    const Json& j = obj[key];
    if (!j.is_number() || !std::isfinite(j.get<double>())) {
      fail(join(path, key), "expected a finite number");
      return;
    }
    out = j.get<double>();
  }

  template <typename Int>
  void integer(const Json& obj, const char* key, const std::string& path, Int& out) {
    if (!obj.contains(key)) return;
    const Json& j = obj[key];
    if (!j.is_number_integer()) {
      fail(join(path, key), "expected an integer");
      return;
    }
    if constexpr (std::is_unsigned_v<Int>) {
      if (j.is_number_unsigned()) {
        out = j.get<Int>();
      } else {
        fail(join(path, key), "expected a non-negative integer");
      }
    } else {
      out = j.get<Int>();
    }
  }

  void string(const Json& obj, const char* key, const std::string& path, std::string& out,
              std::initializer_list<std::string_view> allowed) {
    if (!obj.contains(key)) return;
    const Json& j = obj[key];
    if (!j.is_string()) {
      fail(join(path, key), "expected a string");
      return;
    }
    const auto v = j.get<std::string>();
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string msg = "unknown value \"" + v + "\" (expected one of";
      for (auto a : allowed) msg += " " + std::string(a);
      fail(join(path, key), msg + ")");
      return;
    }
    out = v;
  }

  void matrix_field(const Json& obj, const char* key, const std::string& path, Mat& out) {
    if (!obj.contains(key)) return;
    if (auto m = matrix(obj[key], join(path, key))) out = std::move(*m);
  }

  const Json* object(const Json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return nullptr;
    if (!obj[key].is_object()) {
      fail(join(path, key), "expected an object");
      return nullptr;
    }
    return &obj[key];
  }
};

std::size_t connectivity_dim(const ExperimentConfig& c) {
  const std::size_t n = c.plant.n(), m = c.plant.m(), p = c.plant.p();
  return c.region == "lqr" ? m * n : n * n + n * p + m * n;
}

void require_shape(Reader& r, const std::string& path, const Mat& m, std::size_t rows, std::size_t cols) {
  if (m.rows() != rows || m.cols() != cols) {
    r.fail(path, "expected " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " + shape_of(m));
  }
}

bool read_plant(Reader& r, const Json& doc, ExperimentConfig& c) {
  if (!doc.contains("plant") || !doc["plant"].is_object()) {
    r.fail("plant", "missing (an object with A, B, Q, R and optional C, Sigma, W, V)");
    return false;
  }
  const Json& pj = doc["plant"];
  r.reject_unknown(pj, kPlantKeys, "plant");
  bool complete = true;
  auto get = [&](const char* key, bool required) -> std::optional<Mat> {
    if (!pj.contains(key)) {
      if (required) {
        r.fail(join("plant", key), "missing");
        complete = false;
      }
      return std::nullopt;
    }
    auto m = r.matrix(pj[key], join("plant", key));
    if (!m) complete = false;
    return m;
  };
  auto a = get("A", true);
  auto b = get("B", true);
  auto q = get("Q", true);
  auto rr = get("R", true);
  auto cm = get("C", false);
  auto sigma = get("Sigma", false);
  auto w = get("W", false);
  auto v = get("V", false);
  if (!complete) return false;
  const std::size_t n = a->rows();
  c.plant.A = *a;
  c.plant.B = *b;
  c.plant.Q = *q;
  c.plant.R = *rr;
  c.plant.C = cm ? *cm : Mat::identity(n);
  c.plant.Sigma = sigma ? *sigma : Mat::identity(n);
  c.plant.W = w ? *w : Mat::identity(n);
  c.plant.V = v ? *v : Mat::identity(c.plant.C.rows());
  const auto violations = plant_violations(c.plant);
  for (const auto& msg : violations) r.errors.push_back("plant." + msg);
  return violations.empty();
}

void read_options(Reader& r, const Json& o, ExperimentConfig& c) {
  const std::string path = "options";
  r.reject_unknown(o, kOptionKeys, path);
  r.matrix_field(o, "K0", path, c.K0);
  if (const Json* pol = r.object(o, "policy", path)) {
    const std::string pp = join(path, "policy");
    r.reject_unknown(*pol, {"A_K", "B_K", "C_K"}, pp);
    for (const char* key : {"A_K", "B_K", "C_K"}) {
      if (!pol->contains(key)) r.fail(join(pp, key), "missing");
    }
    r.matrix_field(*pol, "A_K", pp, c.policy.A_K);
    r.matrix_field(*pol, "B_K", pp, c.policy.B_K);
    r.matrix_field(*pol, "C_K", pp, c.policy.C_K);
  }
  r.string(o, "direction", path, c.direction, {"euclidean", "riemannian", "pseudo_newton", "quasi_newton"});
  if (const Json* st = r.object(o, "step", path)) {
    const std::string sp = join(path, "step");
    r.reject_unknown(*st, {"rule", "cap", "eta"}, sp);
    r.string(*st, "rule", sp, c.step.rule, {"certificate", "fixed"});
    if (c.step.rule == "fixed") {
      c.step.value = 0.0;
      if (st->contains("cap")) r.fail(join(sp, "cap"), "only valid with rule \"certificate\"");
      r.number(*st, "eta", sp, c.step.value);
    } else {
      if (st->contains("eta")) r.fail(join(sp, "eta"), "only valid with rule \"fixed\"");
      r.number(*st, "cap", sp, c.step.value);
      if (!(c.step.value > 0.0)) r.fail(join(sp, "cap"), "must be positive");
    }
  }
  if (const Json* st = r.object(o, "stop", path)) {
    const std::string sp = join(path, "stop");
    r.reject_unknown(*st, {"tol", "max_iter"}, sp);
    r.number(*st, "tol", sp, c.stop.tol);
    r.integer(*st, "max_iter", sp, c.stop.max_iter);
    if (c.stop.tol < 0.0) r.fail(join(sp, "tol"), "must be non-negative");
    if (c.stop.max_iter < 0) r.fail(join(sp, "max_iter"), "must be non-negative");
  }
  if (const Json* cs = r.object(o, "constraint", path)) {
    const std::string cp = join(path, "constraint");
    r.reject_unknown(*cs, {"type", "mask", "C"}, cp);
    ConstraintConfig cc;
    r.string(*cs, "type", cp, cc.type, {"sparsity", "output_feedback"});
    const char* key = cc.type == "sparsity" ? "mask" : "C";
    if (!cs->contains(key)) r.fail(join(cp, key), "missing");
    r.matrix_field(*cs, key, cp, cc.matrix);
    c.constraint = std::move(cc);
  }
  r.string(o, "metric", path, c.metric, {"frobenius", "lyapunov"});
  if (const Json* w = r.object(o, "weights", path)) {
    const std::string wp = join(path, "weights");
    r.reject_unknown(*w, {"w1", "w2", "w3"}, wp);
    r.number(*w, "w1", wp, c.w1);
    r.number(*w, "w2", wp, c.w2);
    r.number(*w, "w3", wp, c.w3);
    if (!(c.w1 > 0.0)) r.fail(join(wp, "w1"), "must be positive");
    if (c.w2 < 0.0) r.fail(join(wp, "w2"), "must be non-negative");
    if (c.w3 < 0.0) r.fail(join(wp, "w3"), "must be non-negative");
  }
  r.integer(o, "grid", path, c.grid);
  r.number(o, "refine_tol", path, c.refine_tol);
  r.integer(o, "samples", path, c.samples);
  r.number(o, "radius", path, c.radius);
  r.number(o, "min_radius", path, c.min_radius);
  r.number(o, "epsilon", path, c.epsilon);
  r.string(o, "estimator", path, c.estimator, {"one_point", "two_point", "baseline"});
  r.string(o, "cost", path, c.cost, {"lqr", "hinf", "lqg"});
  r.matrix_field(o, "dir1", path, c.dir1);
  r.matrix_field(o, "dir2", path, c.dir2);
  r.integer(o, "resolution", path, c.resolution);
  r.string(o, "region", path, c.region, {"lqg", "lqr"});
  r.string(o, "adjacency", path, c.adjacency, {"face", "edge", "vertex"});
  if (o.contains("box")) {
    const Json& b = o["box"];
    const std::string bp = join(path, "box");
    auto interval = [&](const Json& j, const std::string& ip) -> std::optional<std::pair<double, double>> {
      if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        r.fail(ip, "expected [lo, hi]");
        return std::nullopt;
      }
      const double lo = j[0].get<double>(), hi = j[1].get<double>();
      if (!(lo < hi)) {
        r.fail(ip, "lo must be below hi");
        return std::nullopt;
      }
      return std::pair{lo, hi};
    };
    if (b.is_object()) {
      r.reject_unknown(b, {"s", "t"}, bp);
      if (b.contains("s")) {
        if (auto s = interval(b["s"], join(bp, "s"))) std::tie(c.s_lo, c.s_hi) = *s;
      }
      if (b.contains("t")) {
        if (auto t = interval(b["t"], join(bp, "t"))) std::tie(c.t_lo, c.t_hi) = *t;
      }
    } else if (b.is_array()) {
      c.box.clear();
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (auto iv = interval(b[i], bp + "[" + std::to_string(i) + "]")) c.box.push_back(*iv);
      }
    } else {
      r.fail(bp, "expected {\"s\": [lo, hi], \"t\": [lo, hi]} or a list of [lo, hi]");
    }
  }
}

bool lqg_task(Task t) { return t == Task::kLqgGd || t == Task::kLqgRgd; }

void resolve_and_check(Reader& r, ExperimentConfig& c, bool dir1_given, bool dir2_given, bool resolution_given) {
  const std::size_t n = c.plant.n(), m = c.plant.m(), p = c.plant.p();
  if (c.K0.empty()) c.K0 = Mat(m, n);
  require_shape(r, "options.K0", c.K0, m, n);
  if (c.policy.A_K.empty() && c.policy.B_K.empty() && c.policy.C_K.empty()) {
    c.policy = DynamicPolicy{Mat(n, n), Mat(n, p), Mat(m, n)};
  }
  const std::size_t q = c.policy.A_K.rows();
  require_shape(r, "options.policy.A_K", c.policy.A_K, q, q);
  require_shape(r, "options.policy.B_K", c.policy.B_K, q, p);
  require_shape(r, "options.policy.C_K", c.policy.C_K, m, q);
  if ((lqg_task(c.task) || (c.task == Task::kLandscape && c.cost == "lqg")) && q != n) {
    r.fail("options.policy", "controller order " + std::to_string(q) + " must equal plant order " + std::to_string(n));
  }

  if (c.task == Task::kStructuredGd) {
    if (!c.constraint) {
      r.fail("options.constraint", "missing (required by structured_gd)");
    } else if (c.constraint->type == "sparsity") {
      require_shape(r, "options.constraint.mask", c.constraint->matrix, m, n);
    } else if (c.constraint->matrix.cols() != n || c.constraint->matrix.rows() == 0) {
      r.fail("options.constraint.C", "expected k x " + std::to_string(n) + ", got " + shape_of(c.constraint->matrix));
    }
  }
  if (c.grid < 64) r.fail("options.grid", "must be at least 64");
  if (!(c.refine_tol > 0.0)) r.fail("options.refine_tol", "must be positive");
  if (c.samples < 0) r.fail("options.samples", "must be non-negative");
  if (c.radius < 0.0) r.fail("options.radius", "must be non-negative");
  if (c.min_radius < 0.0) r.fail("options.min_radius", "must be non-negative");
  if (c.epsilon < 0.0) r.fail("options.epsilon", "must be non-negative");

  // Landscape directions live in the cost's parameter space.
  const std::size_t dr = c.cost == "lqg" ? q + m : m;
  const std::size_t dc = c.cost == "lqg" ? q + p : n;
  if (!dir1_given) c.dir1 = Mat::unit(dr, dc, 0, 0);
  if (!dir2_given) c.dir2 = dr * dc > 1 ? Mat::unit(dr, dc, dc > 1 ? 0 : 1, dc > 1 ? 1 : 0) : Mat(dr, dc);
  if (c.task == Task::kLandscape) {
    require_shape(r, "options.dir1", c.dir1, dr, dc);
    require_shape(r, "options.dir2", c.dir2, dr, dc);
  }

  if (!resolution_given) c.resolution = c.task == Task::kConnectivity ? 61 : 41;
  if (c.task == Task::kLandscape && c.resolution < 2) r.fail("options.resolution", "must be at least 2");
  if (c.task == Task::kConnectivity) {
    if (c.resolution < 8) r.fail("options.resolution", "must be at least 8");
    const std::size_t d = connectivity_dim(c);
    if (d > 4) {
      r.fail("options.region", "scan dimension " + std::to_string(d) + " exceeds 4");
    } else if (c.box.empty()) {
      c.box.assign(d, {-3.0, 3.0});
    } else if (c.box.size() != d) {
      r.fail("options.box", "expected " + std::to_string(d) + " intervals, got " + std::to_string(c.box.size()));
    }
  }
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::optional<Task> task_from_string(std::string_view name) {
  std::string norm(name);
  std::replace(norm.begin(), norm.end(), '-', '_');
  for (const auto& [t, s] : kTaskNames) {
    if (s == norm) return t;
  }
  return std::nullopt;
}

std::string_view to_string(Task task) noexcept {
  for (const auto& [t, s] : kTaskNames) {
    if (t == task) return s;
  }
  return "unknown";
}

namespace {

std::string summarize(const std::vector<std::string>& v) {
  std::string msg = "invalid config:";
  for (const auto& s : v) msg += "\n  " + s;
  return msg;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(ErrorKind::kConfig, summarize(violations)), violations_(std::move(violations)) {}

ExperimentConfig parse_config(const std::string& text, std::optional<Task> task_override, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    throw ConfigError({source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({source + ": top level must be a JSON object"});

  Reader r;
  r.reject_unknown(doc, kTopKeys, "");
  ExperimentConfig c;
  std::optional<Task> task = task_override;
  if (doc.contains("task")) {
    const Json& t = doc["task"];
    const auto parsed = t.is_string() ? task_from_string(t.get<std::string>()) : std::nullopt;
    if (!parsed) {
      r.fail("task", "unknown task " + t.dump());
    } else if (task && *task != *parsed) {
      r.fail("task", "config says \"" + std::string(to_string(*parsed)) + "\" but the command line asks for \"" +
                         std::string(to_string(*task)) + "\"");
    } else {
      task = parsed;
    }
  } else if (!task) {
    r.fail("task", "missing");
  }
  if (task) c.task = *task;
  r.integer(doc, "seed", "", c.seed);
  const bool plant_ok = read_plant(r, doc, c);

  bool dir1 = false, dir2 = false, resolution = false;
  if (doc.contains("options")) {
    if (!doc["options"].is_object()) {
      r.fail("options", "expected an object");
    } else {
      const Json& o = doc["options"];
      dir1 = o.contains("dir1");
      dir2 = o.contains("dir2");
      resolution = o.contains("resolution");
      read_options(r, o, c);
    }
  }
  if (plant_ok) resolve_and_check(r, c, dir1, dir2, resolution);
  if (!r.errors.empty()) throw ConfigError(std::move(r.errors));
  return c;
}

ExperimentConfig parse_config_file(const std::string& path, std::optional<Task> task_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open file"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), task_override, path);
}

Json matrix_to_json(const Mat& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const ExperimentConfig& c) {
  Json plant;
  plant["A"] = matrix_to_json(c.plant.A);
  plant["B"] = matrix_to_json(c.plant.B);
  plant["C"] = matrix_to_json(c.plant.C);
  plant["Sigma"] = matrix_to_json(c.plant.Sigma);
  plant["W"] = matrix_to_json(c.plant.W);
  plant["V"] = matrix_to_json(c.plant.V);
  plant["Q"] = matrix_to_json(c.plant.Q);
  plant["R"] = matrix_to_json(c.plant.R);

  Json o;
  o["K0"] = matrix_to_json(c.K0);
  o["policy"] = {{"A_K", matrix_to_json(c.policy.A_K)},
                 {"B_K", matrix_to_json(c.policy.B_K)},
                 {"C_K", matrix_to_json(c.policy.C_K)}};
  o["direction"] = c.direction;
  if (c.step.rule == "fixed") {
    o["step"] = {{"rule", "fixed"}, {"eta", c.step.value}};
  } else {
    o["step"] = {{"rule", "certificate"}, {"cap", c.step.value}};
  }
  o["stop"] = {{"tol", c.stop.tol}, {"max_iter", c.stop.max_iter}};
  if (c.constraint) {
    o["constraint"] = {{"type", c.constraint->type},
                       {c.constraint->type == "sparsity" ? "mask" : "C", matrix_to_json(c.constraint->matrix)}};
  }
  o["metric"] = c.metric;
  o["weights"] = {{"w1", c.w1}, {"w2", c.w2}, {"w3", c.w3}};
  o["grid"] = c.grid;
  o["refine_tol"] = c.refine_tol;
  o["samples"] = c.samples;
  o["radius"] = c.radius;
  o["min_radius"] = c.min_radius;
  o["epsilon"] = c.epsilon;
  o["estimator"] = c.estimator;
  o["cost"] = c.cost;
  o["dir1"] = matrix_to_json(c.dir1);
  o["dir2"] = matrix_to_json(c.dir2);
  o["resolution"] = c.resolution;
  o["region"] = c.region;
  o["adjacency"] = c.adjacency;
  if (c.task == Task::kConnectivity) {
    Json box = Json::array();
    for (const auto& [lo, hi] : c.box) box.push_back({lo, hi});
    o["box"] = box;
  } else {
    o["box"] = {{"s", {c.s_lo, c.s_hi}}, {"t", {c.t_lo, c.t_hi}}};
  }

  Json out;
  out["task"] = std::string(to_string(c.task));
  out["seed"] = c.seed;
  out["plant"] = std::move(plant);
  out["options"] = std::move(o);
  return out;
}

Json defaults_table() {
  Json d;
  d["plant.C"] = "identity (n x n)";
  d["plant.Sigma"] = "identity (n x n)";
  d["plant.W"] = "identity (n x n)";
  d["plant.V"] = "identity (p x p)";
  d["seed"] = 0;
  d["options.K0"] = "zero (m x n)";
  d["options.policy"] = "zero policy of order n";
  d["options.direction"] = "euclidean";
  d["options.step"] = "certificate rule, cap 1.0";
  d["options.step.fixed.eta"] = "1e-3 / ||R||_2 (lqr, structured); 1e-2 (lqg); 1e-3 (zo_gd); <= 0 selects these";
  d["options.stop"] = {{"tol", 1e-8}, {"max_iter", 1000}};
  d["options.metric"] = "lyapunov";
  d["options.weights"] = {{"w1", 1.0}, {"w2", 1.0}, {"w3", 1.0}};
  d["options.grid"] = 2048;
  d["options.refine_tol"] = 1e-10;
  d["options.samples"] = "0 selects 2 m n + 2 (hinf_descent) or 2 d (zo_gd)";
  d["options.radius"] = "0 selects 1e-4 (1 + ||K0||_F)";
  d["options.min_radius"] = "0 selects 1e-9 (1 + ||K0||_F)";
  d["options.epsilon"] = "0 selects 1e-3 (1 + ||theta||_F)";
  d["options.estimator"] = "two_point";
  d["options.zo_max_resamples"] = 50;
  d["options.cost"] = "lqr";
  d["options.dir1"] = "unit matrix at entry (0, 0)";
  d["options.dir2"] = "unit matrix at the next row-major entry";
  d["options.box"] = "s, t in [-1, 1] (landscape); [-3, 3] per axis (connectivity)";
  d["options.resolution"] = "41 (landscape), 61 (connectivity)";
  d["options.region"] = "lqg";
  d["options.adjacency"] = "edge";
  d["lyapunov.divergence_guard"] = "1e8 ||Q|| (1 + 1 / (1 - rho^2))";
  d["stability_margin"] = 1e-12;
  d["max_backtracks"] = 30;
  return d;
}

}  // namespace polgeo::cli
