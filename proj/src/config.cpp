#include "awflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "awflow/errors.hpp"

namespace awflow {

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

YAML::Node require(const YAML::Node& node, const std::string& key, const std::string& prefix) {
  const YAML::Node child = node[key];
  if (!child || child.IsNull()) throw ConfigError(join(prefix, key), "missing required field");
  return child;
}

double as_double(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) throw ConfigError(path, "expected a number");
  try {
    const double v = node.as<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
    return v;
  } catch (const YAML::Exception&) {
    throw ConfigError(path, "expected a number, got '" + node.Scalar() + "'");
  }
}

long long as_int(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) throw ConfigError(path, "expected an integer");
  try {
    return node.as<long long>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, "expected an integer, got '" + node.Scalar() + "'");
  }
}

std::string as_string(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) throw ConfigError(path, "expected a string");
  return node.Scalar();
}

bool as_bool(const YAML::Node& node, const std::string& path) {
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, "expected true or false");
  }
}

Vec as_vec(const YAML::Node& node, const std::string& path, int expected = -1) {
  if (!node.IsSequence()) throw ConfigError(path, "expected a list of numbers");
  Vec v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_double(node[i], path + "[" + std::to_string(i) + "]");
  }
  if (expected >= 0 && v.size() != expected) {
    throw ConfigError(path, "expected " + std::to_string(expected) + " entries, got " +
                                std::to_string(v.size()));
  }
  return v;
}

Mat as_mat(const YAML::Node& node, const std::string& path, int cols, int rows = -1) {
  if (!node.IsSequence()) throw ConfigError(path, "expected a list of rows");
  Mat m(static_cast<Eigen::Index>(node.size()), cols);
  for (std::size_t i = 0; i < node.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) =
        as_vec(node[i], path + "[" + std::to_string(i) + "]", cols).transpose();
  }
  if (rows >= 0 && m.rows() != rows) {
    throw ConfigError(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(m.rows()));
  }
  return m;
}

double positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

YAML::Node parse_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", std::string("malformed YAML: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int infer_dimension(const YAML::Node& set) {
  for (const char* key : {"lower", "center"}) {
    if (set[key] && set[key].IsSequence()) return static_cast<int>(set[key].size());
  }
  if (set["box"] && set["box"]["lower"] && set["box"]["lower"].IsSequence()) {
    return static_cast<int>(set["box"]["lower"].size());
  }
  if (set["A"] && set["A"].IsSequence() && set["A"].size() > 0 && set["A"][0].IsSequence()) {
    return static_cast<int>(set["A"][0].size());
  }
  if (set["E"] && set["E"].IsSequence() && set["E"].size() > 0 && set["E"][0].IsSequence()) {
    return static_cast<int>(set["E"][0].size());
  }
  throw ConfigError("dimension", "missing required field");
}

// Runs a library factory and reports its validation failures against `path`.
template <class F>
auto build(const std::string& path, F&& factory) {
  try {
    return factory();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  } catch (const InfeasibleSet& e) {
    throw ConfigError(path, e.what());
  }
}

ConstraintSet parse_set(const YAML::Node& node, int n, const std::string& prefix) {
  if (!node.IsMap()) throw ConfigError(prefix, "expected a table");
  const std::string type = as_string(require(node, "type", prefix), join(prefix, "type"));
  if (type == "box") {
    const Vec lo = as_vec(require(node, "lower", prefix), join(prefix, "lower"), n);
    const Vec hi = as_vec(require(node, "upper", prefix), join(prefix, "upper"), n);
    return build(prefix, [&] { return ConstraintSet::box(lo, hi); });
  }
  if (type == "polyhedron") {
    Mat A(0, n), E(0, n);
    Vec b(0), d(0);
    if (node["A"]) {
      A = as_mat(node["A"], join(prefix, "A"), n);
      b = as_vec(require(node, "b", prefix), join(prefix, "b"), static_cast<int>(A.rows()));
    }
    if (node["E"]) {
      E = as_mat(node["E"], join(prefix, "E"), n);
      d = as_vec(require(node, "d", prefix), join(prefix, "d"), static_cast<int>(E.rows()));
    }
    if (A.rows() + E.rows() == 0) throw ConfigError(join(prefix, "A"), "polyhedron needs A/b or E/d");
    return build(prefix, [&] { return ConstraintSet::polyhedron(A, b, E, d); });
  }
  if (type == "ball" || type == "sphere") {
    const Vec c = as_vec(require(node, "center", prefix), join(prefix, "center"), n);
    const double r = positive(as_double(require(node, "radius", prefix), join(prefix, "radius")),
                              join(prefix, "radius"));
    return type == "ball" ? ConstraintSet::ball(c, r) : ConstraintSet::sphere(c, r);
  }
  if (type == "smooth_sublevel") {
    const std::string kind =
        node["kind"] ? as_string(node["kind"], join(prefix, "kind")) : std::string("quadric");
    if (kind != "quadric") throw ConfigError(join(prefix, "kind"), "only 'quadric' is supported");
    const Mat Q = as_mat(require(node, "Q", prefix), join(prefix, "Q"), n, n);
    const Vec q = node["q"] ? as_vec(node["q"], join(prefix, "q"), n) : Vec(Vec::Zero(n));
    const double c0 = node["c0"] ? as_double(node["c0"], join(prefix, "c0")) : 0.0;
    SmoothSublevel s;
    s.g = [Q, q, c0](const Vec& x) { return 0.5 * x.dot(Q * x) + q.dot(x) + c0; };
    s.grad = [Q, q](const Vec& x) -> Vec { return Q * x + q; };
    s.hessian = [Q](const Vec&) -> Mat { return Q; };
    s.alpha = positive(as_double(require(node, "alpha", prefix), join(prefix, "alpha")),
                       join(prefix, "alpha"));
    const YAML::Node box = require(node, "box", prefix);
    s.box_lower = as_vec(require(box, "lower", join(prefix, "box")), join(prefix, "box.lower"), n);
    s.box_upper = as_vec(require(box, "upper", join(prefix, "box")), join(prefix, "box.upper"), n);
    return build(prefix, [&] { return ConstraintSet::smooth_sublevel(s); });
  }
  throw ConfigError(join(prefix, "type"), "unknown set type '" + type + "'");
}

Objective parse_objective(const YAML::Node& node, int n, const std::string& prefix) {
  if (!node.IsMap()) throw ConfigError(prefix, "expected a table");
  const std::string type = as_string(require(node, "type", prefix), join(prefix, "type"));
  if (type == "quadratic") {
    const Mat Q = as_mat(require(node, "Q", prefix), join(prefix, "Q"), n, n);
    const Vec c = node["c"] ? as_vec(node["c"], join(prefix, "c"), n) : Vec(Vec::Zero(n));
    const double offset = node["offset"] ? as_double(node["offset"], join(prefix, "offset")) : 0.0;
    return build(join(prefix, "Q"), [&] { return Objective::quadratic(Q, c, offset); });
  }
  if (type == "distance") {
    return Objective::distance_to(as_vec(require(node, "target", prefix), join(prefix, "target"), n));
  }
  if (type == "rosenbrock") {
    const double scale = node["scale"] ? as_double(node["scale"], join(prefix, "scale")) : 100.0;
    return build(prefix, [&] { return Objective::rosenbrock(n, scale); });
  }
  if (type == "nonconvex_poly") {
    const YAML::Node coeffs = require(node, "coefficients", prefix);
    const std::string path = join(prefix, "coefficients");
    if (!coeffs.IsSequence() || static_cast<int>(coeffs.size()) != n) {
      throw ConfigError(path, "expected one coefficient list per coordinate");
    }
    std::vector<std::vector<double>> lists;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const Vec v = as_vec(coeffs[i], path + "[" + std::to_string(i) + "]");
      lists.emplace_back(v.data(), v.data() + v.size());
    }
    return Objective::nonconvex_poly(std::move(lists));
  }
  throw ConfigError(join(prefix, "type"), "unknown objective type '" + type + "'");
}

}  // namespace

std::string_view to_string(FlowChoice flow) {
  switch (flow) {
    case FlowChoice::AntiWindup:
      return "antiwindup";
    case FlowChoice::Penalized:
      return "penalized";
    case FlowChoice::PgfReference:
      return "pgf_reference";
  }
  return "unknown";
}

const std::vector<std::string>& known_monitors() {
  static const std::vector<std::string> names{"lyapunov", "derivative_identity", "tube", "invariance",
                                              "criticality"};
  return names;
}

ExperimentConfig parse_config(const std::string& text) {
  const YAML::Node root = parse_yaml(text);
  if (!root.IsMap()) throw ConfigError("<document>", "expected a table at top level");

  ExperimentConfig cfg;
  if (root["name"]) cfg.name = as_string(root["name"], "name");
  const YAML::Node set_node = require(root, "set", "");
  if (root["dimension"]) {
    const long long n = as_int(root["dimension"], "dimension");
    if (n <= 0) throw ConfigError("dimension", "must be positive");
    cfg.dimension = static_cast<int>(n);
  } else {
    cfg.dimension = infer_dimension(set_node);
  }
  const int n = cfg.dimension;

  ConstraintSet set = parse_set(set_node, n, "set");
  Objective obj = parse_objective(require(root, "objective", ""), n, "objective");
  cfg.problem = std::make_shared<const Problem>(Problem{std::move(set), std::move(obj)});

  const std::string flow = root["flow"] ? as_string(root["flow"], "flow") : std::string("antiwindup");
  if (flow == "antiwindup") {
    cfg.flow = FlowChoice::AntiWindup;
  } else if (flow == "penalized") {
    cfg.flow = FlowChoice::Penalized;
  } else if (flow == "pgf_reference") {
    cfg.flow = FlowChoice::PgfReference;
  } else {
    throw ConfigError("flow", "expected antiwindup, penalized or pgf_reference");
  }
  if (cfg.flow != FlowChoice::PgfReference || root["K"]) {
    cfg.K = positive(as_double(require(root, "K", ""), "K"), "K");
  }

  const YAML::Node x0 = require(root, "x0", "");
  if (x0.IsSequence()) {
    cfg.x0 = as_vec(x0, "x0", n);
  } else if (x0.IsMap()) {
    SamplerSpec s;
    const long long count = as_int(require(x0, "count", "x0"), "x0.count");
    if (count <= 0) throw ConfigError("x0.count", "must be positive");
    s.count = static_cast<int>(count);
    if (x0["seed"]) s.seed = static_cast<std::uint64_t>(as_int(x0["seed"], "x0.seed"));
    if (x0["width"]) s.width = positive(as_double(x0["width"], "x0.width"), "x0.width");
    if (x0["region"] && as_string(x0["region"], "x0.region") != "tube") {
      throw ConfigError("x0.region", "only 'tube' is supported");
    }
    cfg.sampler = s;
  } else {
    throw ConfigError("x0", "expected a vector or a sampler table");
  }

  if (root["dt"]) cfg.dt = positive(as_double(root["dt"], "dt"), "dt");
  if (root["t_end"]) cfg.t_end = positive(as_double(root["t_end"], "t_end"), "t_end");
  if (root["level"]) cfg.level = as_double(root["level"], "level");
  if (root["monitors"]) {
    const YAML::Node m = root["monitors"];
    if (!m.IsSequence()) throw ConfigError("monitors", "expected a list of monitor names");
    for (std::size_t i = 0; i < m.size(); ++i) {
      const std::string path = "monitors[" + std::to_string(i) + "]";
      const std::string name = as_string(m[i], path);
      const auto& known = known_monitors();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw ConfigError(path, "unknown monitor '" + name + "'");
      }
      cfg.monitors.push_back(name);
    }
  }
  if (root["output_dir"]) cfg.output_dir = as_string(root["output_dir"], "output_dir");
  if (root["trace_stride"]) {
    const long long stride = as_int(root["trace_stride"], "trace_stride");
    if (stride <= 0) throw ConfigError("trace_stride", "must be positive");
    cfg.trace_stride = static_cast<int>(stride);
  }
  if (root["grad_bound"]) {
    const YAML::Node gb = root["grad_bound"];
    if (gb["samples"]) {
      const long long s = as_int(gb["samples"], "grad_bound.samples");
      if (s <= 0) throw ConfigError("grad_bound.samples", "must be positive");
      cfg.grad_bound_samples = static_cast<int>(s);
    }
    if (gb["seed"]) cfg.grad_bound_seed = static_cast<std::uint64_t>(as_int(gb["seed"], "grad_bound.seed"));
  }
  if (root["lyapunov_halving"]) cfg.lyapunov_halving = as_bool(root["lyapunov_halving"], "lyapunov_halving");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

ConstraintSet parse_set_spec(const std::string& text) {
  const YAML::Node root = parse_yaml(text);
  if (!root.IsMap()) throw ConfigError("<document>", "expected a table at top level");
  const bool nested = static_cast<bool>(root["set"]);
  const YAML::Node node = nested ? root["set"] : root;
  const std::string prefix = nested ? "set" : "";
  int n = 0;
  if (root["dimension"]) {
    n = static_cast<int>(as_int(root["dimension"], "dimension"));
    if (n <= 0) throw ConfigError("dimension", "must be positive");
  } else {
    n = infer_dimension(node);
  }
  return parse_set(node, n, prefix);
}

ConstraintSet load_set_spec(const std::string& path) { return parse_set_spec(read_file(path)); }

std::string resolved_output_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("AWFLOW_OUTPUT_DIR"); env && *env) return env;
  return config.output_dir;
}

}  // namespace awflow
