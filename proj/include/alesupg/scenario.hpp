#pragma once

// Declarative run description, the built-in presets, manufactured
// solutions, and the INI-style configuration format.
//
//   [scenario]       name, mesh, motion, degree, T, initial, manufactured,
//                    dirichlet, neumann, convergence, dt_scaling
//   [coefficients]   epsilon, b, c, f, mu
//   [stepper]        scheme, dt, policy, strict_cn_check
//   [stabilization]  delta0, enforce_theory_bounds, c_inv
//   [output]         dir, snapshots, line_y, line_x0, line_x1,
//                    line_samples, bounds

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "alesupg/forms.hpp"
#include "alesupg/mesh.hpp"
#include "alesupg/meshgen.hpp"
#include "alesupg/motion.hpp"
#include "alesupg/stepping.hpp"

namespace alesupg {

enum class MotionKind { none, example1, disc };
enum class InitialKind { zero, example1_bump, manufactured };
/// sine:   u = exp(-t) sin(pi x) sin(pi y)
/// linear: u = (1 + x + 2y)(1 + sin(4t) / 2), exactly representable in space
/// dilating: u = exp(-t) sin(pi x / s) sin(pi y / s), s = 2 - cos(20 pi t),
///   which follows the dilating square of example 1
enum class Manufactured { none, sine, linear, dilating };
enum class Convergence { none, space, time };

struct Scenario {
  std::string name = "run";
  /// unit_square:N, channel:N (target cell count) or a mesh file path.
  std::string mesh = "unit_square:16";
  MotionKind motion = MotionKind::none;
  int degree = 1;
  double T = 1.0;
  InitialKind initial = InitialKind::zero;
  Manufactured manufactured = Manufactured::none;
  /// Constant Dirichlet values per tag; ignored when dirichlet_exact is set.
  std::map<int, double> dirichlet;
  /// Every tag not listed as Neumann takes the manufactured solution.
  bool dirichlet_exact = false;
  std::set<int> neumann;
  Convergence convergence = Convergence::none;
  /// Spatial study: dt = dt_scaling * h^2.
  double dt_scaling = 1.0;

  double epsilon = 1.0;
  Vec2 b{};
  double c = 0.0;
  double f = 0.0;
  double mu = 0.0;

  Scheme scheme = Scheme::backward_euler;
  double dt = 0.0;
  EvalPolicy policy = EvalPolicy::midpoint_gcl;
  bool strict_cn_check = false;

  double delta0 = 0.0;
  bool enforce_theory_bounds = false;
  double c_inv = 1.0;

  std::string out_dir;
  std::vector<double> snapshots;
  std::optional<double> line_y;
  double line_x0 = 0.0;
  double line_x1 = 1.0;
  Index line_samples = 0;
  std::optional<std::pair<double, double>> bounds;

  bool operator==(const Scenario&) const = default;

  StepperConfig stepper_config() const {
    StepperConfig s;
    s.scheme = scheme;
    s.dt = dt;
    s.policy = policy;
    s.strict_cn_check = strict_cn_check;
    s.stab = {delta0, enforce_theory_bounds, c_inv};
    return s;
  }
};

/// Semantic checks that do not need the mesh.
inline void validate(const Scenario& s) {
  if (s.name.empty() || s.name.find_first_of("/\\ \t") != std::string::npos)
    throw ConfigError("scenario.name must be a nonempty word");
  if (!(s.T > 0.0)) throw ConfigError("scenario.T must be positive");
  if (!(s.dt > 0.0)) throw ConfigError("stepper.dt must be positive");
  if (s.degree != 1 && s.degree != 2) throw ConfigError("scenario.degree must be 1 or 2");
  if (!(s.epsilon > 0.0)) throw ConfigError("coefficients.epsilon must be positive");
  if (s.mu < 0.0) throw ConfigError("coefficients.mu must be nonnegative");
  if (s.delta0 < 0.0) throw ConfigError("stabilization.delta0 must be nonnegative");
  if (!(s.c_inv > 0.0)) throw ConfigError("stabilization.c_inv must be positive");
  if (s.scheme == Scheme::crank_nicolson && s.policy == EvalPolicy::endpoint)
    throw ConfigError("stepper.policy = endpoint requires scheme = be");
  if ((s.initial == InitialKind::manufactured || s.dirichlet_exact) && s.manufactured == Manufactured::none)
    throw ConfigError("scenario.manufactured must be set when the manufactured solution is used");
  if (s.convergence != Convergence::none && s.manufactured == Manufactured::none)
    throw ConfigError("scenario.convergence requires scenario.manufactured");
  if (s.convergence == Convergence::space && !(s.dt_scaling > 0.0))
    throw ConfigError("scenario.dt_scaling must be positive");
  for (double t : s.snapshots)
    if (t < 0.0 || t > s.T) throw ConfigError("output.snapshots must lie in [0, T]");
  if (s.bounds && !(s.bounds->first < s.bounds->second))
    throw ConfigError("output.bounds must be increasing");
  if (s.line_samples > 0 && !s.line_y) throw ConfigError("output.line_samples requires output.line_y");
  for (const auto& [tag, v] : s.dirichlet)
    if (s.neumann.count(tag)) throw ConfigError("boundary tag " + std::to_string(tag) + " is both Dirichlet and Neumann");
}

// ---------------------------------------------------------------------------
// Presets

inline Scenario example1_preset() {
  Scenario s;
  s.name = "example1";
  s.mesh = "unit_square:64";
  s.motion = MotionKind::example1;
  s.degree = 1;
  s.T = 1.0;
  s.initial = InitialKind::example1_bump;
  s.dirichlet = {{1, 0.0}, {2, 0.0}, {3, 0.0}, {4, 0.0}};
  s.epsilon = 0.01;
  s.dt = 0.01;
  s.delta0 = 1.0;
  s.line_y = 0.5;
  s.line_x0 = 0.0;
  s.line_x1 = 1.0;
  return s;
}

inline Scenario example2_preset(double delta0 = 10.0) {
  Scenario s;
  s.name = "example2";
  s.mesh = "channel:9400";
  s.motion = MotionKind::disc;
  s.degree = 2;
  s.T = 10.0;
  s.initial = InitialKind::zero;
  s.dirichlet = {{kChannelInlet, 0.0}, {kChannelWall, 0.0}, {kChannelDisc, 1.0}};
  s.neumann = {kChannelOutflow};
  s.epsilon = 1e-8;
  s.b = {1.0, 0.0};
  s.dt = 0.01;
  s.delta0 = delta0;
  s.snapshots = {0.05, 4.0, 7.0, 10.0};
  s.line_y = 0.0;
  s.line_x0 = -3.0;
  s.line_x1 = 9.0;
  s.line_samples = 601;
  s.bounds = std::pair{0.0, 1.0};
  return s;
}

/// example1, example2, example2-d0.1
inline Scenario preset(const std::string& name) {
  if (name == "example1") return example1_preset();
  if (name == "example2") return example2_preset(10.0);
  if (name == "example2-d0.1") {
    auto s = example2_preset(0.1);
    s.name = "example2-d0.1";
    return s;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// Manufactured solutions. f follows from the Eulerian equation
// u_t - eps lap u + b . grad u + c u = f.

struct ExactSolution {
  std::function<double(double, Vec2)> u;
  std::function<double(double, Vec2)> f;
};

inline ExactSolution manufactured_solution(Manufactured kind, double eps, Vec2 b, double c) {
  using std::numbers::pi;
  switch (kind) {
    case Manufactured::sine: {
      auto u = [](double t, Vec2 x) { return std::exp(-t) * std::sin(pi * x.x) * std::sin(pi * x.y); };
      auto f = [=](double t, Vec2 x) {
        const double e = std::exp(-t);
        const double sx = std::sin(pi * x.x), sy = std::sin(pi * x.y);
        const double cx = std::cos(pi * x.x), cy = std::cos(pi * x.y);
        const double val = e * sx * sy;
        const Vec2 grad{e * pi * cx * sy, e * pi * sx * cy};
        return -val + eps * 2.0 * pi * pi * val + dot(b, grad) + c * val;
      };
      return {u, f};
    }
    case Manufactured::linear: {
      auto u = [](double t, Vec2 x) { return (1.0 + x.x + 2.0 * x.y) * (1.0 + 0.5 * std::sin(4.0 * t)); };
      auto f = [=](double t, Vec2 x) {
        const double g = 1.0 + 0.5 * std::sin(4.0 * t);
        const double p = 1.0 + x.x + 2.0 * x.y;
        return p * 2.0 * std::cos(4.0 * t) + g * dot(b, Vec2{1.0, 2.0}) + c * p * g;
      };
      return {u, f};
    }
    case Manufactured::dilating: {
      auto u = [](double t, Vec2 x) {
        const double s = example1_scale(t);
        return std::exp(-t) * std::sin(pi * x.x / s) * std::sin(pi * x.y / s);
      };
      auto f = [=](double t, Vec2 x) {
        const double s = example1_scale(t);
        const double ds = 20.0 * pi * std::sin(20.0 * pi * t);
        const double e = std::exp(-t), k = pi / s;
        const double sx = std::sin(k * x.x), sy = std::sin(k * x.y);
        const double cx = std::cos(k * x.x), cy = std::cos(k * x.y);
        const double val = e * sx * sy;
        const Vec2 grad{e * k * cx * sy, e * k * sx * cy};
        const double ut = -val - (ds / s) * dot(x, grad);
        return ut + eps * 2.0 * k * k * val + dot(b, grad) + c * val;
      };
      return {u, f};
    }
    case Manufactured::none: break;
  }
  throw ConfigError("no manufactured solution selected");
}

// ---------------------------------------------------------------------------
// Building runtime objects from a scenario

inline Mesh build_mesh(const std::string& source) {
  auto count_after = [&](const std::string& prefix) -> std::optional<Index> {
    if (source.rfind(prefix, 0) != 0) return std::nullopt;
    const std::string rest = source.substr(prefix.size());
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](unsigned char ch) { return std::isdigit(ch); }))
      throw ConfigError("scenario.mesh: expected a positive count after '" + prefix + "'");
    const Index n = std::stoull(rest);
    if (n == 0) throw ConfigError("scenario.mesh: count must be positive");
    return n;
  };
  if (auto n = count_after("unit_square:")) return unit_square(*n);
  if (auto n = count_after("channel:")) return channel_with_hole(*n);
  return load_mesh(source);
}

inline Mesh build_mesh(const Scenario& s) { return build_mesh(s.mesh); }

inline MotionLaw build_motion(const Scenario& s) {
  switch (s.motion) {
    case MotionKind::none: return MotionLaw::stationary_law();
    case MotionKind::example1: return MotionLaw::analytic(example1_map);
    case MotionKind::disc:
      return MotionLaw::elastic_law([](double t, Vec2 ref) {
        // disc nodes sit on the unit circle, channel walls are far away
        if (norm(ref) < 1.5) return Vec2{0.0, 0.5 * std::sin(2.0 * std::numbers::pi * t / 5.0)};
        return Vec2{};
      });
  }
  return MotionLaw::stationary_law();
}

inline Coefficients build_coefficients(const Scenario& s) {
  Coefficients k = Coefficients::constant(s.epsilon, s.b, s.c, s.f, s.mu);
  if (s.manufactured != Manufactured::none) k.f = manufactured_solution(s.manufactured, s.epsilon, s.b, s.c).f;
  return k;
}

/// Boundary conditions; every tag of the mesh must be covered.
inline BoundaryCondition build_boundary(const Scenario& s, const Mesh& mesh) {
  BoundaryCondition bc;
  bc.neumann = s.neumann;
  const auto tags = mesh.tags();
  auto known = [&](int t) { return std::find(tags.begin(), tags.end(), t) != tags.end(); };
  for (int t : s.neumann)
    if (!known(t)) throw ConfigError("scenario.neumann: tag " + std::to_string(t) + " does not exist in the mesh");
  if (s.dirichlet_exact) {
    const auto ex = manufactured_solution(s.manufactured, s.epsilon, s.b, s.c).u;
    for (int t : tags)
      if (!s.neumann.count(t)) bc.dirichlet[t] = ex;
  } else {
    for (const auto& [t, v] : s.dirichlet) {
      if (!known(t)) throw ConfigError("scenario.dirichlet: tag " + std::to_string(t) + " does not exist in the mesh");
      bc.dirichlet[t] = [v](double, Vec2) { return v; };
    }
  }
  for (int t : tags)
    if (!bc.dirichlet.count(t) && !bc.neumann.count(t))
      throw ConfigError("boundary tag " + std::to_string(t) + " has no boundary condition");
  bc.validate();
  return bc;
}

inline std::function<double(Vec2)> build_initial(const Scenario& s) {
  switch (s.initial) {
    case InitialKind::zero: return [](Vec2) { return 0.0; };
    case InitialKind::example1_bump:
      return [](Vec2 y) { return 1600.0 * y.x * (1.0 - y.x) * y.y * (1.0 - y.y); };
    case InitialKind::manufactured: {
      auto ex = manufactured_solution(s.manufactured, s.epsilon, s.b, s.c).u;
      return [ex](Vec2 x) { return ex(0.0, x); };
    }
  }
  return [](Vec2) { return 0.0; };
}

// ---------------------------------------------------------------------------
// Config text

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back({});
  return out;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Entry {
  std::string value;
  std::size_t line;
};

struct Reader {
  std::map<std::string, Entry> entries;  // "section.key"

  double num(const std::string& key) const {
    const auto& e = entries.at(key);
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(e.value, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != e.value.size() || !std::isfinite(v))
      throw ParseError(key + ": expected a number, got '" + e.value + "'", e.line);
    return v;
  }
  long long integer(const std::string& key) const {
    const double v = num(key);
    if (v != std::floor(v)) throw ParseError(key + ": expected an integer", entries.at(key).line);
    return static_cast<long long>(v);
  }
  bool boolean(const std::string& key) const {
    const auto& e = entries.at(key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ParseError(key + ": expected true or false", e.line);
  }
  template <class T>
  T choice(const std::string& key, const std::map<std::string, T>& options) const {
    const auto& e = entries.at(key);
    auto it = options.find(e.value);
    if (it == options.end()) {
      std::string names;
      for (const auto& [n, v] : options) names += (names.empty() ? "" : ", ") + n;
      throw ParseError(key + ": '" + e.value + "' is not one of " + names, e.line);
    }
    return it->second;
  }
  std::vector<double> list(const std::string& key) const {
    const auto& e = entries.at(key);
    std::vector<double> out;
    if (e.value.empty()) return out;
    for (const auto& item : split(e.value, ',')) {
      Reader tmp;
      tmp.entries[key] = {item, e.line};
      out.push_back(tmp.num(key));
    }
    return out;
  }
};

inline const std::map<std::string, MotionKind> kMotion{
    {"none", MotionKind::none}, {"example1", MotionKind::example1}, {"disc", MotionKind::disc}};
inline const std::map<std::string, InitialKind> kInitial{{"zero", InitialKind::zero},
                                                         {"example1", InitialKind::example1_bump},
                                                         {"manufactured", InitialKind::manufactured}};
inline const std::map<std::string, Manufactured> kManufactured{
    {"none", Manufactured::none},
    {"sine", Manufactured::sine},
    {"linear", Manufactured::linear},
    {"dilating", Manufactured::dilating}};
inline const std::map<std::string, Convergence> kConvergence{
    {"none", Convergence::none}, {"space", Convergence::space}, {"time", Convergence::time}};
inline const std::map<std::string, Scheme> kScheme{{"be", Scheme::backward_euler},
                                                   {"cn", Scheme::crank_nicolson}};
inline const std::map<std::string, EvalPolicy> kPolicy{{"midpoint", EvalPolicy::midpoint_gcl},
                                                       {"endpoint", EvalPolicy::endpoint}};

template <class T>
std::string name_of(const std::map<std::string, T>& m, T v) {
  for (const auto& [n, x] : m)
    if (x == v) return n;
  return {};
}

inline const std::set<std::string> kKeys{
    "scenario.name",          "scenario.mesh",          "scenario.motion",         "scenario.degree",
    "scenario.T",             "scenario.initial",       "scenario.manufactured",   "scenario.dirichlet",
    "scenario.neumann",       "scenario.convergence",   "scenario.dt_scaling",     "coefficients.epsilon",
    "coefficients.b",         "coefficients.c",         "coefficients.f",          "coefficients.mu",
    "stepper.scheme",         "stepper.dt",             "stepper.policy",          "stepper.strict_cn_check",
    "stabilization.delta0",   "stabilization.enforce_theory_bounds",               "stabilization.c_inv",
    "output.dir",             "output.snapshots",       "output.line_y",           "output.line_x0",
    "output.line_x1",         "output.line_samples",    "output.bounds"};

}  // namespace config_detail

/// Parses configuration text. Unknown sections or keys, duplicates and
/// malformed values raise ParseError with the line number; a missing
/// stepper.dt or a failed semantic check raises ConfigError.
inline Scenario parse_config(std::istream& in) {
  using namespace config_detail;
  Reader r;
  std::string line, section;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", ln);
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> sections{"scenario", "coefficients", "stepper", "stabilization", "output"};
      if (!sections.count(section)) throw ParseError("unknown section [" + section + "]", ln);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", ln);
    if (section.empty()) throw ParseError("key outside of a section", ln);
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (!kKeys.count(key)) throw ParseError("unknown key '" + key + "'", ln);
    if (!r.entries.emplace(key, Entry{trim(line.substr(eq + 1)), ln}).second)
      throw ParseError("duplicate key '" + key + "'", ln);
  }
  if (!r.entries.count("stepper.dt")) throw ConfigError("missing required key 'stepper.dt'");

  Scenario s;
  auto has = [&](const char* k) { return r.entries.count(k) > 0; };
  if (has("scenario.name")) s.name = r.entries.at("scenario.name").value;
  if (has("scenario.mesh")) s.mesh = r.entries.at("scenario.mesh").value;
  if (has("scenario.motion")) s.motion = r.choice("scenario.motion", kMotion);
  if (has("scenario.degree")) s.degree = static_cast<int>(r.integer("scenario.degree"));
  if (has("scenario.T")) s.T = r.num("scenario.T");
  if (has("scenario.initial")) s.initial = r.choice("scenario.initial", kInitial);
  if (has("scenario.manufactured")) s.manufactured = r.choice("scenario.manufactured", kManufactured);
  if (has("scenario.dirichlet")) {
    const auto& e = r.entries.at("scenario.dirichlet");
    if (e.value == "exact") {
      s.dirichlet_exact = true;
    } else if (!e.value.empty()) {
      for (const auto& item : split(e.value, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ParseError("scenario.dirichlet: expected tag:value pairs", e.line);
        Reader tmp;
        tmp.entries["tag"] = {trim(item.substr(0, colon)), e.line};
        tmp.entries["value"] = {trim(item.substr(colon + 1)), e.line};
        const int tag = static_cast<int>(tmp.integer("tag"));
        if (!s.dirichlet.emplace(tag, tmp.num("value")).second)
          throw ParseError("scenario.dirichlet: tag " + std::to_string(tag) + " repeated", e.line);
      }
    }
  }
  if (has("scenario.neumann"))
    for (double t : r.list("scenario.neumann")) {
      if (t != std::floor(t)) throw ParseError("scenario.neumann: tags are integers", r.entries.at("scenario.neumann").line);
      s.neumann.insert(static_cast<int>(t));
    }
  if (has("scenario.convergence")) s.convergence = r.choice("scenario.convergence", kConvergence);
  if (has("scenario.dt_scaling")) s.dt_scaling = r.num("scenario.dt_scaling");

  if (has("coefficients.epsilon")) s.epsilon = r.num("coefficients.epsilon");
  if (has("coefficients.b")) {
    const auto v = r.list("coefficients.b");
    if (v.size() != 2) throw ParseError("coefficients.b: expected two components", r.entries.at("coefficients.b").line);
    s.b = {v[0], v[1]};
  }
  if (has("coefficients.c")) s.c = r.num("coefficients.c");
  if (has("coefficients.f")) s.f = r.num("coefficients.f");
  if (has("coefficients.mu")) s.mu = r.num("coefficients.mu");

  if (has("stepper.scheme")) s.scheme = r.choice("stepper.scheme", kScheme);
  s.dt = r.num("stepper.dt");
  if (has("stepper.policy")) s.policy = r.choice("stepper.policy", kPolicy);
  if (has("stepper.strict_cn_check")) s.strict_cn_check = r.boolean("stepper.strict_cn_check");

  if (has("stabilization.delta0")) s.delta0 = r.num("stabilization.delta0");
  if (has("stabilization.enforce_theory_bounds"))
    s.enforce_theory_bounds = r.boolean("stabilization.enforce_theory_bounds");
  if (has("stabilization.c_inv")) s.c_inv = r.num("stabilization.c_inv");

  if (has("output.dir")) s.out_dir = r.entries.at("output.dir").value;
  if (has("output.snapshots")) s.snapshots = r.list("output.snapshots");
  if (has("output.line_y")) s.line_y = r.num("output.line_y");
  if (has("output.line_x0")) s.line_x0 = r.num("output.line_x0");
  if (has("output.line_x1")) s.line_x1 = r.num("output.line_x1");
  if (has("output.line_samples")) {
    const auto n = r.integer("output.line_samples");
    if (n < 0) throw ParseError("output.line_samples must be nonnegative", r.entries.at("output.line_samples").line);
    s.line_samples = static_cast<Index>(n);
  }
  if (has("output.bounds")) {
    const auto v = r.list("output.bounds");
    if (v.size() != 2) throw ParseError("output.bounds: expected lo, hi", r.entries.at("output.bounds").line);
    s.bounds = std::pair{v[0], v[1]};
  }
  validate(s);
  return s;
}

inline Scenario parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file " + path);
  return parse_config(static_cast<std::istream&>(f));
}

/// Writes every field so that parse_config reproduces the scenario exactly.
inline void write_config(std::ostream& out, const Scenario& s) {
  using namespace config_detail;
  auto join = [](const auto& xs) {
    std::string r;
    for (const auto& x : xs) r += (r.empty() ? "" : ", ") + fmt(double(x));
    return r;
  };
  out << "[scenario]\n";
  out << "name = " << s.name << "\n";
  out << "mesh = " << s.mesh << "\n";
  out << "motion = " << name_of(kMotion, s.motion) << "\n";
  out << "degree = " << s.degree << "\n";
  out << "T = " << fmt(s.T) << "\n";
  out << "initial = " << name_of(kInitial, s.initial) << "\n";
  out << "manufactured = " << name_of(kManufactured, s.manufactured) << "\n";
  if (s.dirichlet_exact) {
    out << "dirichlet = exact\n";
  } else {
    std::string d;
    for (const auto& [t, v] : s.dirichlet) d += (d.empty() ? "" : ", ") + std::to_string(t) + ":" + fmt(v);
    out << "dirichlet = " << d << "\n";
  }
  out << "neumann = " << join(s.neumann) << "\n";
  out << "convergence = " << name_of(kConvergence, s.convergence) << "\n";
  out << "dt_scaling = " << fmt(s.dt_scaling) << "\n\n";

  out << "[coefficients]\n";
  out << "epsilon = " << fmt(s.epsilon) << "\n";
  out << "b = " << fmt(s.b.x) << ", " << fmt(s.b.y) << "\n";
  out << "c = " << fmt(s.c) << "\n";
  out << "f = " << fmt(s.f) << "\n";
  out << "mu = " << fmt(s.mu) << "\n\n";

  out << "[stepper]\n";
  out << "scheme = " << name_of(kScheme, s.scheme) << "\n";
  out << "dt = " << fmt(s.dt) << "\n";
  out << "policy = " << name_of(kPolicy, s.policy) << "\n";
  out << "strict_cn_check = " << (s.strict_cn_check ? "true" : "false") << "\n\n";

  out << "[stabilization]\n";
  out << "delta0 = " << fmt(s.delta0) << "\n";
  out << "enforce_theory_bounds = " << (s.enforce_theory_bounds ? "true" : "false") << "\n";
  out << "c_inv = " << fmt(s.c_inv) << "\n\n";

  out << "[output]\n";
  if (!s.out_dir.empty()) out << "dir = " << s.out_dir << "\n";
  out << "snapshots = " << join(s.snapshots) << "\n";
  if (s.line_y) out << "line_y = " << fmt(*s.line_y) << "\n";
  out << "line_x0 = " << fmt(s.line_x0) << "\n";
  out << "line_x1 = " << fmt(s.line_x1) << "\n";
  out << "line_samples = " << s.line_samples << "\n";
  if (s.bounds) out << "bounds = " << fmt(s.bounds->first) << ", " << fmt(s.bounds->second) << "\n";
}

inline std::string write_config(const Scenario& s) {
  std::ostringstream o;
  write_config(o, s);
  return o.str();
}

}  // namespace alesupg
