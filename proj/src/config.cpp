#include "stringlmi/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stringlmi/error.hpp"
#include "stringlmi/legendre.hpp"

namespace stringlmi::config {

namespace {

using json = nlohmann::json;
constexpr const char* kModule = "config";

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(kModule, msg); }

void only_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) fail(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) fail("unknown key '" + k + "' in " + where);
  }
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) fail(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(what + " must be finite");
  return v;
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) fail(what + " must be an integer");
  return j.get<int>();
}

Eigen::MatrixXd matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail(what + " must be a nonempty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(what + " rows must be nonempty arrays");
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(what + " is ragged");
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = number(j[r][c], what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

std::vector<double> numbers(const json& j, const std::string& what) {
  if (!j.is_array()) fail(what + " must be an array");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(number(e, what));
  return out;
}

SystemDescription parse_system(const json& j, std::string& preset) {
  only_keys(j, "system", {"preset", "A", "B", "K", "c", "c0"});
  SystemDescription sys;
  if (j.contains("preset")) {
    if (j.contains("A") || j.contains("B") || j.contains("K")) {
      fail("system: give either a preset or matrices, not both");
    }
    preset = j["preset"].get<std::string>();
    if (preset == "hurwitz_pair") {
      sys = presets::hurwitz_pair();
    } else if (preset == "unstable_open_loop") {
      sys = presets::unstable_open_loop();
    } else if (preset == "unstable_closed_loop") {
      sys = presets::unstable_closed_loop();
    } else {
      fail("unknown preset '" + preset + "'");
    }
  } else {
    for (const char* key : {"A", "B", "K", "c", "c0"}) {
      if (!j.contains(key)) fail(std::string("system is missing '") + key + "'");
    }
    sys.A = matrix(j["A"], "A");
    sys.B = matrix(j["B"], "B");
    sys.K = matrix(j["K"], "K");
  }
  if (j.contains("c")) sys.c = number(j["c"], "c");
  if (j.contains("c0")) sys.c0 = number(j["c0"], "c0");
  try {
    sys.validate();
  } catch (const DomainError& e) {
    fail(std::string("system: ") + e.what());
  }
  return sys;
}

void check_order(int n, const std::string& what) {
  if (n < 0 || n > legendre::kMaxOrder) {
    fail(what + " must lie in [0, " + std::to_string(legendre::kMaxOrder) + "]");
  }
}

AnalysisConfig parse_analysis(const json& j) {
  only_keys(j, "analysis", {"order", "orders", "bracket", "tol", "scan_points", "c0_grid", "threads"});
  AnalysisConfig a;
  if (j.contains("order")) a.order = integer(j["order"], "analysis.order");
  check_order(a.order, "analysis.order");
  if (j.contains("orders")) {
    a.orders.clear();
    if (!j["orders"].is_array() || j["orders"].empty()) fail("analysis.orders must be a nonempty array");
    for (const auto& e : j["orders"]) a.orders.push_back(integer(e, "analysis.orders"));
  }
  for (int n : a.orders) check_order(n, "analysis.orders entry");
  if (j.contains("bracket")) {
    const auto b = numbers(j["bracket"], "analysis.bracket");
    if (b.size() != 2) fail("analysis.bracket needs two values");
    a.bracket = {b[0], b[1]};
  }
  if (!(a.bracket.first > 0.0 && a.bracket.first < a.bracket.second)) {
    fail("analysis.bracket must satisfy 0 < lo < hi");
  }
  if (j.contains("tol")) a.tol = number(j["tol"], "analysis.tol");
  if (!(a.tol > 0.0)) fail("analysis.tol must be positive");
  if (j.contains("scan_points")) a.scan_points = integer(j["scan_points"], "analysis.scan_points");
  if (a.scan_points < 2) fail("analysis.scan_points must be at least 2");
  if (j.contains("c0_grid")) a.c0_grid = numbers(j["c0_grid"], "analysis.c0_grid");
  for (double c0 : a.c0_grid) {
    if (!(c0 > 0.0)) fail("analysis.c0_grid entries must be positive");
  }
  if (j.contains("threads")) {
    const int t = integer(j["threads"], "analysis.threads");
    if (t < 0) fail("analysis.threads must be nonnegative");
    a.threads = static_cast<unsigned>(t);
  }
  return a;
}

SimulationConfig parse_simulation(const json& j, const SystemDescription& sys) {
  only_keys(j, "simulation", {"M", "cfl", "dt", "T", "scheme", "ode", "initial", "sample_stride",
                              "snapshot_stride", "lyapunov", "compat_tol"});
  SimulationConfig s;
  auto& o = s.options;
  if (j.contains("M")) o.M = integer(j["M"], "simulation.M");
  if (o.M < 3) fail("simulation.M must be at least 3");
  if (j.contains("cfl")) o.cfl = number(j["cfl"], "simulation.cfl");
  if (!(o.cfl > 0.0 && o.cfl <= wave::kMaxCfl)) fail("simulation.cfl must lie in (0, 0.5]");
  if (j.contains("dt")) {
    o.dt = number(j["dt"], "simulation.dt");
    if (!(*o.dt > 0.0)) fail("simulation.dt must be positive");
    if (sys.c * *o.dt * o.M > wave::kMaxCfl * (1.0 + 1e-12)) {
      fail("simulation.dt violates the CFL limit c dt / dx <= 0.5");
    }
  }
  if (j.contains("T")) o.T = number(j["T"], "simulation.T");
  if (!(o.T > 0.0)) fail("simulation.T must be positive");
  if (j.contains("scheme")) {
    const auto v = j["scheme"].get<std::string>();
    if (v == "symplectic") {
      o.scheme = wave::FieldScheme::kSymplectic;
    } else if (v == "forward_euler") {
      o.scheme = wave::FieldScheme::kForwardEuler;
    } else {
      fail("simulation.scheme must be 'symplectic' or 'forward_euler'");
    }
  }
  if (j.contains("ode")) {
    const auto v = j["ode"].get<std::string>();
    if (v == "euler") {
      o.ode = wave::OdeScheme::kEuler;
    } else if (v == "rk4") {
      o.ode = wave::OdeScheme::kRk4;
    } else {
      fail("simulation.ode must be 'euler' or 'rk4'");
    }
  }
  if (j.contains("sample_stride")) o.sample_stride = integer(j["sample_stride"], "simulation.sample_stride");
  if (o.sample_stride < 1) fail("simulation.sample_stride must be at least 1");
  if (j.contains("snapshot_stride")) {
    o.snapshot_stride = integer(j["snapshot_stride"], "simulation.snapshot_stride");
  }
  if (o.snapshot_stride < 0) fail("simulation.snapshot_stride must be nonnegative");
  if (j.contains("compat_tol")) o.compat_tol = number(j["compat_tol"], "simulation.compat_tol");
  if (!(o.compat_tol > 0.0)) fail("simulation.compat_tol must be positive");
  if (j.contains("lyapunov")) s.lyapunov = j["lyapunov"].get<bool>();
  if (j.contains("initial")) {
    const json& ic = j["initial"];
    only_keys(ic, "simulation.initial", {"kind", "X0"});
    const auto kind = ic.value("kind", std::string("cosine"));
    if (kind == "cosine") {
      s.initial = InitialKind::kCosine;
    } else if (kind == "zero") {
      s.initial = InitialKind::kZero;
    } else {
      fail("simulation.initial.kind must be 'cosine' or 'zero'");
    }
    if (ic.contains("X0")) s.X0 = numbers(ic["X0"], "simulation.initial.X0");
  }
  if (!s.X0.empty() && static_cast<int>(s.X0.size()) != sys.n()) {
    fail("simulation.initial.X0 must have " + std::to_string(sys.n()) + " entries");
  }
  return s;
}

void parse_solver(const json& j, RunConfig& rc) {
  only_keys(j, "solver", {"margin", "max_iterations", "tolerance"});
  if (j.contains("margin")) rc.margin = number(j["margin"], "solver.margin");
  if (!(rc.margin > 0.0)) fail("solver.margin must be positive");
  if (j.contains("max_iterations")) {
    rc.solver.max_iterations = integer(j["max_iterations"], "solver.max_iterations");
  }
  if (rc.solver.max_iterations < 1) fail("solver.max_iterations must be at least 1");
  if (j.contains("tolerance")) rc.solver.tolerance = number(j["tolerance"], "solver.tolerance");
  if (!(rc.solver.tolerance > 0.0)) fail("solver.tolerance must be positive");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

Eigen::VectorXd RunConfig::initial_state() const {
  if (simulation.X0.empty()) return Eigen::VectorXd::Ones(system.n());
  return Eigen::Map<const Eigen::VectorXd>(simulation.X0.data(),
                                           static_cast<Eigen::Index>(simulation.X0.size()));
}

wave::InitialCondition RunConfig::initial_condition() const {
  if (simulation.initial == InitialKind::kZero) return wave::InitialCondition::zero(system.n());
  return wave::InitialCondition::cosine_profile(system, initial_state());
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  RunConfig rc;
  try {
    only_keys(j, "config", {"system", "analysis", "simulation", "solver", "out"});
    if (!j.contains("system")) fail("config needs a 'system' block");
    rc.system = parse_system(j["system"], rc.preset);
    rc.analysis = parse_analysis(j.value("analysis", json::object()));
    rc.simulation = parse_simulation(j.value("simulation", json::object()), rc.system);
    parse_solver(j.value("solver", json::object()), rc);
    if (j.contains("out")) rc.out = j["out"].get<std::string>();
  } catch (const json::exception& e) {
    // type mismatches such as a number where a string is expected
    fail(std::string("malformed value: ") + e.what());
  }
  rc.canonical = j.dump();  // std::map keys: sorted, compact
  rc.hash = fnv1a(rc.canonical);
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace stringlmi::config
