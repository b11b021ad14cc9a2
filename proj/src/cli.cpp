#include "stringlmi/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "stringlmi/analysis.hpp"
#include "stringlmi/error.hpp"
#include "stringlmi/kernels.hpp"
#include "stringlmi/lmi.hpp"
#include "stringlmi/lyapunov.hpp"
#include "stringlmi/wave_sim.hpp"

#ifndef STRINGLMI_VERSION
#define STRINGLMI_VERSION "0.0.0"
#endif

namespace stringlmi::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    throw ConfigError("cli", std::string("certificate field ") + what + " is not a matrix");
  }
  Eigen::MatrixXd m(j.size(), j[0].size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != j[0].size()) {
      throw ConfigError("cli", std::string("certificate field ") + what + " is ragged");
    }
    for (std::size_t c = 0; c < j[r].size(); ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json diagnostics_json(const SolveDiagnostics& d) {
  return {{"iterations", d.iterations},
          {"objective", d.objective},
          {"primal_infeasibility", d.primal_infeasibility},
          {"dual_infeasibility", d.dual_infeasibility},
          {"relative_gap", d.relative_gap},
          {"relative_slack", d.relative_slack},
          {"converged", d.converged},
          {"iteration_cap", d.iteration_cap},
          {"singular_newton", d.singular_newton},
          {"message", d.message}};
}

json verification_json(const VerificationReport& v) {
  return {{"passed", v.passed},
          {"min_eig_P", v.min_eig_P},
          {"min_eig_S", v.min_eig_S},
          {"min_eig_R", v.min_eig_R},
          {"max_eig_psi", v.max_eig_psi},
          {"failures", v.failures}};
}

json system_json(const SystemDescription& sys) {
  return {{"A", to_json(sys.A)},
          {"B", to_json(sys.B)},
          {"K", to_json(sys.K)},
          {"c", sys.c},
          {"c0", sys.c0},
          {"hash", config::hex64(sys.hash())}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct Context {
  const config::RunConfig& cfg;
  fs::path dir;
  std::ostream& out;
  json timings = json::object();
  std::vector<std::string> outputs;

  void emit(const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ConfigError("cli", "cannot write " + (dir / name).string());
    f << text;
    outputs.push_back(name);
  }

  template <class F>
  auto timed(const std::string& label, F&& f) {
    const auto t0 = Clock::now();
    auto r = f();
    timings[label] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return r;
  }
};

analysis::SpeedSearchOptions search_options(const config::RunConfig& cfg) {
  analysis::SpeedSearchOptions s;
  s.scan_points = cfg.analysis.scan_points;
  s.tol = cfg.analysis.tol;
  s.margin = cfg.margin;
  s.solver = cfg.solver;
  return s;
}

int cmd_check(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const int order = cfg.analysis.order;
  const LmiBlocks blocks = build_blocks(cfg.system, order);
  const CertifyReport rep =
      ctx.timed("solve", [&] { return certify(blocks, cfg.margin, cfg.solver); });
  const bool ok = rep.status == SolveStatus::kFeasible;
  json report = {{"command", "check"},
                 {"status", ok ? "certified-stable" : "not-certified"},
                 {"order", order},
                 {"system", system_json(cfg.system)},
                 {"margin", cfg.margin},
                 {"diagnostics", diagnostics_json(rep.diagnostics)}};
  if (rep.verification) report["verification"] = verification_json(*rep.verification);
  if (ok) {
    ctx.emit("certificate.json", certificate_to_json(*rep.certificate, *rep.verification, cfg.system));
  }
  ctx.emit("check.json", report.dump(2) + "\n");
  ctx.out << (ok ? "certified-stable" : "not-certified") << " (N=" << order << ", c=" << cfg.system.c
          << ", c0=" << cfg.system.c0 << ")\n";
  return ok ? kOk : kNotCertified;
}

int cmd_cmin(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto opts = search_options(cfg);
  std::ostringstream csv;
  csv << "c0,N,c_min,last_not_certified,solves\n";
  json rows = json::array();
  for (int order : cfg.analysis.orders) {
    const auto r = ctx.timed("N=" + std::to_string(order), [&] {
      return analysis::min_speed(cfg.system, cfg.system.c0, order, cfg.analysis.bracket, opts);
    });
    csv << cfg.system.c0 << ',' << order << ',';
    if (r.c_min) csv << *r.c_min;
    csv << ',';
    if (r.last_not_certified) csv << *r.last_not_certified;
    csv << ',' << r.solves << '\n';
    rows.push_back({{"order", order},
                    {"c_min", optional_json(r.c_min)},
                    {"last_not_certified", optional_json(r.last_not_certified)},
                    {"solves", r.solves}});
    ctx.out << "N=" << order << " c_min=";
    if (r.c_min) {
      ctx.out << *r.c_min;
    } else {
      ctx.out << "none";
    }
    ctx.out << '\n';
  }
  ctx.emit("cmin.csv", csv.str());
  json report = {{"command", "cmin"},
                 {"system", system_json(cfg.system)},
                 {"bracket", {cfg.analysis.bracket.first, cfg.analysis.bracket.second}},
                 {"tol", cfg.analysis.tol},
                 {"results", rows}};
  ctx.emit("cmin.json", report.dump(2) + "\n");
  return kOk;
}

int cmd_chart(Context& ctx) {
  const auto& cfg = ctx.cfg;
  analysis::ChartOptions opts;
  opts.search = search_options(cfg);
  opts.threads = cfg.analysis.threads;
  const std::vector<double> grid =
      cfg.analysis.c0_grid.empty() ? std::vector<double>{cfg.system.c0} : cfg.analysis.c0_grid;
  const auto chart = ctx.timed("chart", [&] {
    return analysis::stability_chart(cfg.system, grid, cfg.analysis.orders, cfg.analysis.bracket,
                                     opts);
  });
  ctx.emit("chart.csv", chart.to_csv());
  const auto violations = chart.hierarchy_violations(cfg.analysis.tol);
  int errors = 0;
  for (const auto& cell : chart.cells) errors += cell.status == analysis::CellStatus::kError;
  json report = {{"command", "chart"},
                 {"system_hash", config::hex64(chart.system_hash)},
                 {"margin", chart.margin},
                 {"bracket", {chart.bracket.first, chart.bracket.second}},
                 {"tol", chart.tol},
                 {"error_cells", errors},
                 {"hierarchy_violations", violations}};
  ctx.emit("chart.json", report.dump(2) + "\n");
  ctx.out << chart.cells.size() << " cells, " << errors << " errors, " << violations.size()
          << " hierarchy violations\n";
  return kOk;
}

int cmd_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto traj = ctx.timed("simulate", [&] {
    return wave::simulate(cfg.system, cfg.initial_condition(), cfg.simulation.options);
  });
  ctx.emit("trajectory.csv", traj.to_csv());
  if (!traj.snapshots.empty()) ctx.emit("snapshots.csv", traj.snapshots_csv());

  json report = {{"command", "simulate"},
                 {"system", system_json(cfg.system)},
                 {"M", traj.M},
                 {"dt", traj.dt},
                 {"T", cfg.simulation.options.T},
                 {"scheme", traj.scheme == wave::FieldScheme::kSymplectic ? "symplectic"
                                                                          : "forward_euler"},
                 {"hnorm_initial", traj.samples.front().hnorm},
                 {"hnorm_final", traj.samples.back().hnorm},
                 {"outcome", wave::to_string(traj.outcome)},
                 {"blowup_time", optional_json(traj.blowup_time)}};

  if (cfg.simulation.lyapunov && traj.snapshots.size() >= 3 && !traj.blowup_time) {
    const CertifyReport rep = ctx.timed("certify", [&] {
      return certify(cfg.system, cfg.analysis.order, cfg.margin, cfg.solver);
    });
    if (rep.status == SolveStatus::kFeasible) {
      const auto series = lyapunov::check_decay(traj, *rep.certificate);
      const auto resid = lyapunov::check_projection_derivative(traj, cfg.analysis.order);
      ctx.emit("lyapunov.csv", series.to_csv());
      report["lyapunov"] = {{"order", cfg.analysis.order},
                            {"nonincreasing", series.nonincreasing},
                            {"max_increment", series.max_increment},
                            {"tolerance", series.tolerance},
                            {"decay_rate", optional_json(series.decay_rate)},
                            {"ratio_band", {series.ratio_lo, series.ratio_hi}},
                            {"projection_residual_max", resid.max_residual},
                            {"projection_residual_rms", resid.rms_residual},
                            {"projection_residual_integrated", resid.integrated_max}};
    } else {
      report["lyapunov"] = "skipped: not certified at order " + std::to_string(cfg.analysis.order);
    }
  }
  ctx.emit("simulate.json", report.dump(2) + "\n");
  ctx.out << wave::to_string(traj.outcome) << " (H(T)/H(0) = "
          << (traj.samples.front().hnorm > 0 ? traj.samples.back().hnorm / traj.samples.front().hnorm
                                             : 0.0)
          << ")\n";
  return kOk;
}

int cmd_verify(Context& ctx, const fs::path& cert_path) {
  std::ifstream in(cert_path);
  if (!in) throw ConfigError("cli", "cannot read certificate " + cert_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const Certificate cert = certificate_from_json(ss.str());
  const LmiBlocks blocks = build_blocks(ctx.cfg.system, cert.order);
  const VerificationReport v = verify_certificate(blocks, cert);
  json report = {{"command", "verify"},
                 {"certificate", cert_path.string()},
                 {"system", system_json(ctx.cfg.system)},
                 {"verification", verification_json(v)}};
  ctx.emit("verify.json", report.dump(2) + "\n");
  ctx.out << (v.passed ? "verified" : "rejected");
  for (const auto& f : v.failures) ctx.out << "; " << f;
  ctx.out << '\n';
  return v.passed ? kOk : kNotCertified;
}

int cmd_export(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const LmiBlocks blocks = build_blocks(cfg.system, cfg.analysis.order);
  const std::string name = "problem_N" + std::to_string(cfg.analysis.order) + ".dat-s";
  ctx.emit(name, export_sdpa(build_affine_system(blocks, cfg.margin)));
  ctx.out << "wrote " << (ctx.dir / name).string() << '\n';
  return kOk;
}

int dispatch(const CommandLine& cmd, const config::RunConfig& cfg, Context& ctx) {
  if (cmd.command == "check") return cmd_check(ctx);
  if (cmd.command == "cmin") return cmd_cmin(ctx);
  if (cmd.command == "chart") return cmd_chart(ctx);
  if (cmd.command == "simulate") return cmd_simulate(ctx);
  if (cmd.command == "export") return cmd_export(ctx);
  if (cmd.command == "verify") {
    return cmd_verify(ctx, cmd.certificate ? *cmd.certificate : cfg.out / "certificate.json");
  }
  throw ConfigError("cli", "unknown command '" + cmd.command + "'");
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const DivergenceError*>(&e)) return kNumericFailure;
  return kConfigError;  // config, domain, precondition and compatibility errors are input errors
}

}  // namespace

const char* tool_version() noexcept { return STRINGLMI_VERSION; }

std::string certificate_to_json(const Certificate& cert, const VerificationReport& check,
                                const SystemDescription& sys) {
  json j = {{"order", cert.order},
            {"system", system_json(sys)},
            {"P", to_json(cert.P)},
            {"S", to_json(cert.S)},
            {"R", to_json(cert.R)},
            {"margin", cert.margin},
            {"slack", cert.slack},
            {"relative_slack", cert.relative_slack},
            {"iterations", cert.iterations},
            {"residuals",
             {{"primal", cert.primal_residual}, {"dual", cert.dual_residual}, {"gap", cert.gap}}},
            {"verification", verification_json(check)}};
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("cli", std::string("invalid certificate JSON: ") + e.what());
  }
  Certificate cert;
  try {
    cert.order = j.at("order").get<int>();
    cert.P = matrix_from(j.at("P"), "P");
    const Eigen::MatrixXd S = matrix_from(j.at("S"), "S");
    const Eigen::MatrixXd R = matrix_from(j.at("R"), "R");
    if (S.rows() != 2 || S.cols() != 2 || R.rows() != 2 || R.cols() != 2) {
      throw ConfigError("cli", "certificate S and R must be 2x2");
    }
    cert.S = S;
    cert.R = R;
    cert.margin = j.value("margin", 1e-6);
    cert.slack = j.value("slack", 0.0);
    cert.relative_slack = j.value("relative_slack", 0.0);
    cert.iterations = j.value("iterations", 0);
  } catch (const json::exception& e) {
    throw ConfigError("cli", std::string("malformed certificate: ") + e.what());
  }
  return cert;
}

int run(const CommandLine& cmd, std::ostream& out, std::ostream& err) {
  try {
    config::RunConfig cfg = config::load_config(cmd.config);
    if (cmd.out) cfg.out = *cmd.out;
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw ConfigError("cli", "cannot create output directory " + cfg.out.string());

    Context ctx{cfg, cfg.out, out};
    const std::string started = utc_now();
    const auto t0 = Clock::now();
    const int code = dispatch(cmd, cfg, ctx);
    ctx.timings["total"] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

    json manifest = {{"command", cmd.command},
                     {"tool_version", tool_version()},
                     {"config_hash", config::hex64(cfg.hash)},
                     {"system_hash", config::hex64(cfg.system.hash())},
                     {"kernels", std::string(kernels::active().name)},
                     {"started_at", started},
                     {"timings_ms", ctx.timings},
                     {"outputs", ctx.outputs},
                     {"exit_code", code}};
    std::ofstream(cfg.out / ("manifest_" + cmd.command + ".json")) << manifest.dump(2) << "\n";
    return code;
  } catch (const Error& e) {
    err << "error [" << e.code() << "]: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error [cli.internal]: " << e.what() << '\n';
    return kNumericFailure;
  }
}

}  // namespace stringlmi::cli
