#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "cone_lpv/conditions.hpp"
#include "cone_lpv/errors.hpp"
#include "cone_lpv/io.hpp"
#include "cone_lpv/jsr.hpp"
#include "cone_lpv/verify.hpp"

namespace cone_lpv::cli {

namespace {

struct AnalyzeArgs {
  std::string system_path;
  std::string analysis = "stability";
  std::optional<std::string> output;
};

struct VerifyArgs {
  std::string system_path;
  std::string certificate_path;
};

struct JsrArgs {
  std::string system_path;
  std::size_t max_depth = 8;
};

struct Common {
  double tol_psd = kDefaultTolPsd;
  double tol_eq = kDefaultTolEq;
  double tol_margin = kDefaultTolMargin;
  double epsilon = SolveOptions{}.epsilon;
  std::size_t max_iters = SolveOptions{}.max_iters;
  std::string method{to_string(SolveOptions{}.method)};
  bool json = false;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("cone_lpv", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CONE_LPV_LOG")) log->set_level(spdlog::level::from_str(env));
  return log;
}

void print_margins(std::ostream& out, const VerificationReport& report) {
  out << fmt::format("  {:<34} {:>14} {:>14}  {}\n", "constraint", "value", "bound", "status");
  for (const auto& m : report.margins)
    out << fmt::format("  {:<34} {:>14.6e} {:>3}{:>11.4e}  {}\n", m.label, m.value,
                       m.kind == ConstraintMargin::Kind::at_least ? ">=" : "<=", m.bound,
                       m.passed ? "ok" : "FAIL");
  for (const auto& p : report.problems) out << "  problem: " << p << '\n';
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::existence_proven:
    case Outcome::necessary_condition_feasible: return kExitOk;
    case Outcome::nonexistence_proven: return kExitNonexistence;
    case Outcome::inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

int cmd_analyze(const AnalyzeArgs& a, const Common& c, std::ostream& out, spdlog::logger& log) {
  const PolytopicSystem system = io::load_system(a.system_path);
  const Analysis analysis = parse_analysis(a.analysis);
  require_supports(system, analysis);

  AnalyzeOptions opts;
  opts.solve.epsilon = c.epsilon;
  opts.solve.max_iters = c.max_iters;
  opts.solve.method = parse_method(c.method);
  opts.tol_psd = c.tol_psd;
  opts.tol_eq = c.tol_eq;
  opts.tol_margin = c.tol_margin;
  log.info("analyze {} on {} (N={}, n_x={})", to_string(analysis), a.system_path,
           system.vertex_count(), system.state_dim());

  Verdict v;
  try {
    v = analyze(system, analysis, opts);
  } catch (const NumericalFailure& e) {
    log.error("numerical failure: {}", e.what());
    v.analysis = analysis;
    v.outcome = Outcome::inconclusive;
  }
  log.info("primal {} iterations, dual {} iterations, {:.3f} s", v.diagnostics.primal_iterations,
           v.diagnostics.dual_iterations, v.diagnostics.wall_seconds);

  std::optional<io::json> cert_json;
  std::optional<VerificationReport> report;
  if (v.existence) {
    cert_json = io::to_json(*v.existence);
    report = verify_existence(system, *v.existence, c.tol_margin);
  } else if (v.nonexistence) {
    cert_json = io::to_json(*v.nonexistence);
    report = verify_nonexistence(system, *v.nonexistence, c.tol_psd, c.tol_eq);
  }
  if (cert_json && a.output) {
    io::write_json(*a.output, *cert_json);
    log.info("certificate written to {}", *a.output);
  }

  if (c.json) {
    io::json j = io::to_json(v);
    if (report) j["verification"] = io::to_json(*report);
    out << j.dump(2) << '\n';
  } else {
    out << "analysis:   " << to_string(analysis) << '\n';
    out << "outcome:    " << to_string(v.outcome) << '\n';
    out << fmt::format("iterations: primal {}, dual {}\n", v.diagnostics.primal_iterations,
                       v.diagnostics.dual_iterations);
    out << fmt::format("residuals:  primal {:.3e}, dual {:.3e}\n", v.diagnostics.primal_residual,
                       v.diagnostics.dual_residual);
    out << fmt::format("wall time:  {:.3f} s\n", v.diagnostics.wall_seconds);
    if (report) {
      out << "certificate margins:\n";
      print_margins(out, *report);
    }
    if (cert_json && a.output) out << "certificate: " << *a.output << '\n';
  }
  return exit_code(v.outcome);
}

int cmd_verify(const VerifyArgs& a, const Common& c, std::ostream& out, spdlog::logger& log) {
  const PolytopicSystem system = io::load_system(a.system_path);
  const io::Certificate cert = io::load_certificate(a.certificate_path, system.vertex_count());
  const VerificationReport report = std::visit(
      [&](const auto& cc) {
        if constexpr (std::is_same_v<std::decay_t<decltype(cc)>, ExistenceCertificate>)
          return verify_existence(system, cc, c.tol_margin);
        else
          return verify_nonexistence(system, cc, c.tol_psd, c.tol_eq);
      },
      cert);
  log.info("verified {} constraints", report.margins.size());
  if (c.json) {
    out << io::to_json(report).dump(2) << '\n';
  } else {
    out << "analysis: " << to_string(report.analysis) << '\n';
    out << "kind:     " << (report.existence ? "existence" : "nonexistence") << '\n';
    print_margins(out, report);
    if (const auto* w = report.worst())
      out << fmt::format("worst:    {} (slack {:.4e})\n", w->label, w->slack());
    out << "result:   " << (report.passed ? "PASS" : "FAIL") << '\n';
  }
  return report.passed ? kExitOk : kExitVerifyFailed;
}

int cmd_jsr(const JsrArgs& a, const Common& c, std::ostream& out, spdlog::logger& log) {
  const PolytopicSystem system = io::load_system(a.system_path);
  const jsr::JsrBounds b = jsr::bounds(system, a.max_depth);
  log.info("enumerated {} products", b.products);
  if (c.json) {
    out << io::to_json(b).dump(2) << '\n';
    return kExitOk;
  }
  out << fmt::format("{:>5}  {:>12}  {:>12}\n", "depth", "lower", "upper");
  for (const auto& d : b.per_depth) out << fmt::format("{:>5}  {:>12.8f}  {:>12.8f}\n", d.depth, d.lower, d.upper);
  out << fmt::format("lower bound: {:.8f}\nupper bound: {:.8f}\n", b.lower, b.upper);
  out << "witness word:";
  for (int k : b.witness_word) out << ' ' << k;
  out << '\n';
  return kExitOk;
}

void add_common(CLI::App& app, Common& c) {
  app.add_option("--tol-psd", c.tol_psd, "PSD tolerance for nonexistence certificates")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--tol-eq", c.tol_eq, "Equality tolerance for nonexistence certificates")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--tol-margin", c.tol_margin, "Strictness margin for existence certificates")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--json", c.json, "Write the report as JSON");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certificates of existence and nonexistence for poly-quadratic Lyapunov functions"};
  app.require_subcommand(1);

  Common common;
  AnalyzeArgs analyze_args;
  VerifyArgs verify_args;
  JsrArgs jsr_args;

  auto* analyze_cmd = app.add_subcommand("analyze", "Decide an analysis and emit a certificate");
  analyze_cmd->add_option("system", analyze_args.system_path, "System JSON file")->required();
  analyze_cmd->add_option("--analysis", analyze_args.analysis, "Analysis kind")
      ->check(CLI::IsMember({"stability", "detectability", "stabilizability", "ct-cqlf", "ct_cqlf"}));
  analyze_cmd->add_option("--epsilon", common.epsilon, "Relative strictness margin of the primal solve")
      ->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--max-iters", common.max_iters, "Iteration cap per side")
      ->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--method", common.method, "Projection splitting used by both solves")
      ->check(CLI::IsMember({"douglas-rachford", "dykstra", "alternating"}));
  analyze_cmd->add_option("--output", analyze_args.output, "Write the certificate to this file");
  add_common(*analyze_cmd, common);

  auto* verify_cmd = app.add_subcommand("verify", "Check a certificate against a system");
  verify_cmd->add_option("system", verify_args.system_path, "System JSON file")->required();
  verify_cmd->add_option("certificate", verify_args.certificate_path, "Certificate JSON file")->required();
  add_common(*verify_cmd, common);

  auto* jsr_cmd = app.add_subcommand("jsr", "Brute-force joint spectral radius bounds");
  jsr_cmd->add_option("system", jsr_args.system_path, "System JSON file")->required();
  jsr_cmd->add_option("--max-depth", jsr_args.max_depth, "Longest product length")
      ->check(CLI::PositiveNumber);
  jsr_cmd->add_flag("--json", common.json, "Write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  auto log = make_logger(err);
  try {
    if (*analyze_cmd) return cmd_analyze(analyze_args, common, out, *log);
    if (*verify_cmd) return cmd_verify(verify_args, common, out, *log);
    return cmd_jsr(jsr_args, common, out, *log);
  } catch (const io::InputError& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& f : e.findings()) err << "  - " << f << '\n';
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInputError;
}

}  // namespace cone_lpv::cli
