#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "modop/decomposition.hpp"
#include "modop/harness.hpp"
#include "modop/json_io.hpp"
#include "modop/normality.hpp"
#include "modop/regular.hpp"

using namespace modop;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

// Operator files may hold the operator itself or wrap it as {"T": ...}.
OperatorMatrix read_operator(const std::string& path) {
  const Json j = read_json(path);
  if (j.is_object() && j.contains("T") && !j.contains("entries")) return operator_from_json(j.at("T"));
  return operator_from_json(j);
}

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_verify(const harness::SuiteConfig& cfg, const std::string& suite, const std::string& out, bool quiet) {
  auto run_cfg = cfg;
  if (!suite.empty() && suite != "all") run_cfg.suites = {suite};
  const auto report = harness::run_suite(run_cfg);
  const Json j = harness::to_json(report);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw FormatError("cannot write " + out);
    f << j.dump(2) << '\n';
  }
  if (!quiet) {
    for (const auto& s : report.suites) {
      std::cout << s.name << ": " << s.pass << "/" << s.trials << " pass, " << s.fail << " fail, " << s.indeterminate
                << " indeterminate";
      if (s.precondition_failed > 0) std::cout << " (" << s.precondition_failed << " precondition failures)";
      std::cout << '\n';
    }
    std::cout << "wallclock_ms: " << report.wallclock_ms << '\n';
  }
  return report.all_passed() ? kExitPass : kExitFail;
}

int cmd_polar(const std::string& path) {
  const auto t = read_operator(path);
  const auto parts = polar(t);
  const auto rep = polar_residuals(t, parts);
  emit({{"v", to_json(parts.v)}, {"abs", to_json(parts.abs)}, {"report", to_json(rep)}});
  return rep.passed() ? kExitPass : kExitFail;
}

int cmd_normal_check(const std::string& path) {
  const auto t = read_operator(path);
  const auto n = is_normal(t);
  const auto sa = is_selfadjoint(t);
  const auto pos = is_positive(t);
  Json j = {{"normal", {{"holds", n.holds}, {"residual", n.residual}}},
            {"selfadjoint", {{"holds", sa.holds}, {"residual", sa.residual}}},
            {"positive", {{"holds", pos.holds}, {"residual", pos.residual}}}};
  bool ok = n.holds;
  if (n.holds) {
    const auto wa = build_unitary_abs(t);
    const auto ws = build_unitary_star(t);
    j["unitary_abs"] = to_json(wa);
    j["unitary_star"] = to_json(ws);
    ok = wa.report.passed() && ws.report.passed();
  }
  emit(j);
  return ok ? kExitPass : kExitFail;
}

int cmd_kaplansky_search(std::uint64_t seed, int attempts) {
  if (attempts < 1) throw ConfigInvalid("attempts must be at least 1");
  for (int a = 0; a < attempts; ++a) {
    const auto s = harness::mix(seed, 8, static_cast<std::uint64_t>(a));
    const auto inst = harness::gen_kaplansky_instance(s, harness::KaplanskyBranch::Generic);
    const auto k = kaplansky_check(inst.t, inst.s);
    if (k.status == KaplanskyStatus::Agree && !k.lhs.holds && !k.rhs.holds) {
      emit({{"attempt", a}, {"seed", s}, {"T", to_json(inst.t)}, {"S", to_json(inst.s)}, {"report", to_json(k)}});
      return kExitPass;
    }
  }
  emit({{"attempts", attempts}, {"found", false}});
  return kExitFail;
}

int cmd_transform(const std::string& path, bool invert) {
  const Json j = read_json(path);
  if (!invert) {
    emit(to_json(bounded_transform(operator_from_json(j))));
    return kExitPass;
  }
  const RegularOp r = is_bounded_transform(j) ? regular_from_json(j) : RegularOp(operator_from_json(j));
  emit(to_json(inverse_transform(r)));
  return kExitPass;
}

int cmd_replay(const std::string& path) {
  const Json j = read_json(path);
  const auto outcome = harness::replay(j);
  Json out = {{"status", harness::to_string(outcome.status)}, {"report", to_json(outcome.report)}};
  if (!outcome.error.empty()) out["error"] = outcome.error;
  emit(out);
  return outcome.status == harness::TrialStatus::Pass || outcome.status == harness::TrialStatus::Indeterminate
             ? kExitPass
             : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operators on finite-rank Hilbert C*-modules over direct sums of matrix algebras"};
  app.require_subcommand(1);

  harness::SuiteConfig cfg;
  std::string suite = "all", out;
  double tol = 0.0;
  bool quiet = false;
  auto* verify = app.add_subcommand("verify", "Run the randomized property suites");
  verify->add_option("--suite", suite, "Suite name or 'all'");
  verify->add_option("--trials", cfg.trials, "Trials per suite");
  verify->add_option("--seed", cfg.seed, "Master seed");
  verify->add_option("--max-block", cfg.max_block, "Largest algebra block dimension");
  verify->add_option("--max-rank", cfg.max_rank, "Largest module rank");
  auto* tol_opt = verify->add_option("--tol", tol, "Base tolerance");
  verify->add_option("--out", out, "Write the JSON report here");
  verify->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
  verify->add_option("--inject-fault", cfg.fault_suite, "Perturb one construction in this suite");
  verify->add_flag("--quiet", quiet, "No per-suite summary");

  std::string file;
  auto* polar_cmd = app.add_subcommand("polar", "Polar decomposition of an operator");
  polar_cmd->add_option("file", file, "Operator JSON")->required();

  auto* normal_cmd = app.add_subcommand("normal-check", "Normality and its unitary witnesses");
  normal_cmd->add_option("file", file, "Operator JSON")->required();

  std::uint64_t search_seed = 1;
  int attempts = 50;
  auto* search = app.add_subcommand("kaplansky-search", "Find T, S with TS normal and ST not");
  search->add_option("--seed", search_seed, "Seed");
  search->add_option("--attempts", attempts, "Instances to try");

  bool invert = false;
  auto* transform = app.add_subcommand("transform", "Bounded transform of an operator, or its inverse");
  transform->add_flag("--invert", invert, "Map a bounded transform back to its operator");
  transform->add_option("file", file, "Operator JSON")->required();

  auto* replay = app.add_subcommand("replay", "Re-run a failure payload from a report");
  replay->add_option("file", file, "Failure payload JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }

  try {
    if (*tol_opt) cfg.tol = tol;
    if (*verify) return cmd_verify(cfg, suite, out, quiet);
    if (*polar_cmd) return cmd_polar(file);
    if (*normal_cmd) return cmd_normal_check(file);
    if (*search) return cmd_kaplansky_search(search_seed, attempts);
    if (*transform) return cmd_transform(file, invert);
    if (*replay) return cmd_replay(file);
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitInput;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
