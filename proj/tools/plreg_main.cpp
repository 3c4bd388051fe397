// Experiment runner: binds the verification modules into reproducible
// campaigns driven by a key = value config file.
//
// Subcommands
//   solve              one solver run, fields + manifest on disk
//   verify <scenario>  run a verification scenario and write report.json
//   calibrate          sweep the corpus and freeze constants.lock
//   report <dir>       print the per-check table of a finished run
//
// Exit codes: 0 pass, 1 aggregate failure, 2 config error, 3 precondition.

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <vector>
#include <string>

#include <CLI11.hpp>

#include "plreg/config/config.hpp"
#include "plreg/core/reduce.hpp"
#include "plreg/report/record.hpp"
#include "plreg/scenarios/scenarios.hpp"

namespace fs = std::filesystem;
using namespace plreg;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  std::string constants_path;
};

ConfigFile load_config(const CommonArgs& args) {
  if (args.config_path.empty()) throw ConfigError("missing --config");
  return ConfigFile::parse_file(args.config_path);
}

ScenarioSettings make_settings(const ConfigFile& cfg, const CommonArgs& args) {
  auto st = settings_from_config(cfg);
  if (args.seed_set) st.seed = args.seed;
  return st;
}

std::string resolve_out(const ConfigFile& cfg, const CommonArgs& args,
                        const std::string& fallback) {
  if (!args.out_dir.empty()) return args.out_dir;
  return cfg.get_string("run.out", fallback);
}

int finish(RunReport rep, const ConfigFile& cfg, const std::string& outdir,
           double wall_ms) {
  rep.config_digest = cfg.digest();
  rep.wall_ms = wall_ms;
  fs::create_directories(outdir);
  rep.write_json(outdir + "/report.json");
  rep.write_csv(outdir + "/checks.csv");
  int passed = 0;
  for (const auto& c : rep.checks) passed += c.pass ? 1 : 0;
  std::cout << rep.scenario << ": " << passed << "/" << rep.checks.size()
            << " checks passed, report in " << outdir << "\n";
  return rep.aggregate_pass() ? 0 : 1;
}

int run_verify(const std::string& scenario, const CommonArgs& args) {
  const auto cfg = load_config(args);
  const auto st = make_settings(cfg, args);
  const auto outdir = resolve_out(cfg, args, "runs/" + scenario);
  ConstantsLock lock;
  if (!args.constants_path.empty()) {
    lock = ConstantsLock::read(args.constants_path);
  } else {
    lock = run_calibrate(st);
  }
  fs::create_directories(outdir);
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  if (scenario == "verify-lemmas") rep = scenario_verify_lemmas(st);
  else if (scenario == "verify-energy") rep = scenario_verify_energy(st);
  else if (scenario == "verify-lipschitz") rep = scenario_verify_lipschitz(st, lock, outdir);
  else if (scenario == "verify-corollaries") rep = scenario_verify_corollaries(st, lock);
  else if (scenario == "verify-covering") rep = scenario_verify_covering(st, lock, outdir);
  else if (scenario == "verify-holder") rep = scenario_verify_holder(st, lock, outdir);
  else throw ConfigError("unknown scenario: " + scenario);
  const auto t1 = std::chrono::steady_clock::now();
  return finish(std::move(rep), cfg, outdir,
                std::chrono::duration<double, std::milli>(t1 - t0).count());
}

int run_report(const std::vector<std::string>& dirs) {
  bool all_pass = true;
  int total = 0, passed = 0;
  for (const auto& dir : dirs) {
    const auto rep = read_report(dir + "/report.json");
    std::cout << "scenario: " << rep.scenario << "  seed: " << rep.seed
              << "  digest: " << rep.config_digest << "\n";
    std::cout << std::left << std::setw(44) << "check" << std::right
              << std::setw(14) << "lhs" << std::setw(14) << "rhs"
              << std::setw(14) << "constant" << "  status\n";
    for (const auto& c : rep.checks) {
      std::cout << std::left << std::setw(44) << c.name << std::right
                << std::setw(14) << std::setprecision(6) << c.lhs
                << std::setw(14) << c.rhs << std::setw(14) << c.empirical_c
                << "  " << (c.pass ? "pass" : "FAIL") << "\n";
      ++total;
      passed += c.pass ? 1 : 0;
    }
    all_pass = all_pass && rep.aggregate_pass();
  }
  if (dirs.size() > 1)
    std::cout << dirs.size() << " runs, " << passed << "/" << total
              << " checks passed\n";
  std::cout << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verification lab for degenerate/singular parabolic "
               "gradient bounds"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "config file (key = value)");
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", args.seed, "seed override")
        ->each([&](const std::string&) { args.seed_set = true; });
    sub->add_option("--threads", args.threads, "worker threads");
    sub->add_option("--constants", args.constants_path,
                    "constants.lock from a calibration run");
  };

  auto* solve_cmd = app.add_subcommand("solve", "run the time stepper");
  add_common(solve_cmd);

  std::string scenario;
  auto* verify_cmd = app.add_subcommand("verify", "run a verification scenario");
  verify_cmd->add_option("scenario", scenario, "scenario name")->required();
  add_common(verify_cmd);

  auto* calibrate_cmd =
      app.add_subcommand("calibrate", "measure and freeze the constants");
  add_common(calibrate_cmd);

  std::vector<std::string> report_dirs;
  auto* report_cmd = app.add_subcommand("report", "print run summaries");
  report_cmd->add_option("dir", report_dirs, "run directories")->required();

  CLI11_PARSE(app, argc, argv);
  reduce::set_thread_count(args.threads);

  try {
    if (solve_cmd->parsed()) {
      const auto cfg = load_config(args);
      const auto st = make_settings(cfg, args);
      const auto outdir = resolve_out(cfg, args, "runs/solve");
      const auto t0 = std::chrono::steady_clock::now();
      auto rep = scenario_solve(cfg, st, outdir);
      const auto t1 = std::chrono::steady_clock::now();
      return finish(std::move(rep), cfg, outdir,
                    std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    if (verify_cmd->parsed()) return run_verify("verify-" + scenario, args);
    if (calibrate_cmd->parsed()) {
      const auto cfg = load_config(args);
      const auto st = make_settings(cfg, args);
      const auto outdir = resolve_out(cfg, args, "runs/calibrate");
      const auto lock = run_calibrate(st);
      fs::create_directories(outdir);
      lock.write(outdir + "/constants.lock");
      std::cout << "calibrate: wrote " << outdir << "/constants.lock\n";
      return 0;
    }
    if (report_cmd->parsed()) return run_report(report_dirs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
