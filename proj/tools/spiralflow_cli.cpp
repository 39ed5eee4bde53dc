// spiralflow command-line front end: run | check | verify.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spiralflow.hpp"

namespace sf = spiralflow;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitBlowup = 2;
constexpr int kExitAcceptance = 3;

void apply_thread_cap() {
  const char* env = std::getenv("SPIRALFLOW_THREADS");
  if (!env) return;
  const int n = std::atoi(env);
  if (n <= 0) throw sf::ConfigError("SPIRALFLOW_THREADS must be a positive integer");
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
}

struct RunArgs {
  std::string scenario;
  std::optional<double> h, t_end, epsilon, snapshot_every;
  std::optional<std::string> scheme;
  std::string out = "spiralflow_out";
};

int cmd_run(const RunArgs& a) {
  sf::Scenario sc = sf::load_scenario(a.scenario);
  if (a.h) sc.h = *a.h;
  if (a.t_end) sc.params.t_end = *a.t_end;
  if (a.epsilon) sc.params.epsilon = *a.epsilon;
  if (a.snapshot_every) sc.params.snapshot_interval = *a.snapshot_every;
  if (a.scheme) sc.params.scheme = *a.scheme == "central" ? sf::Scheme::central : sf::Scheme::upwind_forcing;
  sf::validate(sc.params);

  sf::ExecuteOptions opt;
  opt.out_dir = a.out;
  opt.quiet = false;
  const sf::RunOutcome o = sf::execute(sc, opt);
  std::cout << sf::summary_json(o.summary).dump(2) << "\n";
  return 0;
}

int cmd_check(const std::string& scenario, const std::optional<std::string>& out) {
  const sf::Scenario sc = sf::load_scenario(scenario);
  sf::Summary s;
  s.scenario = sc.name;
  s.h = sc.h;
  s.epsilon = sc.params.epsilon;
  s.t_end = sc.params.t_end;
  s.geometry = sf::static_report(sc);
  s.M = sf::make_state(sf::make_problem(sc.domain, sc.h, sc.forcing), sc.initial, sc.params).M;
  const std::string text = sf::summary_json(s).dump(2) + "\n";
  if (out) {
    sf::ensure_directory(*out);
    sf::write_text(std::filesystem::path(*out) / "summary.json", text);
  }
  std::cout << text;
  return 0;
}

int cmd_verify(const std::string& out) {
  sf::AcceptanceSuite suite(std::filesystem::path{out});
  bool ok = true;
  suite.run_all([&](const sf::CriterionResult& r) {
    ok = ok && r.passed;
    std::cout << sf::format_criterion(r) << std::endl;
  });
  return ok ? 0 : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set simulation of spiral crystal growth"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run a scenario and write artifacts");
  run->add_option("--scenario", ra.scenario, "Catalog name or JSON file")->required();
  run->add_option("--h", ra.h, "Grid spacing")->check(CLI::PositiveNumber);
  run->add_option("--t-end", ra.t_end, "Final time")->check(CLI::NonNegativeNumber);
  run->add_option("--epsilon", ra.epsilon, "Regularization")->check(CLI::PositiveNumber);
  run->add_option("--scheme", ra.scheme, "Forcing discretization")->check(CLI::IsMember({"central", "upwind"}));
  run->add_option("--out", ra.out, "Output directory");
  run->add_option("--snapshot-every", ra.snapshot_every, "Model time between snapshots")
      ->check(CLI::NonNegativeNumber);

  std::string check_scenario;
  std::optional<std::string> check_out;
  auto* check = app.add_subcommand("check", "Report C0, K0, forcing margin and growth bounds");
  check->add_option("--scenario", check_scenario, "Catalog name or JSON file")->required();
  check->add_option("--out", check_out, "Directory for summary.json");

  std::string verify_out = "verify_out";
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--out", verify_out, "Directory for per-scenario artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    apply_thread_cap();
    if (*run) return cmd_run(ra);
    if (*check) return cmd_check(check_scenario, check_out);
    if (*verify) return cmd_verify(verify_out);
  } catch (const sf::Blowup& e) {
    std::cerr << "blowup: " << e.what() << "\n";
    return kExitBlowup;
  } catch (const sf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
