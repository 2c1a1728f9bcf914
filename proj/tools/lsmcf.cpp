// Command-line front end: run, verify, shapes, report.
#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lsmcf/acceptance.hpp"
#include "lsmcf/config.hpp"
#include "lsmcf/error.hpp"
#include "lsmcf/experiment.hpp"
#include "lsmcf/io.hpp"

namespace fs = std::filesystem;
using namespace lsmcf;

namespace {

constexpr int kVerifyFailed = 9;

int cmd_run(const std::string& config_path, const std::string& scenario, const std::string& out) {
  const ExperimentConfig config = config_path.empty() ? builtin_config(scenario) : load_config(config_path);
  const RunSummary s = run_experiment(config, out);
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "run " << config.name << ": steps=" << s.flow.steps << " dt=" << io::fmt(s.flow.dt)
            << " extinction_time=" << (s.flow.extinction_time ? io::fmt(*s.flow.extinction_time) : "none") << '\n';
  for (const auto& e : s.flow.events)
    if (e.kind == TopologyEvent::Kind::ComponentChange)
      std::cout << "  components " << e.from << " -> " << e.to << " at t=" << io::fmt(e.t_after) << '\n';
  if (s.analysis)
    std::cout << "  is_c2=" << (s.analysis->verdict.is_c2 ? "true" : "false") << " case="
              << (s.analysis->verdict.kind ? to_string(*s.analysis->verdict.kind) : "none") << '\n';
  if (s.avoidance_violation) std::cout << "  max ordering violation " << io::fmt(*s.avoidance_violation) << '\n';
  std::cout << "  wrote " << s.files.size() << " files to " << s.dir.string() << '\n';
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& out) {
  acceptance::suite_criteria(suite);  // SuiteUnknown before any work
  acceptance::SuiteOptions opt;
  if (!out.empty()) opt.work_dir = out;
  opt.log = [](const std::string& s) { std::cerr << "# " << s << '\n'; };
  opt.on_result = [](const acceptance::CriterionResult& r) {
    std::cout << acceptance::format_result(r) << std::endl;
  };
  const auto results = acceptance::run_suite(suite, opt);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass;
  std::cout << "summary suite=" << suite << " passed=" << passed << " total=" << results.size() << '\n';
  return passed == results.size() ? 0 : kVerifyFailed;
}

int cmd_shapes(const std::string& out) {
  for (const auto& name : builtin_names()) {
    std::cout << name << "\t" << builtin_description(name) << '\n';
    if (!out.empty()) {
      fs::create_directories(out);
      io::write_text(fs::path(out) / (name + ".cfg"), serialize_config(builtin_config(name)));
    }
  }
  return 0;
}

int cmd_report(const std::string& dir, bool as_json) {
  const AnalysisReport r = reanalyze(dir);
  if (as_json)
    std::cout << report_json(r).dump(2) << '\n';
  else
    std::cout << report_text(r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set mean curvature flow: evolution, arrival time and singularity analysis"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (speed only; outputs do not change)")
      ->check(CLI::NonNegativeNumber);

  std::string config_path, scenario, out, suite = "quick";
  bool as_json = false;

  auto* run = app.add_subcommand("run", "evolve a configured front and write its outputs");
  auto* config_opt = run->add_option("--config", config_path, "JSON experiment config");
  run->add_option("--scenario", scenario, "bundled scenario name (see 'shapes')")->excludes(config_opt);
  run->add_option("--out", out, "output directory (overrides output_dir)");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--suite", suite, "quick or full");
  verify->add_option("--out", out, "working directory for suite outputs");

  auto* shapes = app.add_subcommand("shapes", "list bundled scenarios");
  shapes->add_option("--out", out, "also write their canonical configs into this directory");

  auto* report = app.add_subcommand("report", "re-analyze the arrival dump of a finished run");
  report->add_option("--out", out, "run directory")->required();
  report->add_flag("--json", as_json, "print the JSON report");

  for (auto* sub : {run, verify, shapes, report})
    sub->add_option("--threads", threads, "OpenMP threads")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*run && config_path.empty() && scenario.empty()) {
    std::cerr << "run: one of --config or --scenario is required\n";
    return 2;
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*run) return cmd_run(config_path, scenario, out);
    if (*verify) return cmd_verify(suite, out);
    if (*shapes) return cmd_shapes(out);
    if (*report) return cmd_report(out, as_json);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
