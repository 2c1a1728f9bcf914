#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lsmcf/analysis.hpp"
#include "lsmcf/arrival.hpp"
#include "lsmcf/config.hpp"
#include "lsmcf/evolution.hpp"

namespace lsmcf {

struct ResidualStats {
  double median = 0.0;
  std::size_t samples = 0;
};

// Median |residual| over valid nodes with a full valid stencil and
// |grad u| > min_gradient.
ResidualStats residual_stats(const ArrivalTimeField& u, double min_gradient = 0.1, double epsilon = 1e-6);

struct AnalysisReport {
  double dt = 0.0;
  std::optional<double> extinction_time;
  std::size_t recrossings = 0;
  ResidualStats residual;
  std::vector<CriticalPointReport> critical_points;
  SingularSet singular;
  std::vector<std::vector<double>> value_groups;  // singular values split by gaps > 3 dt
  std::vector<SingularityEvent> events;
  C2Verdict verdict;
};

AnalysisReport analyze(const ArrivalTimeField& u, std::span<const TopologyEvent> events,
                       const AnalysisSpec& spec);

std::string report_text(const AnalysisReport& r);
nlohmann::json report_json(const AnalysisReport& r);

struct RunSummary {
  std::filesystem::path dir;
  FlowRecord flow;  // times and events only
  std::optional<AnalysisReport> analysis;
  std::optional<double> avoidance_violation;
  std::vector<std::filesystem::path> files;  // relative to dir, in write order
  std::vector<std::string> warnings;  // non-mean-convex start, recrossings
};

// Evolves the configured front and writes the requested outputs:
//   series.csv          t,enclosed_measure,front_measure,component_count,sup_v
//   snapshots/v_NNNN.lsmc
//   meshes/front_NNNN.vtk, front_NNNN_vertices.csv, front_NNNN_edges.csv
//   arrival.lsmc, arrival.mask
//   report.txt, report.json
//   avoidance.json
//   run.json            canonical config, dt, steps, times, events, file list
// Everything that can be checked up front is checked before the directory is
// created. `out_dir` overrides config.output_dir when nonempty.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir = {});

// Re-analyzes the arrival dump of a finished run directory.
AnalysisReport reanalyze(const std::filesystem::path& run_dir);

// Bundled scenarios (circle, sphere, cylinder, ring, dumbbell, spiral, nested).
std::vector<std::string> builtin_names();
ExperimentConfig builtin_config(const std::string& name);
std::string builtin_description(const std::string& name);

}  // namespace lsmcf
