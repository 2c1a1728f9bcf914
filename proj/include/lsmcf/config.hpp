#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lsmcf/evolution.hpp"
#include "lsmcf/grid.hpp"
#include "lsmcf/shapes.hpp"

namespace lsmcf {

struct GridSpec {
  int dim = 2;
  std::vector<Extent> extents;
  std::vector<int> resolution;

  Grid build() const;
  bool operator==(const GridSpec&) const = default;
};

struct OutputSpec {
  bool time_series = true;   // series.csv, one row per snapshot
  bool snapshots = false;    // snapshots/v_<step>.lsmc
  bool arrival = false;      // arrival.lsmc + arrival.mask
  bool analysis = false;     // report.txt + report.json (implies arrival data)
  bool meshes = false;       // meshes/front_<step>.vtk and CSV lists

  bool operator==(const OutputSpec&) const = default;
};

struct AnalysisSpec {
  double critical_tol_h = 2.0;  // gradient threshold in units of h
  double eig_tol = 0.15;
  double axis_tol_deg = 15.0;

  bool operator==(const AnalysisSpec&) const = default;
};

// A run is fully described by this structure; there is no randomness.
//
// Schema (JSON object):
//   name        string
//   grid        {dim, extents: [[min,max]...], resolution: [n...]}
//   shape       {type: sphere|cylinder|torus|dumbbell|polygon|spiral|union|intersection, ...}
//   evolution   {epsilon, cfl_factor, t_max, snapshot_stride, event_detection}
//   outputs     {time_series, snapshots, arrival, analysis, meshes}
//   analysis    {critical_tol_h, eig_tol, axis_tol_deg}
//   avoidance   optional {inner: shape}; co-evolves inner <= shape
//   output_dir  string
// Every field except name, grid and shape has a default.
struct ExperimentConfig {
  std::string name;
  GridSpec grid;
  nlohmann::json shape;  // canonical shape description
  EvolutionParams evolution;
  OutputSpec outputs;
  AnalysisSpec analysis;
  std::optional<nlohmann::json> avoidance_inner;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses and fully validates (grid, shapes, parameters). Schema problems throw
// ConfigInvalid; geometric ones keep their module error code.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical form: every field present, keys sorted, two-space indentation.
std::string serialize_config(const ExperimentConfig& config);
nlohmann::json to_json(const ExperimentConfig& config);

// Builds the shape for a grid (spirals need h for the resolvability check).
ShapeSpec build_shape(const nlohmann::json& shape, const Grid& grid);

// Canonical JSON for a library shape spec.
nlohmann::json shape_to_json(const ShapeSpec& spec);

}  // namespace lsmcf
