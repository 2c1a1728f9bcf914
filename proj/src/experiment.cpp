#include "lsmcf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "lsmcf/error.hpp"
#include "lsmcf/io.hpp"
#include "lsmcf/measures.hpp"
#include "lsmcf/shapes.hpp"

namespace lsmcf {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string vec_text(const Vec& v, int dim) {
  std::string s = "(";
  for (int a = 0; a < dim; ++a) s += (a ? ", " : "") + io::fmt(v[a]);
  return s + ")";
}

json vec_json(const Vec& v, int dim) {
  json out = json::array();
  for (int a = 0; a < dim; ++a) out.push_back(v[a]);
  return out;
}

std::string ordinal(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

json event_json(const TopologyEvent& e) {
  return {{"kind", e.kind == TopologyEvent::Kind::Extinction ? "Extinction" : "ComponentChange"},
          {"t_before", e.t_before},
          {"t_after", e.t_after},
          {"from", e.from},
          {"to", e.to}};
}

TopologyEvent event_from_json(const json& j) {
  TopologyEvent e;
  e.kind = j.at("kind") == "Extinction" ? TopologyEvent::Kind::Extinction : TopologyEvent::Kind::ComponentChange;
  e.t_before = j.at("t_before");
  e.t_after = j.at("t_after");
  e.from = j.at("from");
  e.to = j.at("to");
  return e;
}

// Output directory with a running list of written files.
class Sink {
 public:
  explicit Sink(fs::path dir) : dir_(std::move(dir)) {}
  fs::path path(const std::string& rel) {
    files_.push_back(rel);
    const fs::path p = dir_ / rel;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + p.parent_path().string());
    return p;
  }
  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

}  // namespace

ResidualStats residual_stats(const ArrivalTimeField& u, double min_gradient, double epsilon) {
  std::vector<double> r;
  const int dim = u.grid().dim;
  for_each_index(u.grid(), [&](const Index& i) {
    if (!u.stencil_valid(i)) return;
    if (norm(gradient_central(u.u, i), dim) <= min_gradient) return;
    r.push_back(std::abs(arrival_residual(u, i, epsilon)));
  });
  ResidualStats s;
  s.samples = r.size();
  if (r.empty()) return s;
  const auto mid = r.begin() + static_cast<std::ptrdiff_t>(r.size() / 2);
  std::nth_element(r.begin(), mid, r.end());
  s.median = *mid;
  if (r.size() % 2 == 0) s.median = 0.5 * (s.median + *std::max_element(r.begin(), mid));
  return s;
}

AnalysisReport analyze(const ArrivalTimeField& u, std::span<const TopologyEvent> events,
                       const AnalysisSpec& spec) {
  AnalysisReport r;
  const double tol = spec.critical_tol_h * u.grid().h;
  r.dt = u.dt;
  r.extinction_time = u.extinction_time;
  r.recrossings = u.recrossings;
  r.residual = residual_stats(u);
  r.critical_points = find_critical_points(u, tol);
  r.singular = singular_set(u, tol);
  C2Tolerances c2;
  c2.dt = u.dt;
  c2.eig_tol = spec.eig_tol;
  c2.axis_tol_deg = spec.axis_tol_deg;
  r.verdict = c2_classify(u, r.singular, events, c2);
  std::vector<double> values;
  for (const auto& c : r.singular.components) values.push_back(c.value);
  r.value_groups = group_values(values, 3.0 * u.dt);
  r.events = singularity_events(r.singular, events);
  return r;
}

std::string report_text(const AnalysisReport& r) {
  const int dim = r.singular.dim;
  std::ostringstream s;
  s << "arrival: dt=" << io::fmt(r.dt) << " extinction_time="
    << (r.extinction_time ? io::fmt(*r.extinction_time) : "none") << " recrossings=" << r.recrossings << '\n';
  s << "residual: median=" << io::fmt(r.residual.median) << " samples=" << r.residual.samples << '\n';
  s << "critical_points: " << r.critical_points.size() << '\n';
  for (std::size_t i = 0; i < r.critical_points.size(); ++i) {
    const auto& c = r.critical_points[i];
    s << "  [" << i << "] location=" << vec_text(c.location, dim) << " value=" << io::fmt(c.value)
      << " gradient_norm=" << io::fmt(c.gradient_norm) << " size=" << c.cluster_size
      << " eigenvalues=" << vec_text(c.eigenvalues, dim) << " k=" << c.fit.k
      << " spherical=" << (c.fit.spherical ? "true" : "false") << " deviation=" << io::fmt(c.fit.deviation);
    if (c.axis) s << " axis=" << vec_text(*c.axis, dim);
    s << '\n';
  }
  s << "singular_set: points=" << r.singular.points.size() << " components=" << r.singular.components.size()
    << " tol=" << io::fmt(r.singular.tol) << '\n';
  for (std::size_t i = 0; i < r.singular.components.size(); ++i) {
    const auto& c = r.singular.components[i];
    s << "  component " << i << ": size=" << c.points.size() << " centroid=" << vec_text(c.centroid, dim)
      << " diameter=" << io::fmt(c.diameter) << " kind=" << (c.curve_like ? "curve" : "compact")
      << " value=" << io::fmt(c.value);
    if (c.curve_like)
      s << " closed=" << (c.closed ? "true" : "false") << " chain=" << c.chain.size()
        << " loop_length=" << io::fmt(c.loop_length) << " loop_radius=" << io::fmt(c.loop_radius);
    s << '\n';
  }
  s << "value_groups: " << r.value_groups.size() << '\n';
  for (std::size_t i = 0; i < r.value_groups.size(); ++i)
    s << "  group " << i << ": min=" << io::fmt(r.value_groups[i].front())
      << " max=" << io::fmt(r.value_groups[i].back()) << " count=" << r.value_groups[i].size() << '\n';
  s << "events: " << r.events.size() << '\n';
  for (const auto& e : r.events)
    s << "  t=" << io::fmt(e.time) << " kind=" << to_string(e.kind) << " locations=" << e.locations.size() << '\n';
  s << "is_c2=" << (r.verdict.is_c2 ? "true" : "false")
    << " case=" << (r.verdict.kind ? to_string(*r.verdict.kind) : "none") << '\n';
  for (const auto& reason : r.verdict.reasons) s << "  " << reason << '\n';
  return s.str();
}

json report_json(const AnalysisReport& r) {
  const int dim = r.singular.dim;
  json cps = json::array();
  for (const auto& c : r.critical_points) {
    json j = {{"location", vec_json(c.location, dim)},
              {"value", c.value},
              {"gradient_norm", c.gradient_norm},
              {"cluster_size", c.cluster_size},
              {"eigenvalues", vec_json(c.eigenvalues, dim)},
              {"k", c.fit.k},
              {"spherical", c.fit.spherical},
              {"deviation", c.fit.deviation}};
    if (c.axis) j["axis"] = vec_json(*c.axis, dim);
    cps.push_back(j);
  }
  json comps = json::array();
  for (const auto& c : r.singular.components) {
    json j = {{"size", c.points.size()},
              {"centroid", vec_json(c.centroid, dim)},
              {"diameter", c.diameter},
              {"curve_like", c.curve_like},
              {"value", c.value}};
    if (c.curve_like) {
      j["closed"] = c.closed;
      j["loop_length"] = c.loop_length;
      j["loop_radius"] = c.loop_radius;
      json chain = json::array();
      for (const Vec& p : c.chain) chain.push_back(vec_json(p, dim));
      j["chain"] = chain;
      j["chain_values"] = c.chain_values;
    }
    comps.push_back(j);
  }
  json events = json::array();
  for (const auto& e : r.events) events.push_back({{"time", e.time}, {"kind", to_string(e.kind)}});
  json verdict = {{"is_c2", r.verdict.is_c2}, {"reasons", r.verdict.reasons},
                  {"singular_values", r.verdict.singular_values},
                  {"max_axis_angle_deg", r.verdict.max_axis_angle_deg}};
  verdict["case"] = r.verdict.kind ? json(to_string(*r.verdict.kind)) : json(nullptr);
  return {{"dt", r.dt},
          {"extinction_time", r.extinction_time ? json(*r.extinction_time) : json(nullptr)},
          {"recrossings", r.recrossings},
          {"residual_median", r.residual.median},
          {"residual_samples", r.residual.samples},
          {"critical_points", cps},
          {"singular_set", {{"points", r.singular.points.size()}, {"tol", r.singular.tol}, {"components", comps}}},
          {"value_groups", r.value_groups},
          {"events", events},
          {"verdict", verdict}};
}

RunSummary run_experiment(const ExperimentConfig& config, const fs::path& out_dir) {
  // Everything that can fail on bad input happens before the directory exists.
  const Grid grid = config.grid.build();
  validate(config.evolution);
  const ScalarField v0 = init_field(build_shape(config.shape, grid), grid);
  std::optional<ScalarField> inner;
  if (config.avoidance_inner) {
    inner = init_field(build_shape(*config.avoidance_inner, grid), grid);
    for (std::size_t n = 0; n < v0.size(); ++n)
      if ((*inner)[n] > v0[n])
        throw Error(ErrorCode::PreorderViolated, "avoidance.inner is not contained in shape");
  }
  const bool want_arrival = config.outputs.arrival || config.outputs.analysis;
  if (want_arrival && !std::any_of(v0.values.begin(), v0.values.end(), [](double x) { return x > 0.0; }))
    throw Error(ErrorCode::NoInterior, "initial field is nowhere positive");

  RunSummary sum;
  // The arrival-time reformulation assumes a mean-convex start.
  if (want_arrival || config.shape.value("type", "") == "dumbbell") {
    const double hmin = min_front_mean_curvature(v0);
    if (!(hmin > 0.0))
      sum.warnings.push_back("initial front is not mean convex (min H = " + io::fmt(hmin) + ")");
  }
  sum.dir = out_dir.empty() ? fs::path(config.output_dir) : out_dir;
  std::error_code ec;
  fs::create_directories(sum.dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + sum.dir.string());
  Sink sink(sum.dir);

  std::ostringstream series;
  series << "t,enclosed_measure,front_measure,component_count,sup_v\n";
  std::size_t snap = 0;
  FlowHooks hooks;
  hooks.retain_snapshots = false;
  hooks.on_snapshot = [&](double t, const ScalarField& f) {
    const std::string id = ordinal(snap++);
    if (config.outputs.time_series || config.outputs.meshes) {
      const FrontMesh mesh = extract_front(f);
      if (config.outputs.time_series)
        series << io::fmt(t) << ',' << io::fmt(enclosed_measure(f)) << ','
               << io::fmt(mesh.empty() ? 0.0 : front_measure(mesh)) << ',' << component_count(f) << ','
               << io::fmt(*std::max_element(f.values.begin(), f.values.end())) << '\n';
      if (config.outputs.meshes) {
        io::write_vtk(mesh, sink.path("meshes/front_" + id + ".vtk"));
        io::write_mesh_csv(mesh, sink.path("meshes/front_" + id + "_vertices.csv"),
                           sink.path("meshes/front_" + id + "_edges.csv"));
      }
    }
    if (config.outputs.snapshots) io::write_field(f, sink.path("snapshots/v_" + id + ".lsmc"));
  };

  std::optional<ArrivalTimeField> arrival;
  if (want_arrival) {
    ArrivalRun run = evolve_with_arrival(v0, config.evolution, hooks);
    sum.flow = std::move(run.flow);
    arrival = std::move(run.arrival);
  } else {
    sum.flow = evolve(v0, config.evolution, hooks);
  }
  if (config.outputs.time_series) io::write_text(sink.path("series.csv"), series.str());

  if (arrival) {
    if (arrival->recrossings > 0)
      sum.warnings.push_back(std::to_string(arrival->recrossings) +
                             " nodes turned positive again after crossing; u keeps the first crossing");
    if (config.outputs.arrival) {
      io::write_field(arrival->u, sink.path("arrival.lsmc"));
      io::write_mask(arrival->valid, sink.path("arrival.mask"));
    }
    if (config.outputs.analysis) {
      sum.analysis = analyze(*arrival, sum.flow.events, config.analysis);
      io::write_text(sink.path("report.txt"), report_text(*sum.analysis));
      io::write_text(sink.path("report.json"), report_json(*sum.analysis).dump(2) + "\n");
    }
  }
  if (inner) {
    sum.avoidance_violation = avoidance_check(*inner, v0, config.evolution);
    io::write_text(sink.path("avoidance.json"),
                   json{{"max_violation", *sum.avoidance_violation}}.dump(2) + "\n");
  }

  json events = json::array();
  for (const auto& e : sum.flow.events) events.push_back(event_json(e));
  json files = json::array();
  for (const auto& f : sink.files()) files.push_back(f.generic_string());
  json meta = {{"config", to_json(config)},
               {"dt", sum.flow.dt},
               {"steps", sum.flow.steps},
               {"times", sum.flow.times},
               {"initial_components", sum.flow.initial_components},
               {"extinction_time", sum.flow.extinction_time ? json(*sum.flow.extinction_time) : json(nullptr)},
               {"recrossings", arrival ? json(arrival->recrossings) : json(nullptr)},
               {"events", events},
               {"warnings", sum.warnings},
               {"files", files}};
  sum.files = sink.files();
  io::write_text(sink.path("run.json"), meta.dump(2) + "\n");
  sum.files.push_back("run.json");
  return sum;
}

AnalysisReport reanalyze(const fs::path& run_dir) {
  json meta;
  try {
    meta = json::parse(io::read_text(run_dir / "run.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("run.json: ") + e.what());
  }
  ExperimentConfig config = parse_config(meta.at("config").dump());
  ScalarField u = io::read_field(run_dir / "arrival.lsmc");
  auto mask = io::read_mask(run_dir / "arrival.mask", u.size());
  ArrivalTimeField a = make_arrival_field(std::move(u), std::move(mask));
  try {
    a.dt = meta.at("dt");
    if (!meta.at("extinction_time").is_null()) a.extinction_time = meta["extinction_time"].get<double>();
    if (!meta.at("recrossings").is_null()) a.recrossings = meta["recrossings"].get<std::size_t>();
    std::vector<TopologyEvent> events;
    for (const auto& e : meta.at("events")) events.push_back(event_from_json(e));
    return analyze(a, events, config.analysis);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("run.json: ") + e.what());
  }
}

namespace {

struct Builtin {
  const char* name;
  const char* description;
  const char* json;
};

// The cylinder is a slab eight nodes thick along its axis: the Neumann
// boundary keeps every layer of a translation-invariant field identical, so
// the slab evolves exactly like the middle of a long cube.
const Builtin kBuiltins[] = {
    {"circle", "circle r=0.8 on 256^2, shrinks to a round point at t=0.32",
     R"({"name":"circle","grid":{"dim":2,"extents":[[-1,1],[-1,1]],"resolution":[256,256]},
        "shape":{"type":"sphere","center":[0,0],"radius":0.8},
        "evolution":{"cfl_factor":0.5,"t_max":1,"snapshot_stride":2000},
        "outputs":{"time_series":true,"arrival":true,"analysis":true},
        "output_dir":"out/circle"})"},
    {"sphere", "sphere r=0.8 on 96^3, spherical singularity at t=0.16",
     R"({"name":"sphere","grid":{"dim":3,"extents":[[-1,1],[-1,1],[-1,1]],"resolution":[96,96,96]},
        "shape":{"type":"sphere","center":[0,0,0],"radius":0.8},
        "evolution":{"cfl_factor":0.5,"t_max":1,"snapshot_stride":500},
        "outputs":{"time_series":true,"arrival":true,"analysis":true},
        "analysis":{"critical_tol_h":1},
        "output_dir":"out/sphere"})"},
    {"sphere_coarse", "sphere r=0.8 at twice the spacing of 'sphere'",
     R"({"name":"sphere_coarse","grid":{"dim":3,
        "extents":[[-0.98947368421052628,0.98947368421052628],[-0.98947368421052628,0.98947368421052628],
                   [-0.98947368421052628,0.98947368421052628]],"resolution":[48,48,48]},
        "shape":{"type":"sphere","center":[0,0,0],"radius":0.8},
        "evolution":{"cfl_factor":0.5,"t_max":1,"snapshot_stride":200},
        "outputs":{"time_series":true,"arrival":true,"analysis":true},
        "analysis":{"critical_tol_h":1},
        "output_dir":"out/sphere_coarse"})"},
    {"cylinder", "cylinder r=0.6 along x3, 96^2 cross-section, singular line at t=0.18",
     R"({"name":"cylinder","grid":{"dim":3,"extents":[[-1,1],[-1,1],[-0.073684210526315783,0.073684210526315783]],
        "resolution":[96,96,8]},
        "shape":{"type":"cylinder","axis_point":[0,0,0],"axis_dir":[0,0,1],"radius":0.6},
        "evolution":{"cfl_factor":0.5,"t_max":1,"snapshot_stride":500},
        "outputs":{"time_series":true,"arrival":true,"analysis":true},
        "output_dir":"out/cylinder"})"},
    {"cylinder_fine", "cylinder r=0.6 at half the spacing of 'cylinder'",
     R"({"name":"cylinder_fine","grid":{"dim":3,"extents":[[-1,1],[-1,1],[-0.036842105263157891,0.036842105263157891]],
        "resolution":[191,191,8]},
        "shape":{"type":"cylinder","axis_point":[0,0,0],"axis_dir":[0,0,1],"radius":0.6},
        "evolution":{"cfl_factor":0.5,"t_max":1,"snapshot_stride":2000},
        "outputs":{"time_series":true,"arrival":true,"analysis":true},
        "output_dir":"out/cylinder_fine"})"},
    {"ring", "marriage ring (torus R=0.5, a=0.15) on 96^3, closed curve of cylindrical singularities",
     R"({"name":"ring","grid":{"dim":3,"extents":[[-1,1],[-1,1],[-1,1]],"resolution":[96,96,96]},
        "shape":{"type":"torus","center":[0,0,0],"plane_normal":[0,0,1],"major_radius":0.5,"minor_radius":0.15},
        "evolution":{"cfl_factor":0.5,"t_max":1,"snapshot_stride":100},
        "outputs":{"time_series":true,"arrival":true,"analysis":true},
        "analysis":{"critical_tol_h":1},
        "output_dir":"out/ring"})"},
    {"dumbbell", "default dumbbell, neck pinch then two spherical extinctions",
     R"({"name":"dumbbell","grid":{"dim":3,"extents":[[-1.3,1.3],[-0.5,0.5],[-0.5,0.5]],"resolution":[131,51,51]},
        "shape":{"type":"dumbbell"},
        "evolution":{"cfl_factor":0.5,"t_max":1,"snapshot_stride":100},
        "outputs":{"time_series":true,"arrival":true,"analysis":true},
        "analysis":{"critical_tol_h":1},
        "output_dir":"out/dumbbell"})"},
    {"spiral", "three-turn spiral channel on 512^2, becomes round before vanishing",
     R"({"name":"spiral","grid":{"dim":2,"extents":[[-1,1],[-1,1]],"resolution":[512,512]},
        "shape":{"type":"spiral","turns":3,"gap":0.05,"samples":1024},
        "evolution":{"cfl_factor":0.5,"t_max":1,"snapshot_stride":250},
        "outputs":{"time_series":true},
        "output_dir":"out/spiral"})"},
    {"nested", "circle r=0.5 inside r=0.8 co-evolved for the comparison principle",
     R"({"name":"nested","grid":{"dim":2,"extents":[[-1,1],[-1,1]],"resolution":[256,256]},
        "shape":{"type":"sphere","center":[0,0],"radius":0.8},
        "avoidance":{"inner":{"type":"sphere","center":[0,0],"radius":0.5}},
        "evolution":{"cfl_factor":0.5,"t_max":0.2,"snapshot_stride":2000},
        "outputs":{"time_series":true},
        "output_dir":"out/nested"})"},
};

const Builtin& find_builtin(const std::string& name) {
  for (const auto& b : kBuiltins)
    if (name == b.name) return b;
  throw Error(ErrorCode::ConfigInvalid, "no built-in scenario '" + name + "'");
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& b : kBuiltins) out.emplace_back(b.name);
  return out;
}

ExperimentConfig builtin_config(const std::string& name) { return parse_config(find_builtin(name).json); }

std::string builtin_description(const std::string& name) { return find_builtin(name).description; }

}  // namespace lsmcf
