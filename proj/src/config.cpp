#include "lsmcf/config.hpp"

#include <set>

#include "lsmcf/error.hpp"
#include "lsmcf/io.hpp"

namespace lsmcf {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) invalid(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : j.items())
    if (!allowed.count(k)) invalid("unknown key '" + k + "' in " + where);
}

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) invalid(where + "." + key + " is required");
  if (!j[key].is_number()) invalid(where + "." + key + " must be a number");
  return j[key].get<double>();
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

int integer_or(const json& j, const std::string& key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) invalid(where + "." + key + " must be an integer");
  return j[key].get<int>();
}

bool boolean_or(const json& j, const std::string& key, bool fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) invalid(where + "." + key + " must be true or false");
  return j[key].get<bool>();
}

json vec(const json& j, const std::string& key, int dim, const std::string& where,
         const json* fallback = nullptr) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    invalid(where + "." + key + " is required");
  }
  const json& v = j[key];
  if (!v.is_array() || static_cast<int>(v.size()) != dim) invalid(where + "." + key + " must have " + std::to_string(dim) + " numbers");
  json out = json::array();
  for (const auto& x : v) {
    if (!x.is_number()) invalid(where + "." + key + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json vec_of(const Vec& v, int dim) {
  json out = json::array();
  for (int a = 0; a < dim; ++a) out.push_back(v[a]);
  return out;
}

Vec to_vec(const json& j) {
  Vec v{};
  for (std::size_t a = 0; a < j.size() && a < 3; ++a) v[a] = j[a].get<double>();
  return v;
}

json canonical_shape(const json& j, int dim, const std::string& where) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    invalid(where + " needs a string 'type'");
  const std::string type = j["type"];
  json out;
  out["type"] = type;
  if (type == "sphere") {
    only_keys(j, where, {"type", "center", "radius"});
    out["center"] = vec(j, "center", dim, where);
    out["radius"] = number(j, "radius", where);
  } else if (type == "cylinder") {
    only_keys(j, where, {"type", "axis_point", "axis_dir", "radius"});
    out["axis_point"] = vec(j, "axis_point", dim, where);
    out["axis_dir"] = vec(j, "axis_dir", dim, where);
    out["radius"] = number(j, "radius", where);
  } else if (type == "torus") {
    only_keys(j, where, {"type", "center", "plane_normal", "major_radius", "minor_radius"});
    if (dim != 3) throw Error(ErrorCode::SpecGridDimMismatch, "a torus needs a 3D grid");
    const json z = json::array({0.0, 0.0, 1.0});
    out["center"] = vec(j, "center", 3, where);
    out["plane_normal"] = vec(j, "plane_normal", 3, where, &z);
    out["major_radius"] = number(j, "major_radius", where);
    out["minor_radius"] = number(j, "minor_radius", where);
  } else if (type == "dumbbell") {
    only_keys(j, where, {"type", "end_a", "end_b", "bell_radius", "neck_radius", "neck_halflength"});
    const Dumbbell d = default_dumbbell();
    const json a = vec_of(d.end_a, dim), b = vec_of(d.end_b, dim);
    out["end_a"] = vec(j, "end_a", dim, where, &a);
    out["end_b"] = vec(j, "end_b", dim, where, &b);
    out["bell_radius"] = number_or(j, "bell_radius", d.bell_radius, where);
    out["neck_radius"] = number_or(j, "neck_radius", d.neck_radius, where);
    out["neck_halflength"] = number_or(j, "neck_halflength", d.neck_halflength, where);
  } else if (type == "polygon") {
    only_keys(j, where, {"type", "vertices"});
    if (dim != 2) throw Error(ErrorCode::SpecGridDimMismatch, "a polygon needs a 2D grid");
    if (!j.contains("vertices") || !j["vertices"].is_array()) invalid(where + ".vertices must be a list");
    json vs = json::array();
    for (const auto& p : j["vertices"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        invalid(where + ".vertices entries must be [x, y]");
      vs.push_back(json::array({p[0].get<double>(), p[1].get<double>()}));
    }
    out["vertices"] = vs;
  } else if (type == "spiral") {
    only_keys(j, where, {"type", "turns", "gap", "samples"});
    if (dim != 2) throw Error(ErrorCode::SpecGridDimMismatch, "a spiral needs a 2D grid");
    out["turns"] = number(j, "turns", where);
    out["gap"] = number(j, "gap", where);
    out["samples"] = integer_or(j, "samples", 1024, where);
  } else if (type == "union" || type == "intersection") {
    only_keys(j, where, {"type", "members"});
    if (!j.contains("members") || !j["members"].is_array() || j["members"].empty())
      invalid(where + ".members must be a nonempty list");
    json ms = json::array();
    for (std::size_t i = 0; i < j["members"].size(); ++i)
      ms.push_back(canonical_shape(j["members"][i], dim, where + ".members[" + std::to_string(i) + "]"));
    out["members"] = ms;
  } else {
    invalid("unknown shape type '" + type + "'");
  }
  return out;
}

json evolution_json(const EvolutionParams& p) {
  return {{"epsilon", p.epsilon},
          {"cfl_factor", p.cfl_factor},
          {"t_max", p.t_max},
          {"snapshot_stride", p.snapshot_stride},
          {"event_detection", p.event_detection}};
}

}  // namespace

Grid GridSpec::build() const {
  return make_grid(dim, extents, resolution);
}

ShapeSpec build_shape(const json& j, const Grid& grid) {
  const std::string type = j.at("type");
  const int dim = grid.dim;
  ShapeSpec s;
  if (type == "sphere") {
    s.shape = Sphere{dim, to_vec(j["center"]), j["radius"].get<double>()};
  } else if (type == "cylinder") {
    s.shape = Cylinder{dim, to_vec(j["axis_point"]), to_vec(j["axis_dir"]), j["radius"].get<double>()};
  } else if (type == "torus") {
    s.shape = Torus{to_vec(j["center"]), to_vec(j["plane_normal"]), j["major_radius"].get<double>(),
                    j["minor_radius"].get<double>()};
  } else if (type == "dumbbell") {
    s.shape = Dumbbell{dim, to_vec(j["end_a"]), to_vec(j["end_b"]), j["bell_radius"].get<double>(),
                       j["neck_radius"].get<double>(), j["neck_halflength"].get<double>()};
  } else if (type == "polygon") {
    Polygon2D p;
    for (const auto& v : j["vertices"]) p.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
    s.shape = p;
  } else if (type == "spiral") {
    return spiral_polygon(j["turns"].get<double>(), j["gap"].get<double>(), j["samples"].get<int>(), grid.h);
  } else if (type == "union" || type == "intersection") {
    std::vector<ShapeSpec> members;
    for (const auto& m : j["members"]) members.push_back(build_shape(m, grid));
    if (type == "union")
      s.shape = Union{std::move(members)};
    else
      s.shape = Intersection{std::move(members)};
  } else {
    invalid("unknown shape type '" + type + "'");
  }
  validate(s);
  return s;
}

json shape_to_json(const ShapeSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return {{"type", "sphere"}, {"center", vec_of(s.center, s.dim)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          return {{"type", "cylinder"}, {"axis_point", vec_of(s.axis_point, s.dim)},
                  {"axis_dir", vec_of(s.axis_dir, s.dim)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Torus>) {
          return {{"type", "torus"}, {"center", vec_of(s.center, 3)}, {"plane_normal", vec_of(s.plane_normal, 3)},
                  {"major_radius", s.major_radius}, {"minor_radius", s.minor_radius}};
        } else if constexpr (std::is_same_v<T, Dumbbell>) {
          return {{"type", "dumbbell"}, {"end_a", vec_of(s.end_a, s.dim)}, {"end_b", vec_of(s.end_b, s.dim)},
                  {"bell_radius", s.bell_radius}, {"neck_radius", s.neck_radius},
                  {"neck_halflength", s.neck_halflength}};
        } else if constexpr (std::is_same_v<T, Polygon2D>) {
          json vs = json::array();
          for (const auto& p : s.vertices) vs.push_back(json::array({p[0], p[1]}));
          return {{"type", "polygon"}, {"vertices", vs}};
        } else {
          json ms = json::array();
          for (const auto& m : s.members) ms.push_back(shape_to_json(m));
          return {{"type", std::is_same_v<T, Union> ? "union" : "intersection"}, {"members", ms}};
        }
      },
      spec.shape);
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("malformed JSON: ") + e.what());
  }
  only_keys(j, "config", {"name", "grid", "shape", "evolution", "outputs", "analysis", "avoidance", "output_dir"});

  ExperimentConfig c;
  if (!j.contains("name") || !j["name"].is_string()) invalid("config.name must be a string");
  c.name = j["name"];

  if (!j.contains("grid")) invalid("config.grid is required");
  const json& g = j["grid"];
  only_keys(g, "grid", {"dim", "extents", "resolution"});
  c.grid.dim = integer_or(g, "dim", 0, "grid");
  if (!g.contains("extents") || !g["extents"].is_array()) invalid("grid.extents must be a list");
  if (!g.contains("resolution") || !g["resolution"].is_array()) invalid("grid.resolution must be a list");
  for (const auto& e : g["extents"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      invalid("grid.extents entries must be [min, max]");
    c.grid.extents.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  for (const auto& n : g["resolution"]) {
    if (!n.is_number_integer()) invalid("grid.resolution entries must be integers");
    c.grid.resolution.push_back(n.get<int>());
  }
  if (static_cast<int>(c.grid.extents.size()) != c.grid.dim ||
      static_cast<int>(c.grid.resolution.size()) != c.grid.dim)
    invalid("grid.extents and grid.resolution need one entry per dimension");

  if (!j.contains("shape")) invalid("config.shape is required");
  if (c.grid.dim != 2 && c.grid.dim != 3)
    throw Error(ErrorCode::DimensionUnsupported, "grid.dim must be 2 or 3");
  c.shape = canonical_shape(j["shape"], c.grid.dim, "shape");

  if (j.contains("evolution")) {
    const json& e = j["evolution"];
    only_keys(e, "evolution", {"epsilon", "cfl_factor", "t_max", "snapshot_stride", "event_detection"});
    c.evolution.epsilon = number_or(e, "epsilon", c.evolution.epsilon, "evolution");
    c.evolution.cfl_factor = number_or(e, "cfl_factor", c.evolution.cfl_factor, "evolution");
    c.evolution.t_max = number_or(e, "t_max", c.evolution.t_max, "evolution");
    c.evolution.snapshot_stride = integer_or(e, "snapshot_stride", c.evolution.snapshot_stride, "evolution");
    c.evolution.event_detection = boolean_or(e, "event_detection", c.evolution.event_detection, "evolution");
  }
  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    only_keys(o, "outputs", {"time_series", "snapshots", "arrival", "analysis", "meshes"});
    c.outputs.time_series = boolean_or(o, "time_series", c.outputs.time_series, "outputs");
    c.outputs.snapshots = boolean_or(o, "snapshots", c.outputs.snapshots, "outputs");
    c.outputs.arrival = boolean_or(o, "arrival", c.outputs.arrival, "outputs");
    c.outputs.analysis = boolean_or(o, "analysis", c.outputs.analysis, "outputs");
    c.outputs.meshes = boolean_or(o, "meshes", c.outputs.meshes, "outputs");
  }
  if (j.contains("analysis")) {
    const json& a = j["analysis"];
    only_keys(a, "analysis", {"critical_tol_h", "eig_tol", "axis_tol_deg"});
    c.analysis.critical_tol_h = number_or(a, "critical_tol_h", c.analysis.critical_tol_h, "analysis");
    c.analysis.eig_tol = number_or(a, "eig_tol", c.analysis.eig_tol, "analysis");
    c.analysis.axis_tol_deg = number_or(a, "axis_tol_deg", c.analysis.axis_tol_deg, "analysis");
    if (!(c.analysis.critical_tol_h > 0 && c.analysis.eig_tol > 0 && c.analysis.axis_tol_deg > 0))
      invalid("analysis tolerances must be positive");
  }
  if (j.contains("avoidance")) {
    only_keys(j["avoidance"], "avoidance", {"inner"});
    if (!j["avoidance"].contains("inner")) invalid("avoidance.inner is required");
    c.avoidance_inner = canonical_shape(j["avoidance"]["inner"], c.grid.dim, "avoidance.inner");
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string() || j["output_dir"].get<std::string>().empty())
      invalid("output_dir must be a nonempty string");
    c.output_dir = j["output_dir"];
  }

  // Validate everything that can fail before any file is written.
  const Grid grid = c.grid.build();
  try {
    validate(c.evolution);
  } catch (const Error& e) {
    invalid(e.what());
  }
  build_shape(c.shape, grid);
  if (c.avoidance_inner) build_shape(*c.avoidance_inner, grid);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(io::read_text(path));
}

json to_json(const ExperimentConfig& c) {
  json extents = json::array();
  for (const auto& e : c.grid.extents) extents.push_back(json::array({e[0], e[1]}));
  json j = {
      {"name", c.name},
      {"grid", {{"dim", c.grid.dim}, {"extents", extents}, {"resolution", c.grid.resolution}}},
      {"shape", c.shape},
      {"evolution", evolution_json(c.evolution)},
      {"outputs",
       {{"time_series", c.outputs.time_series},
        {"snapshots", c.outputs.snapshots},
        {"arrival", c.outputs.arrival},
        {"analysis", c.outputs.analysis},
        {"meshes", c.outputs.meshes}}},
      {"analysis",
       {{"critical_tol_h", c.analysis.critical_tol_h},
        {"eig_tol", c.analysis.eig_tol},
        {"axis_tol_deg", c.analysis.axis_tol_deg}}},
      {"output_dir", c.output_dir},
  };
  if (c.avoidance_inner) j["avoidance"] = {{"inner", *c.avoidance_inner}};
  return j;
}

std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

}  // namespace lsmcf
