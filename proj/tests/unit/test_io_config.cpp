#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include <omp.h>

#include "helpers.hpp"
#include "lsmcf/config.hpp"
#include "lsmcf/experiment.hpp"
#include "lsmcf/io.hpp"
#include "lsmcf/shapes.hpp"

using namespace lsmcf;
namespace fs = std::filesystem;

namespace {

std::string bytes(const fs::path& p) { return io::read_text(p); }

template <class T>
T read_le(const std::string& s, std::size_t at) {
  T v;
  std::memcpy(&v, s.data() + at, sizeof v);
  return v;
}

ExperimentConfig small_circle() {
  ExperimentConfig c;
  c.name = "small";
  c.grid.dim = 2;
  c.grid.extents = {{-1, 1}, {-1, 1}};
  c.grid.resolution = {48, 48};
  c.shape = {{"type", "sphere"}, {"center", {0.0, 0.0}}, {"radius", 0.6}};
  c.evolution.cfl_factor = 0.5;
  c.evolution.t_max = 1.0;
  c.evolution.snapshot_stride = 200;
  c.outputs = {true, true, true, true, true};
  return c;
}

}  // namespace

TEST_CASE("grid dump layout and round trip") {
  const fs::path dir = th::temp_dir("io");
  fs::create_directories(dir);
  Grid g = make_grid(3, std::vector<Extent>{{-1, 1}, {0, 1}, {2, 2.8}}, std::vector<int>{21, 11, 9});
  auto f = th::random_field(g, 77);
  io::write_field(f, dir / "f.lsmc");
  const std::string s = bytes(dir / "f.lsmc");
  CHECK(s.size() == 4 + 4 + 4 + 3 * 4 + 3 * 8 + 8 + 8 * g.size());
  CHECK(s.substr(0, 4) == "LSMC");
  CHECK(read_le<std::uint32_t>(s, 4) == 1u);
  CHECK(read_le<std::uint32_t>(s, 8) == 3u);
  CHECK(read_le<std::uint32_t>(s, 12) == 21u);
  CHECK(read_le<std::uint32_t>(s, 16) == 11u);
  CHECK(read_le<std::uint32_t>(s, 20) == 9u);
  CHECK(read_le<double>(s, 24) == -1.0);
  CHECK(read_le<double>(s, 32) == 0.0);
  CHECK(read_le<double>(s, 40) == 2.0);
  CHECK(read_le<double>(s, 48) == g.h);
  CHECK(read_le<double>(s, 56) == f[0]);
  CHECK(read_le<double>(s, 56 + 8 * 22) == f[22]);

  ScalarField back = io::read_field(dir / "f.lsmc");
  CHECK(back.grid == g);
  CHECK(back.values == f.values);

  std::string bad = s;
  bad[0] = 'X';
  io::write_text(dir / "bad.lsmc", bad);
  CHECK_CODE(io::read_field(dir / "bad.lsmc"), FormatError);
  io::write_text(dir / "short.lsmc", s.substr(0, s.size() - 3));
  CHECK_CODE(io::read_field(dir / "short.lsmc"), FormatError);
  std::string v2 = s;
  v2[4] = 2;
  io::write_text(dir / "v2.lsmc", v2);
  CHECK_CODE(io::read_field(dir / "v2.lsmc"), FormatError);
  CHECK_CODE(io::read_field(dir / "missing.lsmc"), IoError);

  std::vector<std::uint8_t> mask(g.size());
  for (std::size_t n = 0; n < mask.size(); ++n) mask[n] = n % 3 == 0;
  io::write_mask(mask, dir / "m.mask");
  CHECK(fs::file_size(dir / "m.mask") == g.size());
  CHECK(io::read_mask(dir / "m.mask", g.size()) == mask);
  CHECK_CODE(io::read_mask(dir / "m.mask", g.size() + 1), FormatError);
  fs::remove_all(dir);
}

TEST_CASE("2D dumps") {
  const fs::path dir = th::temp_dir("io2");
  fs::create_directories(dir);
  Grid g = th::cube_grid(2, 9);
  auto f = th::random_field(g, 1);
  io::write_field(f, dir / "f.lsmc");
  CHECK(fs::file_size(dir / "f.lsmc") == 4 + 4 + 4 + 2 * 4 + 2 * 8 + 8 + 8 * 81);
  CHECK(io::read_field(dir / "f.lsmc").values == f.values);
  fs::remove_all(dir);
}

TEST_CASE("mesh exports") {
  const fs::path dir = th::temp_dir("mesh");
  fs::create_directories(dir);
  Grid g = th::cube_grid(3, 16);
  auto m = extract_front(init_field(ShapeSpec{Sphere{3, {0, 0, 0}, 0.5}}, g));
  io::write_vtk(m, dir / "s.vtk");
  const std::string vtk = bytes(dir / "s.vtk");
  CHECK(vtk.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(vtk.find("DATASET POLYDATA") != std::string::npos);
  CHECK(vtk.find("POINTS " + std::to_string(m.vertices.size()) + " double") != std::string::npos);
  CHECK(vtk.find("POLYGONS " + std::to_string(m.triangles.size()) + " " +
                 std::to_string(4 * m.triangles.size())) != std::string::npos);

  io::write_mesh_csv(m, dir / "v.csv", dir / "e.csv");
  std::ifstream vs(dir / "v.csv"), es(dir / "e.csv");
  std::string line;
  std::getline(vs, line);
  CHECK(line == "id,x,y,z");
  std::size_t rows = 0;
  while (std::getline(vs, line)) ++rows;
  CHECK(rows == m.vertices.size());
  std::getline(es, line);
  CHECK(line == "a,b");
  std::size_t edges = 0;
  while (std::getline(es, line)) ++edges;
  // closed triangulated sphere: E = 3F/2
  CHECK(2 * edges == 3 * m.triangles.size());

  Grid g2 = th::cube_grid(2, 32);
  auto m2 = extract_front(init_field(ShapeSpec{Sphere{2, {0, 0, 0}, 0.5}}, g2));
  io::write_vtk(m2, dir / "c.vtk");
  CHECK(bytes(dir / "c.vtk").find("LINES 1 ") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("fmt reads back exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double x = d(rng) * std::pow(10.0, k % 20 - 10);
    const std::string s = io::fmt(x);
    double y = 0;
    std::from_chars(s.data(), s.data() + s.size(), y);
    CHECK(y == x);
  }
  CHECK(io::fmt(0.5) == "0.5");
}

TEST_CASE("config round trip") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const ExperimentConfig c = builtin_config(name);
    const std::string text = serialize_config(c);
    const ExperimentConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
    // bundled files are the canonical serializations
    const fs::path file = fs::path(LSMCF_CONFIG_DIR) / (name + ".cfg");
    REQUIRE(fs::exists(file));
    CHECK(io::read_text(file) == text);
    CHECK(load_config(file) == c);
  }
}

TEST_CASE("defaults fill in missing fields") {
  const auto c = parse_config(R"({"name": "d", "grid": {"dim": 2, "extents": [[-1,1],[-1,1]],
      "resolution": [32, 32]}, "shape": {"type": "sphere", "center": [0,0], "radius": 0.5}})");
  CHECK(c.evolution == EvolutionParams{});
  CHECK(c.outputs == OutputSpec{});
  CHECK(c.analysis == AnalysisSpec{});
  CHECK_FALSE(c.avoidance_inner);
  CHECK(parse_config(serialize_config(c)) == c);
  // spiral and dumbbell defaults
  const auto s = parse_config(R"({"name": "s", "grid": {"dim": 2, "extents": [[-1,1],[-1,1]],
      "resolution": [256, 256]}, "shape": {"type": "spiral", "turns": 2, "gap": 0.05}})");
  CHECK(s.shape["samples"] == 1024);
  const auto d = parse_config(R"({"name": "d3", "grid": {"dim": 3, "extents": [[-1.3,1.3],[-0.5,0.5],[-0.5,0.5]],
      "resolution": [27, 11, 11]}, "shape": {"type": "dumbbell"}})");
  const auto spec = build_shape(d.shape, d.grid.build());
  const auto& db = std::get<Dumbbell>(spec.shape);
  CHECK(db.bell_radius == default_dumbbell().bell_radius);
  CHECK(shape_to_json(spec) == d.shape);
}

TEST_CASE("malformed configs") {
  const std::string good = serialize_config(small_circle());
  auto with = [&](const std::function<void(nlohmann::json&)>& edit) {
    auto j = nlohmann::json::parse(good);
    edit(j);
    return j.dump();
  };
  CHECK_CODE(parse_config("{not json"), ConfigInvalid);
  CHECK_CODE(parse_config("[]"), ConfigInvalid);
  CHECK_CODE(parse_config(with([](auto& j) { j.erase("name"); })), ConfigInvalid);
  CHECK_CODE(parse_config(with([](auto& j) { j.erase("shape"); })), ConfigInvalid);
  CHECK_CODE(parse_config(with([](auto& j) { j["bogus"] = 1; })), ConfigInvalid);
  CHECK_CODE(parse_config(with([](auto& j) { j["evolution"]["cfl"] = 0.5; })), ConfigInvalid);
  CHECK_CODE(parse_config(with([](auto& j) { j["grid"]["dim"] = "two"; })), ConfigInvalid);
  CHECK_CODE(parse_config(with([](auto& j) { j["shape"]["type"] = "cube"; })), ConfigInvalid);
  CHECK_CODE(parse_config(with([](auto& j) { j["grid"]["resolution"] = {48, 60}; })), AnisotropicSpacing);
  CHECK_CODE(parse_config(with([](auto& j) { j["grid"]["resolution"] = {4, 4}; })), ResolutionTooSmall);
  CHECK_CODE(parse_config(with([](auto& j) { j["shape"]["radius"] = -1; })), InvalidSpec);
  CHECK_CODE(parse_config(with([](auto& j) { j["evolution"]["cfl_factor"] = 0.9; })), ConfigInvalid);
  CHECK_CODE(parse_config(with([](auto& j) {
               j["shape"] = {{"type", "torus"}, {"center", {0, 0, 0}}, {"plane_normal", {0, 0, 1}},
                             {"major_radius", 0.5}, {"minor_radius", 0.1}};
             })),
             SpecGridDimMismatch);
  CHECK_CODE(parse_config(with([](auto& j) {
               j["shape"] = {{"type", "spiral"}, {"turns", 3}, {"gap", 0.05}};
             })),
             UnresolvableGap);
  CHECK_CODE(load_config("/nonexistent/x.cfg"), IoError);
}

TEST_CASE("run_experiment writes every requested output") {
  const fs::path dir = th::temp_dir("run");
  auto cfg = small_circle();
  auto summary = run_experiment(cfg, dir);
  for (const char* f : {"series.csv", "run.json", "arrival.lsmc", "arrival.mask", "report.txt", "report.json",
                        "snapshots/v_0000.lsmc", "meshes/front_0000.vtk", "meshes/front_0000_vertices.csv",
                        "meshes/front_0000_edges.csv"})
    CHECK(fs::exists(dir / f));
  for (const auto& f : summary.files) CHECK(fs::exists(dir / f));

  std::ifstream csv(dir / "series.csv");
  std::string line, last;
  std::getline(csv, line);
  CHECK(line == "t,enclosed_measure,front_measure,component_count,sup_v");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    last = line;
    ++rows;
  }
  CHECK(rows == summary.flow.times.size());
  // t_ext = r0^2 / 2 for a circle
  const double t_last = std::stod(last.substr(0, last.find(',')));
  CHECK(t_last == doctest::Approx(0.18).epsilon(0.05));
  CHECK(last.find(",0,") != std::string::npos);

  auto arrival = io::read_field(dir / "arrival.lsmc");
  CHECK(arrival.grid == cfg.grid.build());
  REQUIRE(summary.analysis);
  const std::string report = io::read_text(dir / "report.txt");
  CHECK(report.find("is_c2=") != std::string::npos);
  CHECK(report_text(reanalyze(dir)) == report);
  auto run = nlohmann::json::parse(io::read_text(dir / "run.json"));
  CHECK(parse_config(run["config"].dump()) == cfg);
  fs::remove_all(dir);
}

TEST_CASE("outputs do not depend on the thread count") {
  auto cfg = small_circle();
  const fs::path a = th::temp_dir("det_a"), b = th::temp_dir("det_b");
  omp_set_num_threads(1);
  auto sa = run_experiment(cfg, a);
  omp_set_num_threads(3);
  auto sb = run_experiment(cfg, b);
  omp_set_num_threads(1);
  REQUIRE(sa.files == sb.files);
  for (const auto& f : sa.files) {
    CAPTURE(f);
    CHECK(bytes(a / f) == bytes(b / f));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("avoidance output") {
  auto cfg = small_circle();
  cfg.outputs = {true, false, false, false, false};
  cfg.avoidance_inner = nlohmann::json{{"type", "sphere"}, {"center", {0.1, 0.0}}, {"radius", 0.3}};
  const fs::path dir = th::temp_dir("avoid");
  auto s = run_experiment(parse_config(serialize_config(cfg)), dir);
  REQUIRE(s.avoidance_violation);
  CHECK(*s.avoidance_violation <= 1e-3);
  CHECK(fs::exists(dir / "avoidance.json"));
  fs::remove_all(dir);

  cfg.avoidance_inner = nlohmann::json{{"type", "sphere"}, {"center", {0.0, 0.0}}, {"radius", 0.9}};
  CHECK_CODE(run_experiment(cfg, dir), PreorderViolated);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("invalid configs create no output directory") {
  auto cfg = small_circle();
  cfg.grid.resolution = {48, 50};
  const fs::path dir = th::temp_dir("bad");
  CHECK_CODE(run_experiment(cfg, dir), AnisotropicSpacing);
  CHECK_FALSE(fs::exists(dir));
  cfg = small_circle();
  cfg.evolution.cfl_factor = 2;
  CHECK_CODE(run_experiment(cfg, dir), InvalidSpec);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("non-mean-convex starts are flagged") {
  auto cfg = small_circle();
  cfg.outputs = {true, false, true, false, false};
  const fs::path dir = th::temp_dir("warn");
  CHECK(run_experiment(cfg, dir).warnings.empty());
  fs::remove_all(dir);
  cfg.shape = {{"type", "polygon"},
               {"vertices", {{-0.6, -0.6}, {0.6, -0.6}, {0.6, 0.6}, {0.2, 0.6}, {0.2, -0.2}, {-0.2, -0.2},
                             {-0.2, 0.6}, {-0.6, 0.6}}}};
  cfg.evolution.t_max = 0.01;
  auto s = run_experiment(parse_config(serialize_config(cfg)), dir);
  REQUIRE(s.warnings.size() >= 1);
  CHECK(s.warnings[0].find("not mean convex") != std::string::npos);
  auto run = nlohmann::json::parse(io::read_text(dir / "run.json"));
  CHECK(run["warnings"].size() == s.warnings.size());
  fs::remove_all(dir);
}
