#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "json.hpp"
#include "lsmcf/config.hpp"
#include "lsmcf/experiment.hpp"
#include "lsmcf/io.hpp"

using namespace lsmcf;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result lsmcf_cli(const std::string& args) {
  static int counter = 0;
  const fs::path log = fs::temp_directory_path() / ("lsmcf_cli_" + std::to_string(::getpid()) + "_" +
                                                    std::to_string(counter++) + ".txt");
  const std::string cmd = std::string("\"") + LSMCF_EXE + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Result r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, io::read_text(log)};
  fs::remove(log);
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::set<fs::path> tree(const fs::path& dir) {
  std::set<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.insert(fs::relative(e.path(), dir));
  return files;
}

std::string last_line(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  return last;
}

std::string small_config() {
  auto c = builtin_config("circle");
  c.name = "small";
  c.grid.resolution = {48, 48};
  c.shape["radius"] = 0.6;
  c.evolution.snapshot_stride = 100;
  c.outputs = {true, true, true, true, true};
  return serialize_config(c);
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(lsmcf_cli("").code == 2);
  CHECK(lsmcf_cli("bogus").code == 2);
  CHECK(lsmcf_cli("run").code == 2);
  CHECK(lsmcf_cli("run --config a.cfg --scenario circle").code == 2);
  CHECK(lsmcf_cli("report").code == 2);
  CHECK(lsmcf_cli("--threads -1 shapes").code == 2);
  CHECK(lsmcf_cli("--help").code == 0);
}

TEST_CASE("unknown suite") {
  const fs::path dir = th::temp_dir("suite");
  auto r = lsmcf_cli("verify --suite nightly --out " + q(dir));
  CHECK(r.code == 10);
  CHECK(r.out.find("SuiteUnknown") != std::string::npos);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("error codes for bad configs leave no files behind") {
  const fs::path tmp = th::temp_dir("cfgs");
  fs::create_directories(tmp);
  const fs::path out = tmp / "out";
  auto base = nlohmann::json::parse(small_config());

  io::write_text(tmp / "malformed.cfg", "{\"name\": \"x\", \"grid\": ");
  CHECK(lsmcf_cli("run --config " + q(tmp / "malformed.cfg") + " --out " + q(out)).code == 3);
  CHECK_FALSE(fs::exists(out));

  auto unknown = base;
  unknown["evolution"]["dt"] = 0.1;
  io::write_text(tmp / "unknown.cfg", unknown.dump());
  CHECK(lsmcf_cli("run --config " + q(tmp / "unknown.cfg") + " --out " + q(out)).code == 3);
  CHECK_FALSE(fs::exists(out));

  auto shape = base;
  shape["shape"]["radius"] = -0.5;
  io::write_text(tmp / "shape.cfg", shape.dump());
  CHECK(lsmcf_cli("run --config " + q(tmp / "shape.cfg") + " --out " + q(out)).code == 5);
  CHECK_FALSE(fs::exists(out));

  auto grid = base;
  grid["grid"]["resolution"] = {48, 40};
  io::write_text(tmp / "grid.cfg", grid.dump());
  CHECK(lsmcf_cli("run --config " + q(tmp / "grid.cfg") + " --out " + q(out)).code == 6);
  CHECK_FALSE(fs::exists(out));

  CHECK(lsmcf_cli("run --config " + q(tmp / "missing.cfg") + " --out " + q(out)).code == 4);
  CHECK(lsmcf_cli("run --scenario nope --out " + q(out)).code == 3);
  CHECK(lsmcf_cli("report --out " + q(tmp / "nothing")).code == 4);
  CHECK_FALSE(fs::exists(out));
  fs::remove_all(tmp);
}

TEST_CASE("shapes writes the bundled configs") {
  const fs::path dir = th::temp_dir("shapes");
  auto r = lsmcf_cli("shapes --out " + q(dir));
  CHECK(r.code == 0);
  for (const auto& name : builtin_names()) {
    CHECK(r.out.find(name) != std::string::npos);
    CHECK(io::read_text(dir / (name + ".cfg")) == io::read_text(fs::path(LSMCF_CONFIG_DIR) / (name + ".cfg")));
  }
  fs::remove_all(dir);
}

TEST_CASE("--threads changes no output byte") {
  const fs::path tmp = th::temp_dir("threads");
  fs::create_directories(tmp);
  io::write_text(tmp / "small.cfg", small_config());
  CHECK(lsmcf_cli("--threads 1 run --config " + q(tmp / "small.cfg") + " --out " + q(tmp / "a")).code == 0);
  CHECK(lsmcf_cli("run --threads 4 --config " + q(tmp / "small.cfg") + " --out " + q(tmp / "b")).code == 0);
  CHECK(lsmcf_cli("run --config " + q(tmp / "small.cfg") + " --out " + q(tmp / "c")).code == 0);
  const auto files = tree(tmp / "a");
  CHECK(files.size() > 5);
  CHECK(tree(tmp / "b") == files);
  CHECK(tree(tmp / "c") == files);
  for (const auto& f : files) {
    CAPTURE(f);
    const std::string a = io::read_text(tmp / "a" / f);
    CHECK(io::read_text(tmp / "b" / f) == a);
    CHECK(io::read_text(tmp / "c" / f) == a);
  }

  auto text = lsmcf_cli("report --out " + q(tmp / "a"));
  CHECK(text.code == 0);
  CHECK(text.out == io::read_text(tmp / "a" / "report.txt"));
  auto js = lsmcf_cli("report --json --out " + q(tmp / "a"));
  CHECK(js.code == 0);
  CHECK(nlohmann::json::parse(js.out) == nlohmann::json::parse(io::read_text(tmp / "a" / "report.json")));
  fs::remove_all(tmp);
}

TEST_CASE("bundled sphere config: extinction near 0.16") {
  const fs::path dir = th::temp_dir("sphere");
  REQUIRE(lsmcf_cli("run --config " + q(fs::path(LSMCF_CONFIG_DIR) / "sphere.cfg") + " --out " + q(dir)).code == 0);
  std::stringstream row(last_line(dir / "series.csv"));
  std::vector<std::string> cols;
  for (std::string c; std::getline(row, c, ',');) cols.push_back(c);
  REQUIRE(cols.size() == 5);
  CHECK(std::stod(cols[0]) == doctest::Approx(0.16).epsilon(0.08));
  CHECK(cols[3] == "0");
  fs::remove_all(dir);
}

TEST_CASE("bundled dumbbell config is not C2") {
  const fs::path dir = th::temp_dir("dumbbell");
  REQUIRE(lsmcf_cli("run --config " + q(fs::path(LSMCF_CONFIG_DIR) / "dumbbell.cfg") + " --out " + q(dir)).code == 0);
  const std::string report = io::read_text(dir / "report.txt");
  CHECK(report.find("is_c2=false") != std::string::npos);
  CHECK(report.find("multiple singular times") != std::string::npos);
  fs::remove_all(dir);
}
