#include "lsmcf/acceptance.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>
#include <optional>

#include "lsmcf/analysis.hpp"
#include "lsmcf/error.hpp"
#include "lsmcf/experiment.hpp"
#include "lsmcf/io.hpp"
#include "lsmcf/linalg.hpp"
#include "lsmcf/measures.hpp"
#include "lsmcf/shapes.hpp"

namespace lsmcf::acceptance {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

struct Run {
  RunSummary summary;
  std::optional<ArrivalTimeField> arrival;
  double seconds = 0.0;
};

class Context {
 public:
  explicit Context(const SuiteOptions& opt) : opt_(opt) {}

  // First run of a bundled scenario, single-threaded, cached.
  const Run& get(const std::string& name) {
    auto it = runs_.find(name);
    if (it != runs_.end()) return *it->second;
    say("running " + name);
    omp_set_num_threads(1);
    auto run = std::make_unique<Run>();
    const auto t0 = Clock::now();
    run->summary = run_experiment(builtin_config(name), opt_.work_dir / "a" / name);
    run->seconds = since(t0);
    const fs::path dump = opt_.work_dir / "a" / name / "arrival.lsmc";
    if (fs::exists(dump)) {
      ScalarField u = io::read_field(dump);
      auto mask = io::read_mask(opt_.work_dir / "a" / name / "arrival.mask", u.size());
      run->arrival = make_arrival_field(std::move(u), std::move(mask));
      run->arrival->dt = run->summary.flow.dt;
      run->arrival->extinction_time = run->summary.flow.extinction_time;
    }
    say(name + " finished in " + num(run->seconds, 4) + " s");
    order_.push_back(name);
    return *runs_.emplace(name, std::move(run)).first->second;
  }

  const std::vector<std::string>& order() const { return order_; }
  const SuiteOptions& options() const { return opt_; }
  void say(const std::string& s) const {
    if (opt_.log) opt_.log(s);
  }

 private:
  const SuiteOptions& opt_;
  std::map<std::string, std::unique_ptr<Run>> runs_;
  std::vector<std::string> order_;
};

CriterionResult circle_extinction(Context& ctx) {
  const Run& r = ctx.get("circle");
  const double t = r.summary.flow.extinction_time.value_or(NAN);
  const double rel = std::abs(t - 0.32) / 0.32;
  return {1, "circle_extinction",
          "t_ext=" + num(t) + " rel_err=" + num(rel, 3) + " runtime_s=" + num(r.seconds, 4),
          "rel_err<=0.05 runtime_s<=120", rel <= 0.05 && r.seconds <= 120.0};
}

CriterionResult sphere_extinction(Context& ctx) {
  const Run& r = ctx.get("sphere");
  const double t = r.summary.flow.extinction_time.value_or(NAN);
  const double rel = std::abs(t - 0.16) / 0.16;
  return {2, "sphere_extinction",
          "t_ext=" + num(t) + " rel_err=" + num(rel, 3) + " runtime_s=" + num(r.seconds, 4),
          "rel_err<=0.08 runtime_s<=900", rel <= 0.08 && r.seconds <= 900.0};
}

CriterionResult cylinder_arrival(Context& ctx) {
  const Run& r = ctx.get("cylinder");
  const ArrivalTimeField& u = *r.arrival;
  const Grid& g = u.grid();
  // least squares u = a rho^2 + c over the valid nodes of the middle layer
  double s00 = 0, s01 = 0, s11 = 0, b0 = 0, b1 = 0;
  const int z = g.shape[2] / 2;
  for (int y = 0; y < g.shape[1]; ++y)
    for (int x = 0; x < g.shape[0]; ++x) {
      const Index i{x, y, z};
      if (!u.is_valid(i)) continue;
      const Vec p = g.position(i);
      const double q = p[0] * p[0] + p[1] * p[1];
      s00 += q * q;
      s01 += q;
      s11 += 1.0;
      b0 += q * u.u.at(i);
      b1 += u.u.at(i);
    }
  const double a = (b0 * s11 - s01 * b1) / (s00 * s11 - s01 * s01);
  const double coef_err = std::abs(a + 0.5) / 0.5;

  const auto& cps = r.summary.analysis->critical_points;
  double eig_dev = cps.empty() ? INFINITY : 0.0;
  const Vec model{-1.0, -1.0, 0.0};
  for (const auto& c : cps)
    for (int k = 0; k < 3; ++k) eig_dev = std::max(eig_dev, std::abs(c.eigenvalues[k] - model[k]));
  return {3, "cylinder_arrival",
          "quad_coef=" + num(a) + " rel_err=" + num(coef_err, 3) + " clusters=" + std::to_string(cps.size()) +
              " max_eig_dev=" + num(eig_dev, 3),
          "rel_err<0.10 max_eig_dev<=0.15", coef_err < 0.10 && eig_dev <= 0.15};
}

CriterionResult sphere_hessian(Context& ctx) {
  const Run& r = ctx.get("sphere");
  const auto& cps = r.summary.analysis->critical_points;
  double worst = INFINITY;
  if (cps.size() == 1) {
    worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        worst = std::max(worst, std::abs(cps[0].hessian[i][j] - (i == j ? -0.5 : 0.0)));
  }
  return {4, "sphere_hessian",
          "clusters=" + std::to_string(cps.size()) + " max_entry_dev=" + num(worst, 3) +
              (cps.size() == 1 ? " value=" + num(cps[0].value) : ""),
          "one cluster, max_entry_dev<=0.1", cps.size() == 1 && worst <= 0.1};
}

CriterionResult arrival_residual_criterion(Context& ctx) {
  const double s_fine = ctx.get("sphere").summary.analysis->residual.median;
  const double s_coarse = ctx.get("sphere_coarse").summary.analysis->residual.median;
  const double c_coarse = ctx.get("cylinder").summary.analysis->residual.median;
  const double c_fine = ctx.get("cylinder_fine").summary.analysis->residual.median;
  const double s_ratio = s_coarse / s_fine, c_ratio = c_coarse / c_fine;
  const bool pass = s_fine <= 0.1 && c_coarse <= 0.1 && s_coarse <= 0.1 && c_fine <= 0.1 && s_ratio >= 1.5 &&
                    c_ratio >= 1.5;
  return {5, "arrival_residual",
          "sphere=" + num(s_coarse, 4) + "->" + num(s_fine, 4) + " (x" + num(s_ratio, 3) + ") cylinder=" +
              num(c_coarse, 4) + "->" + num(c_fine, 4) + " (x" + num(c_ratio, 3) + ")",
          "medians<=0.1, coarse/fine>=1.5", pass};
}

CriterionResult grayson(Context& ctx) {
  ctx.say("running spiral (roundness)");
  const ExperimentConfig cfg = builtin_config("spiral");
  const Grid g = cfg.grid.build();
  const ScalarField v0 = init_field(build_shape(cfg.shape, g), g);
  omp_set_num_threads(1);
  FlowHooks hooks;
  hooks.retain_snapshots = false;
  double first_round_t = NAN, first_round_ratio = NAN, first_round_area = NAN, min_ratio = INFINITY;
  bool single = true;
  double ratio0 = NAN;
  hooks.on_snapshot = [&](double t, const ScalarField& f) {
    if (*std::max_element(f.values.begin(), f.values.end()) < 0.0) return;
    if (component_count(f) != 1) single = false;
    double ratio;
    try {
      ratio = isoperimetric_ratio(f);
    } catch (const Error&) {
      single = false;
      return;
    }
    if (std::isnan(ratio0)) ratio0 = ratio;
    min_ratio = std::min(min_ratio, ratio);
    if (std::isnan(first_round_t) && ratio < 1.05) {
      first_round_t = t;
      first_round_ratio = ratio;
      first_round_area = enclosed_measure(f);
    }
  };
  const FlowRecord rec = evolve(v0, cfg.evolution, hooks);
  for (const auto& e : rec.events)
    if (e.kind == TopologyEvent::Kind::ComponentChange) single = false;
  const double t_ext = rec.extinction_time.value_or(NAN);
  const bool pass = !std::isnan(first_round_t) && first_round_t < t_ext && single && rec.initial_components == 1;
  return {6, "grayson_roundness",
          "ratio0=" + num(ratio0, 4) + " ratio=" + num(first_round_ratio, 4) + " at t=" + num(first_round_t) +
              " (area " + num(first_round_area, 3) + ", t_ext=" + num(t_ext) + ") single_component=" +
              (single ? "true" : "false"),
          "ratio<1.05 before extinction, component_count==1 throughout", pass};
}

CriterionResult dumbbell(Context& ctx) {
  const Run& r = ctx.get("dumbbell");
  const auto& flow = r.summary.flow;
  const AnalysisReport& a = *r.summary.analysis;
  int changes = 0;
  bool pinch_ok = false;
  double pinch_t = NAN;
  for (const auto& e : flow.events)
    if (e.kind == TopologyEvent::Kind::ComponentChange) {
      ++changes;
      pinch_t = e.t_after;
      pinch_ok = e.from == 1 && e.to == 2 && flow.extinction_time && e.t_after < *flow.extinction_time;
    }
  bool separated = a.value_groups.size() >= 2;
  for (std::size_t i = 1; i < a.value_groups.size(); ++i)
    separated = separated && a.value_groups[i].front() - a.value_groups[i - 1].back() > 3.0 * flow.dt;
  bool reason = false;
  for (const auto& s : a.verdict.reasons) reason = reason || s.starts_with("fail: multiple singular times");
  const bool pass = changes == 1 && pinch_ok && separated && !a.verdict.is_c2 && reason;
  return {7, "dumbbell",
          "component_changes=" + std::to_string(changes) + " pinch_t=" + num(pinch_t) +
              " t_ext=" + num(flow.extinction_time.value_or(NAN)) + " value_groups=" +
              std::to_string(a.value_groups.size()) + " is_c2=" + (a.verdict.is_c2 ? "true" : "false"),
          "one 1->2 change before extinction, >=2 value groups >3dt apart, is_c2=false (multiple singular times)",
          pass};
}

CriterionResult ring(Context& ctx) {
  const Run& r = ctx.get("ring");
  const AnalysisReport& a = *r.summary.analysis;
  const SingularSet& s = a.singular;
  bool all_k1 = !s.points.empty();
  double dev = 0.0;
  for (const auto& p : s.points) {
    all_k1 = all_k1 && p.fit.k == 1 && p.fit.deviation <= 0.15;
    dev = std::max(dev, p.fit.deviation);
  }
  const bool one = s.components.size() == 1;
  const bool loop = one && s.components[0].curve_like && s.components[0].closed;
  double circ_err = INFINITY;
  if (loop) {
    const auto& c = s.components[0];
    circ_err = std::abs(c.loop_length - 2.0 * std::numbers::pi * c.loop_radius) / (2.0 * std::numbers::pi * c.loop_radius);
  }
  const bool kind = a.verdict.kind == C2Verdict::Case::ClosedCurveCylindrical;
  const bool pass = loop && all_k1 && circ_err <= 0.15 && a.verdict.max_axis_angle_deg <= 15.0 && kind &&
                    a.verdict.is_c2;
  return {8, "marriage_ring",
          "components=" + std::to_string(s.components.size()) + " closed=" + (loop ? "true" : "false") +
              " points=" + std::to_string(s.points.size()) + " max_eig_dev=" + num(dev, 3) +
              " circumference_err=" + num(circ_err, 3) + " max_axis_angle_deg=" +
              num(a.verdict.max_axis_angle_deg, 3) + " case=" +
              (a.verdict.kind ? to_string(*a.verdict.kind) : "none"),
          "one closed loop, all k=1 within 0.15, axes<=15deg, case ClosedCurveCylindrical", pass};
}

CriterionResult avoidance(Context& ctx) {
  const Run& r = ctx.get("nested");
  const double violation = r.summary.avoidance_violation.value_or(INFINITY);
  ctx.say("running constant-shift comparison");
  ExperimentConfig cfg = builtin_config("circle");
  const Grid g = cfg.grid.build();
  const ScalarField v = init_field(build_shape(cfg.shape, g), g);
  ScalarField shifted = v;
  for (double& x : shifted.values) x += 1.0;
  EvolutionParams p = cfg.evolution;
  p.t_max = 0.01;
  const double shift = avoidance_check(v, shifted, p);
  const double same = avoidance_check(v, v, p);
  return {9, "avoidance",
          "nested_violation=" + num(violation, 3) + " shift_violation=" + num(shift) + " equal_violation=" +
              num(same),
          "nested<=1e-3, shift==0, equal==0", violation <= 1e-3 && shift == 0.0 && same == 0.0};
}

CriterionResult axis_uniqueness_criterion(Context& ctx) {
  const Run& r = ctx.get("cylinder");
  const auto& cps = r.summary.analysis->critical_points;
  if (cps.empty()) return {10, "axis_uniqueness", "no critical point", "", false};
  const CriticalPointReport& c = cps.front();
  std::vector<Vec> axes;
  std::string levels;
  double to_true = 0.0;
  for (double f : {0.90, 0.94, 0.98}) {
    const double level = f * c.value;
    levels += (levels.empty() ? "" : ",") + num(level, 5);
    try {
      axes.push_back(axis_fit(*r.arrival, c, level));
    } catch (const Error& e) {
      return {10, "axis_uniqueness", std::string("axis_fit failed: ") + e.what(), "", false};
    }
    to_true = std::max(to_true, line_angle_deg(axes.back(), Vec{0.0, 0.0, 1.0}));
  }
  const double pairwise = max_pairwise_axis_angle(axes);
  return {10, "axis_uniqueness",
          "levels=" + levels + " max_pairwise_deg=" + num(pairwise, 3) + " max_to_true_axis_deg=" + num(to_true, 3),
          "pairwise<=5deg, to true axis<=5deg", pairwise <= 5.0 && to_true <= 5.0};
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  try {
    return io::read_text(a) == io::read_text(b);
  } catch (const Error&) {
    return false;
  }
}

CriterionResult determinism(Context& ctx, const std::vector<std::string>& configs) {
  for (const auto& name : configs) ctx.get(name);
  std::size_t files = 0, mismatched = 0;
  std::string bad;
  for (const auto& name : configs) {
    ctx.say("re-running " + name + " with 2 threads");
    omp_set_num_threads(2);
    const fs::path dir_b = ctx.options().work_dir / "b" / name;
    const RunSummary b = run_experiment(builtin_config(name), dir_b);
    omp_set_num_threads(1);
    const fs::path dir_a = ctx.options().work_dir / "a" / name;
    auto list_a = ctx.get(name).summary.files;
    if (list_a != b.files) {
      ++mismatched;
      bad += " " + name + "(file list)";
      continue;
    }
    for (const auto& f : list_a) {
      ++files;
      if (!same_bytes(dir_a / f, dir_b / f)) {
        ++mismatched;
        bad += " " + name + "/" + f.generic_string();
      }
    }
  }
  std::string names;
  for (const auto& n : configs) names += (names.empty() ? "" : ",") + n;
  return {11, "determinism",
          "configs=" + names + " files_compared=" + std::to_string(files) + " mismatched=" +
              std::to_string(mismatched) + bad,
          "all outputs byte-identical across runs and thread counts", mismatched == 0 && files > 0};
}

}  // namespace

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "quick") return {1, 6, 9, 11};
  if (suite == "full") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  throw Error(ErrorCode::SuiteUnknown, "unknown suite '" + suite + "' (expected quick or full)");
}

std::vector<CriterionResult> run_suite(const std::string& suite, const SuiteOptions& options) {
  const std::vector<int> ids = suite_criteria(suite);
  const int saved_threads = omp_get_max_threads();
  Context ctx(options);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
      switch (id) {
        case 1: r = circle_extinction(ctx); break;
        case 2: r = sphere_extinction(ctx); break;
        case 3: r = cylinder_arrival(ctx); break;
        case 4: r = sphere_hessian(ctx); break;
        case 5: r = arrival_residual_criterion(ctx); break;
        case 6: r = grayson(ctx); break;
        case 7: r = dumbbell(ctx); break;
        case 8: r = ring(ctx); break;
        case 9: r = avoidance(ctx); break;
        case 10: r = axis_uniqueness_criterion(ctx); break;
        case 11: {
          std::vector<std::string> configs = {"circle", "nested", "spiral"};
          if (suite == "full")
            configs = {"circle",   "sphere", "sphere_coarse", "cylinder", "cylinder_fine",
                       "dumbbell", "ring",   "nested",        "spiral"};
          r = determinism(ctx, configs);
          break;
        }
      }
    } catch (const std::exception& e) {
      r = {id, "criterion_" + std::to_string(id), std::string("error: ") + e.what(), "", false};
    }
    r.id = id;
    r.seconds = since(t0);
    if (options.on_result) options.on_result(r);
    out.push_back(r);
  }
  omp_set_num_threads(saved_threads);
  return out;
}

std::string format_result(const CriterionResult& r) {
  return "id=" + std::to_string(r.id) + " name=" + r.name + " measured=\"" + r.measured + "\" bound=\"" + r.bound +
         "\" pass=" + (r.pass ? "true" : "false") + " seconds=" + num(r.seconds, 4);
}

}  // namespace lsmcf::acceptance
