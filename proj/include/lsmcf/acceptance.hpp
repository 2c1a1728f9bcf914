#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace lsmcf::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string measured;
  std::string bound;
  bool pass = false;
  double seconds = 0.0;
};

// "quick" runs the 2D criteria (1, 6, 9 and 11 on their configs); "full" runs
// all eleven. Throws SuiteUnknown otherwise.
std::vector<int> suite_criteria(const std::string& suite);

struct SuiteOptions {
  std::filesystem::path work_dir = "acceptance_work";
  std::function<void(const CriterionResult&)> on_result;
  std::function<void(const std::string&)> log;
};

std::vector<CriterionResult> run_suite(const std::string& suite, const SuiteOptions& options);

// id=<n> name=<name> measured=<...> bound=<...> pass=<true|false> seconds=<s>
std::string format_result(const CriterionResult& r);

}  // namespace lsmcf::acceptance
