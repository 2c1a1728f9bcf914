// Runs the acceptance criteria and prints one line per criterion.
#include <cstring>
#include <iostream>
#include <string>

#include "lsmcf/acceptance.hpp"
#include "lsmcf/error.hpp"

int main(int argc, char** argv) {
  std::string suite = "full";
  lsmcf::acceptance::SuiteOptions opt;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (!std::strcmp(argv[i], "--suite")) suite = argv[i + 1];
    else if (!std::strcmp(argv[i], "--work")) opt.work_dir = argv[i + 1];
  }
  opt.log = [](const std::string& s) { std::cerr << "# " << s << std::endl; };
  opt.on_result = [](const lsmcf::acceptance::CriterionResult& r) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << lsmcf::acceptance::format_result(r) << std::endl;
  };
  try {
    const auto results = lsmcf::acceptance::run_suite(suite, opt);
    int failed = 0;
    for (const auto& r : results) failed += !r.pass;
    std::cout << (failed ? "FAILED " : "PASSED ") << results.size() - failed << "/" << results.size() << std::endl;
    return failed ? 1 : 0;
  } catch (const lsmcf::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
}
