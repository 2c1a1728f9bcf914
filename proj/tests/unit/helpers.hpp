#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "lsmcf/error.hpp"
#include "lsmcf/grid.hpp"

namespace th {

inline lsmcf::Grid cube_grid(int dim, int n, double lo = -1.0, double hi = 1.0) {
  std::vector<lsmcf::Extent> ex(dim, lsmcf::Extent{lo, hi});
  std::vector<int> res(dim, n);
  return lsmcf::make_grid(dim, ex, res);
}

template <class Fn>
lsmcf::ScalarField sample(const lsmcf::Grid& g, Fn&& fn) {
  lsmcf::ScalarField f(g);
  lsmcf::for_each_index(g, [&](const lsmcf::Index& i) { f.at(i) = fn(g.position(i)); });
  return f;
}

inline lsmcf::ScalarField random_field(const lsmcf::Grid& g, unsigned seed, double lo = -1.0,
                                       double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  lsmcf::ScalarField f(g);
  for (auto& x : f.values) x = d(rng);
  return f;
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() /
           ("lsmcf_test_" + tag + "_" + std::to_string(std::random_device{}()));
  std::filesystem::remove_all(p);
  return p;
}

// Error code of whatever `fn` throws, or nothing when it returns normally.
template <class Fn>
std::optional<lsmcf::ErrorCode> code_of(Fn&& fn) {
  try {
    fn();
  } catch (const lsmcf::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace th

#define CHECK_CODE(expr, ecode) CHECK(th::code_of([&] { (void)(expr); }) == lsmcf::ErrorCode::ecode)
