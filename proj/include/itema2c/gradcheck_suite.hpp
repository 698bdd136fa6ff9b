#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "itema2c/core_types.hpp"
#include "itema2c/networks.hpp"
#include "itema2c/user_env.hpp"

namespace itema2c {

// A tiny environment plus network dimensions for exhaustive finite-difference
// checks, with a batch of transitions collected by a uniform random policy.
struct SmallProblem {
  EnvConfig env;
  nn::ModelDims dims;
  std::vector<Transition> batch;
};

// Transitions carry random hyper-actions of width dims.item_dim.
SmallProblem make_small_problem(std::uint64_t seed, std::size_t batch_size = 6, std::size_t list_size = 3);

struct GradCheckFamilyResult {
  std::string family;
  std::size_t instances = 0;
  std::size_t failures = 0;
  double max_rel_error = 0.0;
  std::string worst_param;
  bool passed = true;
};

struct GradCheckSuiteOptions {
  std::size_t instances = 10;
  double tolerance = 1e-4;
  std::uint64_t seed = 7;
  // Scales every analytic gradient by 1.1 so the suite must fail.
  bool inject_bug = false;
};

std::vector<std::string> gradcheck_families();
std::vector<GradCheckFamilyResult> run_gradcheck_suite(const GradCheckSuiteOptions& options = {});

}  // namespace itema2c
