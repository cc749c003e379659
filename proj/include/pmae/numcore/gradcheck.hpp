// Copyright 2026 The pmae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pmae/numcore/autograd.hpp"
#include "pmae/numcore/rng.hpp"

namespace pmae {

/// One differentiable op under test: random inputs and how to apply the op.
struct GradcheckCase {
  std::string name;
  std::function<std::vector<Tensor>(Rng&)> make_inputs;
  std::function<Var(std::span<const Var>)> apply;
};

struct GradcheckOptions {
  std::size_t trials = 10;
  double eps = 1e-5;
  double tolerance = 1e-4;
};

struct GradcheckResult {
  std::string name;
  std::size_t trials = 0;
  double max_rel_error = 0.0;
  bool passed = false;
};

/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-3). The floor keeps
/// entries whose true gradient is ~0 from dominating through round-off.
double gradient_relative_error(double analytic, double numeric);

/// Compare reverse-mode gradients of sum(op(x) * R), R a fixed random weight,
/// against central finite differences over every input element.
GradcheckResult run_gradcheck(const GradcheckCase& c, std::uint64_t seed, const GradcheckOptions& options = {});

/// Every op in the numcore catalog.
std::vector<GradcheckCase> numcore_gradcheck_cases();

}  // namespace pmae
