#pragma once

// Built-in smooth test problems and the adversarial configurations,
// addressed by id from the command line and the test suites.

#include "flm/models.hpp"
#include "flm/outer.hpp"

#include <string_view>

namespace flm {

struct Problem {
  std::string id;
  std::string description;
  VectorFunction F;
  Vec center;          // focal point for certification and bound checks
  double delta_bar = 1.0;
  ConvexOuter outer;   // default outer function
  Vec start;           // starting point for the solver demo
  bool adversarial = false;
};

/// Throws std::invalid_argument for unknown ids.
Problem find_problem(std::string_view id);
std::vector<std::string> problem_ids();

/// Adversarial problems use their closed-form family; the rest use `scheme`.
ModelFamily problem_family(const Problem& problem, const Scheme& scheme, std::uint64_t seed);

/// Outer functions by CLI name for a given output dimension:
/// max, ell1, indicator (z_1 >= 0), hinge.
ConvexOuter outer_by_name(std::string_view name, int m);

// Smooth maps used across the battery.
VectorFunction sin_square();        // (sin x1, x2^2)
VectorFunction quad_mix();          // (x1^2, -x1^2 + x2)
VectorFunction paraboloid_pair();   // (x1^2 + (x2-1)^2, x1^2 + (x2+1)^2)
VectorFunction shifted_identity();  // (x1 - 1, x2 + 2)
VectorFunction univariate_cubic();  // x^3 - 2x^2 + x - 0.5

}  // namespace flm
