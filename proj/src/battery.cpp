#include "flm/battery.hpp"

#include <cmath>

namespace flm {

VectorFunction sin_square() {
  return VectorFunction{
      2, 2, [](const Vec& x) -> Vec { return Vec{{std::sin(x(0)), x(1) * x(1)}}; },
      [](const Vec& x) -> Mat { return Mat{{std::cos(x(0)), 0.0}, {0.0, 2.0 * x(1)}}; }};
}

VectorFunction quad_mix() {
  return VectorFunction{
      2, 2, [](const Vec& x) -> Vec { return Vec{{x(0) * x(0), -x(0) * x(0) + x(1)}}; },
      [](const Vec& x) -> Mat { return Mat{{2.0 * x(0), 0.0}, {-2.0 * x(0), 1.0}}; }};
}

VectorFunction paraboloid_pair() {
  return VectorFunction{
      2, 2,
      [](const Vec& x) -> Vec {
        const double a = x(0) * x(0);
        return Vec{{a + (x(1) - 1.0) * (x(1) - 1.0), a + (x(1) + 1.0) * (x(1) + 1.0)}};
      },
      [](const Vec& x) -> Mat {
        return Mat{{2.0 * x(0), 2.0 * (x(1) - 1.0)}, {2.0 * x(0), 2.0 * (x(1) + 1.0)}};
      }};
}

VectorFunction shifted_identity() {
  return VectorFunction{2, 2, [](const Vec& x) -> Vec { return Vec{{x(0) - 1.0, x(1) + 2.0}}; },
                        [](const Vec&) -> Mat { return Mat::Identity(2, 2); }};
}

VectorFunction univariate_cubic() {
  return VectorFunction{
      1, 1,
      [](const Vec& x) -> Vec {
        const double t = x(0);
        return Vec::Constant(1, ((t - 2.0) * t + 1.0) * t - 0.5);
      },
      [](const Vec& x) -> Mat {
        const double t = x(0);
        return Mat::Constant(1, 1, (3.0 * t - 4.0) * t + 1.0);
      }};
}

ConvexOuter outer_by_name(std::string_view name, int m) {
  if (name == "max") return ConvexOuter::max(m);
  if (name == "ell1") return ConvexOuter::ell1(m);
  if (name == "indicator") return ConvexOuter::halfspace_indicator(m, 0, 0.0);
  if (name == "hinge") return ConvexOuter::squared_hinge(m);
  throw std::invalid_argument("unknown outer function: " + std::string(name));
}

std::vector<std::string> problem_ids() {
  return {"sin_sq", "sin_sq_max", "quad_mix", "cubic", "paraboloids", "shifted_identity",
          "identity_hinge", "ex33", "ex42", "ex43", "ex44"};
}

Problem find_problem(std::string_view id) {
  const Vec origin = Vec::Zero(2);
  if (id == "sin_sq")
    return {"sin_sq", "(sin x1, x2^2) under ell1", sin_square(), Vec{{0.5, 0.8}}, 1.0,
            ConvexOuter::ell1(2), Vec{{0.5, 0.8}}};
  if (id == "sin_sq_max")
    return {"sin_sq_max", "(sin x1, x2^2) under max", sin_square(), Vec{{0.5, 0.8}}, 1.0,
            ConvexOuter::max(2), Vec{{0.5, 0.8}}};
  if (id == "quad_mix")
    return {"quad_mix", "(x1^2, -x1^2 + x2) under max", quad_mix(), Vec{{0.3, -0.2}}, 1.0,
            ConvexOuter::max(2), Vec{{0.3, -0.2}}};
  if (id == "cubic")
    return {"cubic", "x^3 - 2x^2 + x - 0.5 under max", univariate_cubic(), Vec::Constant(1, 0.7), 1.0,
            ConvexOuter::max(1), Vec::Constant(1, 0.7)};
  if (id == "paraboloids")
    return {"paraboloids", "max of two shifted paraboloids", paraboloid_pair(), Vec{{0.3, 0.2}}, 1.0,
            ConvexOuter::max(2), Vec{{2.0, 2.0}}};
  if (id == "shifted_identity")
    return {"shifted_identity", "(x1 - 1, x2 + 2) under ell1", shifted_identity(), origin, 1.0,
            ConvexOuter::ell1(2), origin};
  if (id == "identity_hinge")
    return {"identity_hinge", "(x1, x2) under squared hinge", identity_function(2), Vec{{3.0, -5.0}}, 1.0,
            ConvexOuter::squared_hinge(2), Vec{{3.0, -5.0}}};
  if (id == "ex33" || id == "ex42")
    return {std::string(id), "identity under the half-space indicator", identity_function(2), origin, 1.0,
            ConvexOuter::halfspace_indicator(2, 0, 0.0), origin, true};
  if (id == "ex43" || id == "ex44")
    return {std::string(id), "identity under ell1", identity_function(2), origin, 1.0,
            ConvexOuter::ell1(2), origin, true};
  throw std::invalid_argument("unknown problem: " + std::string(id));
}

ModelFamily problem_family(const Problem& problem, const Scheme& scheme, std::uint64_t seed) {
  if (problem.adversarial) return adversarial_family(problem.id);
  ModelFamily family = interpolation_family(problem.F, problem.center, problem.delta_bar, scheme, seed);
  family.name = problem.id + ":" + family.name;
  return family;
}

}  // namespace flm
