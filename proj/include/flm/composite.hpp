#pragma once

// f = g o F: values, chain-rule subdifferentials, and distances between
// finitely generated convex sets.

#include "flm/core.hpp"
#include "flm/outer.hpp"

namespace flm {

/// Raised when a hypothesis of the bounds (interior domain, center interpolation)
/// does not hold for the requested computation.
class HypothesisViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// g composed with a smooth inner map. When the inner map is a model, its
/// trust region is remembered so evaluations outside it can be flagged.
class CompositeFunction {
public:
  CompositeFunction(ConvexOuter outer, VectorFunction inner);
  CompositeFunction(ConvexOuter outer, const SmoothModel& model);

  const ConvexOuter& outer() const { return outer_; }
  const VectorFunction& inner() const { return inner_; }
  bool has_trust_region() const { return radius_.has_value(); }
  /// False only for model composites evaluated outside B_radius(center).
  bool within_trust_region(const Vec& x) const;

private:
  ConvexOuter outer_;
  VectorFunction inner_;
  Vec center_;
  std::optional<double> radius_;
};

/// g(inner(x)); +inf propagates. Writes a warning to std::clog when a model
/// composite is evaluated outside its trust region.
double comp_value(const CompositeFunction& c, const Vec& x);

enum class ChainRuleStatus {
  interior,        // inner(x) in int dom g: the chain rule holds
  boundary,        // inner(x) on the boundary: set is the mapped normal cone, rule not guaranteed
  outside_domain,  // inner(x) not in dom g: empty
};

std::string to_string(ChainRuleStatus status);

struct SubdiffResult {
  ConvexSet set;
  ChainRuleStatus status;
};

/// grad inner(x)^T dg(inner(x)): vertices and rays are mapped through the
/// transposed Jacobian, rays mapping to zero are dropped, duplicates merged.
SubdiffResult comp_subdiff(const CompositeFunction& c, const Vec& x,
                           double act_tol = kDefaultActTol);

struct MinNormResult {
  Vec nearest;          // nearest point of the set to the query
  double distance = 0.0;
  double gap = 0.0;     // optimality certificate: 0 at an exact minimizer
  int iterations = 0;
};

/// Nearest point of conv(vertices) + cone(rays) to v (active-set min-norm
/// solver). Throws std::invalid_argument on an empty set.
MinNormResult min_norm_point(const Vec& v, const ConvexSet& s);

double dist_point_set(const Vec& v, const ConvexSet& s);

/// Hausdorff distance between two nonempty polytopes. Throws
/// std::invalid_argument when either set has rays or is empty.
double hausdorff(const ConvexSet& a, const ConvexSet& b);

struct SubgradientPair {
  Vec generator;   // w in dg(F(center))
  Vec exact;       // grad F(center)^T w
  Vec model;       // grad F~(center)^T w
  double gap = 0.0;
};

/// Matches subgradients of g o F and g o F~ through shared generators of
/// dg(F(center)). Throws HypothesisViolation when F(center) is not interior
/// to dom g or the model does not interpolate F at the center.
std::vector<SubgradientPair> pair_subgradients(const ConvexOuter& g, const VectorFunction& F,
                                               const SmoothModel& model, const Vec& center,
                                               double act_tol = kDefaultActTol);

/// True when ||F~(center) - F(center)||_inf <= tol * max(1, ||F(center)||_inf).
bool interpolates_at(const VectorFunction& F, const SmoothModel& model, const Vec& center,
                     double tol = kInterpolationTol);

}  // namespace flm
