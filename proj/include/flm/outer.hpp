#pragma once

// Closed-form convex lsc outer functions g: R^m -> R u {+inf}.

#include "flm/core.hpp"

#include <string_view>

namespace flm {

enum class OuterKind { max, ell1, halfspace_indicator, squared_hinge, weighted_abs_sum };

std::string to_string(OuterKind kind);

/// Value object describing one outer function. Indices are 0-based.
class ConvexOuter {
public:
  static ConvexOuter max(int m);
  static ConvexOuter ell1(int m);
  /// Indicator of {z : z[index] >= bound}.
  static ConvexOuter halfspace_indicator(int m, int index, double bound);
  /// sum_i max(0, z_i)^2
  static ConvexOuter squared_hinge(int m);
  /// sum_i w_i |z_i| with w_i >= 0
  static ConvexOuter weighted_abs_sum(Vec weights);

  int ambient_dim() const { return dim_; }
  OuterKind kind() const { return kind_; }
  int index() const { return index_; }
  double bound() const { return bound_; }
  const Vec& weights() const { return weights_; }
  bool finite_valued() const { return kind_ != OuterKind::halfspace_indicator; }

private:
  ConvexOuter(OuterKind kind, int dim) : kind_(kind), dim_(dim) {}

  OuterKind kind_;
  int dim_;
  int index_ = 0;
  double bound_ = 0.0;
  Vec weights_;
};

/// Largest number of near-zero coordinates the abs-sum subdifferential enumerates.
inline constexpr int kMaxSignCompletions = 20;

double outer_value(const ConvexOuter& g, const Vec& z);

/// V-representation of dg(z). Empty set when z is outside dom(g).
/// Throws std::length_error when more than kMaxSignCompletions coordinates
/// are within act_tol of zero for the abs-sum kinds.
ConvexSet outer_subdiff(const ConvexOuter& g, const Vec& z, double act_tol = kDefaultActTol);

/// sup{||w|| : w in dg(z)}: +inf when dg(z) has rays, nullopt when it is empty.
std::optional<double> lip_modulus(const ConvexOuter& g, const Vec& z,
                                  double act_tol = kDefaultActTol);

bool interior_dom(const ConvexOuter& g, const Vec& z);
bool in_dom(const ConvexOuter& g, const Vec& z);

}  // namespace flm
