#pragma once

// Shared domain types for fully linear models of composite functions g(F(x)).

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Default tolerances shared across modules.
inline constexpr double kInterpolationTol = 1e-12;
inline constexpr double kGradientCheckTol = 1e-5;
inline constexpr double kSetDistanceTol = 1e-9;
inline constexpr double kDefaultActTol = 1e-10;
inline constexpr double kDedupTol = 1e-12;

/// Smooth map F: R^n -> R^m with an analytic Jacobian (m x n, row i = grad F_i).
struct VectorFunction {
  int dim_in = 0;
  int dim_out = 0;
  std::function<Vec(const Vec&)> value_at;
  std::function<Mat(const Vec&)> jacobian_at;

  Vec operator()(const Vec& x) const { return value_at(x); }
  Mat jacobian(const Vec& x) const { return jacobian_at(x); }
};

/// Scalar field with gradient, used by the finite-difference checker.
struct ScalarField {
  std::function<double(const Vec&)> value_at;
  std::function<Vec(const Vec&)> gradient_at;
};

/// Component i of a vector function as a scalar field.
ScalarField component(const VectorFunction& fn, int i);

/// A realized model F~_Delta built around `center` for trust radius `radius`.
///
/// Every model built in this library is an affine or quadratic polynomial or
/// a closed-form smooth expression, so it is C^1 on the whole space; the
/// accuracy claims only hold on the closed ball B_radius(center).
struct SmoothModel {
  Vec center;
  double radius = 0.0;
  VectorFunction map;

  int dim_in() const { return map.dim_in; }
  int dim_out() const { return map.dim_out; }
  Vec value(const Vec& x) const { return map.value_at(x); }
  Mat jacobian(const Vec& x) const { return map.jacobian_at(x); }
  double component_value_at(int i, const Vec& x) const { return value(x)(i); }
  Vec component_gradient_at(int i, const Vec& x) const {
    return jacobian(x).row(i).transpose();
  }
  bool contains(const Vec& x, double slack = 1e-12) const {
    return (x - center).norm() <= radius * (1.0 + slack) + slack;
  }
};

/// Family {F~_Delta : Delta in (0, delta_bar)} of models of `source` at `center`.
struct ModelFamily {
  std::string name;
  VectorFunction source;
  Vec center;
  double delta_bar = 1.0;
  std::function<SmoothModel(double)> build;
  std::optional<double> claimed_kappa_F;
  std::optional<double> claimed_kappa_G;
  bool interpolates_center = false;
};

/// Finitely generated convex set conv(vertices) + cone(rays).
///
/// An empty vertex list denotes the empty set. Rays are stored with unit length.
class ConvexSet {
public:
  explicit ConvexSet(int ambient_dim);
  ConvexSet(int ambient_dim, std::vector<Vec> vertices, std::vector<Vec> rays = {});

  static ConvexSet empty(int ambient_dim) { return ConvexSet(ambient_dim); }
  static ConvexSet singleton(const Vec& point);

  int ambient_dim() const { return ambient_dim_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const std::vector<Vec>& rays() const { return rays_; }
  bool is_empty() const { return vertices_.empty(); }
  bool is_bounded() const { return rays_.empty(); }

  /// Drops vertices (and rays) within `tol` of an earlier one.
  ConvexSet deduplicated(double tol = kDedupTol) const;

private:
  int ambient_dim_;
  std::vector<Vec> vertices_;
  std::vector<Vec> rays_;
};

enum class ReportStatus { ok, bound_failure, hypothesis_violation };

std::string to_string(ReportStatus status);

/// Outcome of a bound-verification run over a decreasing Delta grid.
struct BoundReport {
  std::string label;
  std::vector<double> deltas;
  std::vector<double> errors;  // +inf allowed
  std::vector<double> bounds;  // per-row bound; +inf when no claim is made
  std::vector<bool> row_satisfied;
  std::optional<double> fitted_order;
  std::optional<double> expected_order;
  double constant_estimate = 0.0;
  bool bound_satisfied = false;
  ReportStatus status = ReportStatus::ok;
  std::string note;
  // Theorem-specific extras; empty when unused.
  std::vector<double> pair_gaps;
  std::vector<std::pair<std::string, double>> details;
};

/// Draws `count` points from the closed ball B_radius(center).
///
/// The center always comes first. When count >= 2n+1 the axis points
/// center +- radius*e_i follow in the order +e_1, -e_1, +e_2, ...; the
/// remainder is uniform on the ball. The random part is center + radius*u_k
/// with u_k depending only on (n, seed), so grids over radius share shape.
std::vector<Vec> sample_ball(const Vec& center, double radius, int count, std::uint64_t seed);

/// `count` points uniform on the ball, no deterministic points.
std::vector<Vec> sample_uniform_ball(const Vec& center, double radius, int count,
                                     std::uint64_t seed);

/// Max-norm discrepancy between central differences of step h and the
/// claimed gradient at x. Throws std::domain_error on a non-finite stencil value.
double fd_gradient_check(const ScalarField& fn, const Vec& x, double h);

}  // namespace flm
