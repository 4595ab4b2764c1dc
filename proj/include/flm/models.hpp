#pragma once

// Construction and empirical certification of fully linear models of F.

#include "flm/core.hpp"

#include <string_view>
#include <utility>

namespace flm {

enum class SchemeKind { linear_interpolation, quadratic_interpolation, least_squares_regression };

struct Scheme {
  SchemeKind kind = SchemeKind::linear_interpolation;
  int oversample = 0;  // regression only

  static Scheme linear() { return {SchemeKind::linear_interpolation, 0}; }
  static Scheme quadratic() { return {SchemeKind::quadratic_interpolation, 0}; }
  static Scheme regression(int oversample = 0) {
    return {SchemeKind::least_squares_regression, oversample};
  }
};

std::string to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(std::string_view name);

/// Points and per-component values used to fit a model (values is count x m).
struct SampleSet {
  std::vector<Vec> points;
  Mat values;
};

/// Thrown when an interpolation system is singular.
class SingularStencil : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Polynomial model c + G d + 0.5 d^T H_i d per component, d = x - center.
struct PolynomialModel {
  Vec center;
  double radius = 0.0;
  Vec constant;              // m
  Mat gradient;              // m x n
  std::vector<Mat> hessians; // m matrices n x n, empty for affine models

  SmoothModel to_smooth() const;
};

/// Default stencils. Linear: {c, c + delta e_i}. Quadratic: {c, c +- delta e_i,
/// c + delta (e_i + e_j)/sqrt(2) for i < j}; every point lies in the closed ball.
std::vector<Vec> linear_stencil(const Vec& center, double delta);
std::vector<Vec> quadratic_stencil(const Vec& center, double delta);

SampleSet evaluate_samples(const VectorFunction& F, std::vector<Vec> points);

/// Affine interpolation through exactly n+1 points. Throws SingularStencil.
PolynomialModel fit_linear_interpolation(const SampleSet& samples, const Vec& center, double delta);
/// Full quadratic interpolation through exactly (n+1)(n+2)/2 points.
PolynomialModel fit_quadratic_interpolation(const SampleSet& samples, const Vec& center,
                                            double delta);
/// Least-squares affine fit through at least n+1 points.
PolynomialModel fit_affine_regression(const SampleSet& samples, const Vec& center, double delta);

SmoothModel build_model(const VectorFunction& F, const Vec& center, double delta,
                        const Scheme& scheme, std::uint64_t seed);

/// Family whose build(Delta) calls build_model with a fixed scheme and seed.
ModelFamily interpolation_family(const VectorFunction& F, const Vec& center, double delta_bar,
                                 const Scheme& scheme, std::uint64_t seed = 0);

/// Family whose every member is F itself.
ModelFamily exact_family(const VectorFunction& F, const Vec& center, double delta_bar);

/// 2-norm condition number of the rows [(y_i - center)/delta, 1]; +inf when
/// the matrix is rank deficient.
double poisedness(const std::vector<Vec>& points, const Vec& center, double delta);

/// Closed-form adversarial families over F(x) = (x1, x2) at the origin.
/// Names: ex33, ex42, ex43, ex44. Throws std::invalid_argument otherwise.
ModelFamily adversarial_family(std::string_view name);

/// Identity map on R^n.
VectorFunction identity_function(int n);

/// Sup-error estimates over sample_ball points for the value and gradient
/// bounds, with error scaled by Delta^value_order (resp. Delta^gradient_order).
std::pair<BoundReport, BoundReport> certify_fully_linear(const ModelFamily& family,
                                                         const std::vector<double>& deltas,
                                                         int samples_per_ball, std::uint64_t seed);

std::pair<BoundReport, BoundReport> certify_with_orders(const ModelFamily& family,
                                                        const std::vector<double>& deltas,
                                                        int samples_per_ball, std::uint64_t seed,
                                                        double value_order, double gradient_order);

/// Max over components and points of |F_i - F~_i| and ||grad F_i - grad F~_i||.
struct PointErrors {
  double value = 0.0;
  double gradient = 0.0;
};
PointErrors component_errors(const VectorFunction& F, const SmoothModel& model,
                             const std::vector<Vec>& points);

}  // namespace flm
