#include "flm/verify.hpp"

#include <cmath>
#include <numeric>

namespace flm {

OrderFit fit_order(const std::vector<double>& deltas, const std::vector<double>& errors) {
  if (deltas.size() != errors.size()) throw std::invalid_argument("fit_order: size mismatch");
  if (deltas.size() < 3) throw std::invalid_argument("fit_order: need at least 3 grid points");
  const auto k = static_cast<double>(deltas.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || !std::isfinite(deltas[i]))
      throw std::invalid_argument("fit_order: deltas must be finite and positive");
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
      throw std::invalid_argument("fit_order: errors must be finite and positive");
    sx += std::log(deltas[i]);
    sy += std::log(errors[i]);
  }
  const double mx = sx / k;
  const double my = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double dx = std::log(deltas[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_order: deltas must not all be equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

std::optional<double> try_fit_order(const std::vector<double>& deltas,
                                    const std::vector<double>& errors) {
  if (deltas.size() < 3 || deltas.size() != errors.size()) return std::nullopt;
  for (double e : errors) {
    if (!(e > 0.0) || !std::isfinite(e)) return std::nullopt;
  }
  return fit_order(deltas, errors).slope;
}

double sup_value_error(const ConvexOuter& g, const VectorFunction& F, const ModelFamily& family,
                       double delta, int n_samples, std::uint64_t seed) {
  if (!(delta > 0.0) || !(delta < family.delta_bar))
    throw std::invalid_argument("sup_value_error: delta must lie in (0, delta_bar)");
  const SmoothModel model = family.build(delta);
  double worst = 0.0;
  for (const auto& y : sample_ball(family.center, delta, n_samples, seed)) {
    const double exact = outer_value(g, F(y));
    const double approx = outer_value(g, model.value(y));
    const bool ie = std::isinf(exact);
    const bool ia = std::isinf(approx);
    if (ie && ia) continue;
    if (ie || ia) return kInf;
    worst = std::max(worst, std::abs(exact - approx));
  }
  return worst;
}

namespace {

void validate_grid(const std::vector<double>& deltas, double delta_bar) {
  if (deltas.empty()) throw std::invalid_argument("empty delta grid");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] > 0.0) || !(deltas[k] < delta_bar))
      throw std::invalid_argument("every delta must lie in (0, delta_bar)");
    if (k > 0 && !(deltas[k] < deltas[k - 1]))
      throw std::invalid_argument("delta grid must be strictly decreasing");
  }
}

// Applies the per-row bounds and the fitted-order floor.
void finalize(BoundReport& r, double order) {
  r.expected_order = order;
  r.row_satisfied.clear();
  bool all = true;
  for (std::size_t k = 0; k < r.deltas.size(); ++k) {
    const bool ok = r.errors[k] <= r.bounds[k] * (1.0 + kBoundRelTol);
    r.row_satisfied.push_back(ok);
    all = all && ok;
  }
  r.fitted_order = try_fit_order(r.deltas, r.errors);
  const bool order_ok = !r.fitted_order || *r.fitted_order >= order - kOrderSlack;
  r.bound_satisfied = all && order_ok;
  r.status = r.bound_satisfied ? ReportStatus::ok : ReportStatus::bound_failure;
  if (!order_ok) r.note = "fitted order below the expected exponent";
}

void record_errors(BoundReport& r, const std::vector<double>& deltas,
                   const std::function<double(double)>& error_at, double order) {
  r.constant_estimate = 0.0;
  for (double d : deltas) {
    const double e = error_at(d);
    r.deltas.push_back(d);
    r.errors.push_back(e);
    r.constant_estimate = std::max(r.constant_estimate, e / std::pow(d, order));
  }
}

BoundReport hypothesis_failure(BoundReport r, std::string why) {
  r.bounds.assign(r.deltas.size(), kInf);
  r.row_satisfied.assign(r.deltas.size(), false);
  r.fitted_order = try_fit_order(r.deltas, r.errors);
  r.bound_satisfied = false;
  r.status = ReportStatus::hypothesis_violation;
  r.note = std::move(why);
  return r;
}

}  // namespace

BoundReport check_value_bound(const ConvexOuter& g, const VectorFunction& F,
                              const ModelFamily& family, const std::vector<double>& deltas,
                              double order, const HarnessOptions& options) {
  if (!(order > 0.0)) throw std::invalid_argument("value bound: exponent must be positive");
  validate_grid(deltas, family.delta_bar);
  BoundReport report;
  report.label = family.name + ":composite-value";
  report.expected_order = order;
  auto error_at = [&](double d) {
    return sup_value_error(g, F, family, d, options.n_samples, options.seed);
  };

  const Vec fc = F(family.center);
  if (!interior_dom(g, fc)) {
    record_errors(report, deltas, error_at, order);
    return hypothesis_failure(std::move(report), "F(center) is not interior to dom g");
  }

  // Shrink until the sampled image of the ball stays interior to dom g.
  double delta_f = family.delta_bar;
  std::vector<Vec> image_samples;
  bool found = false;
  for (int halving = 0; halving <= 60; ++halving) {
    image_samples = sample_ball(family.center, delta_f, options.n_samples, options.seed);
    found = std::all_of(image_samples.begin(), image_samples.end(),
                        [&](const Vec& y) { return interior_dom(g, F(y)); });
    if (found) break;
    delta_f *= 0.5;
  }
  if (!found) {
    record_errors(report, deltas, error_at, order);
    return hypothesis_failure(std::move(report), "no interior neighbourhood found");
  }

  double lip = 0.0;
  for (const auto& y : image_samples) lip = std::max(lip, *lip_modulus(g, F(y), options.act_tol));

  const auto cert = certify_with_orders(family, deltas, options.n_samples, options.seed, order,
                                        std::max(order - 1.0, 0.5));
  const double kappa_F = cert.first.constant_estimate;
  const double m = F.dim_out;

  record_errors(report, deltas, error_at, order);
  for (double d : deltas) report.bounds.push_back(d < delta_f ? lip * m * kappa_F * std::pow(d, order) : kInf);
  finalize(report, order);
  report.details = {{"lipschitz_estimate", lip}, {"kappa_F", kappa_F}, {"m", m}, {"delta_bar_f", delta_f}};
  return report;
}

BoundReport check_thm31(const ConvexOuter& g, const VectorFunction& F, const ModelFamily& family,
                        const std::vector<double>& deltas, int n_samples, std::uint64_t seed) {
  return check_value_bound(g, F, family, deltas, 2.0, HarnessOptions{n_samples, seed});
}

BoundReport check_prop32(const VectorFunction& F, const ModelFamily& family,
                         const std::vector<double>& deltas, int n_samples, std::uint64_t seed) {
  validate_grid(deltas, family.delta_bar);
  const ConvexOuter g = ConvexOuter::max(F.dim_out);
  const double kappa_F = certify_fully_linear(family, deltas, n_samples, seed).first.constant_estimate;

  BoundReport report;
  report.label = family.name + ":max-value";
  record_errors(report, deltas,
                [&](double d) { return sup_value_error(g, F, family, d, n_samples, seed); }, 2.0);
  for (double d : deltas) report.bounds.push_back(kappa_F * d * d);
  finalize(report, 2.0);
  // Only the per-row inequality is required here; the slope is informational
  // (coarse grids pick up the kinks of max before the rate settles).
  const bool rows = std::all_of(report.row_satisfied.begin(), report.row_satisfied.end(), [](bool b) { return b; });
  if (rows && !report.bound_satisfied) {
    report.bound_satisfied = true;
    report.status = ReportStatus::ok;
    report.note = "fitted order below 2 on this grid; rows satisfied";
  }
  report.details = {{"kappa_F", kappa_F}};
  return report;
}

BoundReport check_subgradient_bound(const ConvexOuter& g, const VectorFunction& F,
                                    const ModelFamily& family, const std::vector<double>& deltas,
                                    double order, const HarnessOptions& options) {
  if (!(order > 0.0)) throw std::invalid_argument("subgradient bound: exponent must be positive");
  validate_grid(deltas, family.delta_bar);
  BoundReport report;
  report.label = family.name + ":subdifferential";
  report.expected_order = order;
  for (double d : deltas) {
    report.deltas.push_back(d);
    report.errors.push_back(kInf);
  }

  const Vec& center = family.center;
  const Vec fc = F(center);
  if (!family.interpolates_center)
    return hypothesis_failure(std::move(report), "family does not interpolate F at the center");
  if (!interior_dom(g, fc))
    return hypothesis_failure(std::move(report), "F(center) is not interior to dom g");
  const ConvexSet w = outer_subdiff(g, fc, options.act_tol);
  if (w.is_empty() || !w.is_bounded())
    return hypothesis_failure(std::move(report), "dg(F(center)) is empty or unbounded");

  const double M = *lip_modulus(g, fc, options.act_tol);
  const double kappa_G =
      certify_with_orders(family, deltas, options.n_samples, options.seed, order + 1.0, order)
          .second.constant_estimate;
  const double sqrt_m = std::sqrt(static_cast<double>(F.dim_out));
  const ConvexSet exact = comp_subdiff(CompositeFunction(g, F), center, options.act_tol).set;

  report.errors.clear();
  report.deltas.clear();
  for (double d : deltas) {
    const SmoothModel model = family.build(d);
    if (!interpolates_at(F, model, center))
      return hypothesis_failure(std::move(report), "model does not interpolate F at the center");
    const ConvexSet approx = comp_subdiff(CompositeFunction(g, model), center, options.act_tol).set;
    const double h = hausdorff(exact, approx);
    double gap = 0.0;
    for (const auto& p : pair_subgradients(g, F, model, center, options.act_tol)) gap = std::max(gap, p.gap);
    report.deltas.push_back(d);
    report.errors.push_back(h);
    report.bounds.push_back(M * sqrt_m * kappa_G * std::pow(d, order));
    report.pair_gaps.push_back(gap);
    report.constant_estimate = std::max(report.constant_estimate, h / std::pow(d, order));
  }
  finalize(report, order);
  report.details = {{"M", M}, {"kappa_G", kappa_G}, {"m", static_cast<double>(F.dim_out)}};
  return report;
}

BoundReport check_thm41(const ConvexOuter& g, const VectorFunction& F, const ModelFamily& family,
                        const std::vector<double>& deltas, const HarnessOptions& options) {
  return check_subgradient_bound(g, F, family, deltas, 1.0, options);
}

std::pair<BoundReport, BoundReport> check_generalized(const ConvexOuter& g, const VectorFunction& F,
                                                      const ModelFamily& family,
                                                      const std::vector<double>& deltas,
                                                      double gamma, double upsilon,
                                                      const HarnessOptions& options) {
  if (!(gamma > 0.0) || !(upsilon > 0.0))
    throw std::invalid_argument("check_generalized: exponents must be positive");
  return {check_value_bound(g, F, family, deltas, gamma, options),
          check_subgradient_bound(g, F, family, deltas, upsilon, options)};
}

std::vector<double> counterexample_deltas() { return {0.5, 0.1, 0.01, 0.001}; }

CounterexampleReport run_counterexample(std::string_view name) {
  const ModelFamily family = adversarial_family(name);  // throws on unknown names
  const VectorFunction& F = family.source;
  const Vec origin = Vec::Zero(2);
  const ConvexOuter indicator = ConvexOuter::halfspace_indicator(2, 0, 0.0);
  const ConvexOuter l1 = ConvexOuter::ell1(2);

  CounterexampleReport r;
  r.name = std::string(name);
  r.deltas = counterexample_deltas();
  r.tolerance = kSetDistanceTol;

  if (name == "ex33") {
    r.quantity = "sup |f(y) - f~(y)| over B_Delta(0)";
    r.failure_mode = "F(0) lies on the boundary of dom g, so the value error is infinite";
    const BoundReport rep = check_thm31(indicator, F, family, r.deltas, 5, 0);
    r.measured = rep.errors;
    r.expected.assign(r.deltas.size(), kInf);
    for (double e : r.measured) r.row_passed.push_back(std::isinf(e) && e > 0);
    r.hypothesis_violation = rep.status == ReportStatus::hypothesis_violation;
  } else if (name == "ex42") {
    r.quantity = "dist((-1/Delta, 1), df(0))";
    r.failure_mode = "unbounded dg(F(0)) lets model subgradients stay a unit distance away";
    const ConvexSet exact = comp_subdiff(CompositeFunction(indicator, F), origin).set;
    for (double d : r.deltas) {
      const Vec v{{-1.0 / d, 1.0}};
      const ConvexSet approx = comp_subdiff(CompositeFunction(indicator, family.build(d)), origin).set;
      const bool member = dist_point_set(v, approx) <= kSetDistanceTol * std::max(1.0, v.norm());
      const double dist = dist_point_set(v, exact);
      r.measured.push_back(dist);
      r.expected.push_back(1.0);
      r.row_passed.push_back(member && std::abs(dist - 1.0) <= r.tolerance);
    }
  } else if (name == "ex43") {
    r.quantity = "dist((-1, -1), df~_Delta(0))";
    r.failure_mode = "F~(0) != F(0) moves the model off the kink of g";
    const ConvexSet exact = comp_subdiff(CompositeFunction(l1, F), origin).set;
    const Vec v{{-1.0, -1.0}};
    const bool member = dist_point_set(v, exact) <= kSetDistanceTol;
    for (double d : r.deltas) {
      const ConvexSet approx = comp_subdiff(CompositeFunction(l1, family.build(d)), origin).set;
      const double dist = dist_point_set(v, approx);
      r.measured.push_back(dist);
      r.expected.push_back(std::sqrt(8.0));
      r.row_passed.push_back(member && std::abs(dist - std::sqrt(8.0)) <= r.tolerance);
    }
  } else {
    r.quantity = "dist((1, -1), df~_Delta(eps, 0)), eps = 0.1";
    r.failure_mode = "away from the center the model subdifferential misses df";
    const Vec x{{0.1, 0.0}};
    const Vec v{{1.0, -1.0}};
    const ConvexSet exact = comp_subdiff(CompositeFunction(l1, F), x).set;
    const bool member = dist_point_set(v, exact) <= kSetDistanceTol;
    for (double d : r.deltas) {
      const ConvexSet approx = comp_subdiff(CompositeFunction(l1, family.build(d)), x).set;
      const double dist = dist_point_set(v, approx);
      const double d2 = d * d;
      const double expected = std::sqrt(d2 * d2 + (2.0 + d2) * (2.0 + d2));
      r.measured.push_back(dist);
      r.expected.push_back(expected);
      r.row_passed.push_back(member && std::abs(dist - expected) <= r.tolerance &&
                             dist >= std::sqrt(2.0));
    }
  }
  r.reproduced = std::all_of(r.row_passed.begin(), r.row_passed.end(), [](bool b) { return b; });
  return r;
}

}  // namespace flm
