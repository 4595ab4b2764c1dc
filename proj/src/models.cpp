#include "flm/models.hpp"

#include "flm/verify.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace flm {

namespace {

constexpr double kRankTol = 1e-12;

Mat linear_design(const std::vector<Vec>& points, const Vec& center, double delta) {
  const auto n = center.size();
  Mat design(static_cast<Eigen::Index>(points.size()), n + 1);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    design.row(r).head(n) = ((points[k] - center) / delta).transpose();
    design(r, n) = 1.0;
  }
  return design;
}

// Scaled quadratic basis: 1, s_i, s_i^2 / 2, s_i s_j (i < j).
Eigen::Index quadratic_basis_size(Eigen::Index n) { return (n + 1) * (n + 2) / 2; }

Vec quadratic_basis(const Vec& s) {
  const auto n = s.size();
  Vec phi(quadratic_basis_size(n));
  Eigen::Index k = 0;
  phi(k++) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) phi(k++) = s(i);
  for (Eigen::Index i = 0; i < n; ++i) phi(k++) = 0.5 * s(i) * s(i);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) phi(k++) = s(i) * s(j);
  return phi;
}

void check_samples(const SampleSet& samples, const Vec& center, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("model fit: delta must be positive");
  if (samples.values.rows() != static_cast<Eigen::Index>(samples.points.size()))
    throw std::invalid_argument("model fit: value rows do not match point count");
  for (const auto& p : samples.points) {
    if (p.size() != center.size()) throw std::invalid_argument("model fit: point dimension mismatch");
  }
}

}  // namespace

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::linear_interpolation: return "linear";
    case SchemeKind::quadratic_interpolation: return "quadratic";
    case SchemeKind::least_squares_regression: return "regression";
  }
  return "unknown";
}

SchemeKind scheme_kind_from_string(std::string_view name) {
  if (name == "linear") return SchemeKind::linear_interpolation;
  if (name == "quadratic") return SchemeKind::quadratic_interpolation;
  if (name == "regression") return SchemeKind::least_squares_regression;
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

SmoothModel PolynomialModel::to_smooth() const {
  const auto n = static_cast<int>(center.size());
  const auto m = static_cast<int>(constant.size());
  auto self = std::make_shared<const PolynomialModel>(*this);
  VectorFunction map{
      n, m,
      [self](const Vec& x) -> Vec {
        const Vec d = x - self->center;
        Vec out = self->constant + self->gradient * d;
        for (std::size_t i = 0; i < self->hessians.size(); ++i)
          out(static_cast<Eigen::Index>(i)) += 0.5 * d.dot(self->hessians[i] * d);
        return out;
      },
      [self](const Vec& x) -> Mat {
        const Vec d = x - self->center;
        Mat jac = self->gradient;
        for (std::size_t i = 0; i < self->hessians.size(); ++i)
          jac.row(static_cast<Eigen::Index>(i)) += (self->hessians[i] * d).transpose();
        return jac;
      },
  };
  return SmoothModel{center, radius, std::move(map)};
}

std::vector<Vec> linear_stencil(const Vec& center, double delta) {
  std::vector<Vec> pts{center};
  for (Eigen::Index i = 0; i < center.size(); ++i) {
    Vec p = center;
    p(i) += delta;
    pts.push_back(std::move(p));
  }
  return pts;
}

std::vector<Vec> quadratic_stencil(const Vec& center, double delta) {
  const auto n = center.size();
  const double diag = delta / std::sqrt(2.0);
  std::vector<Vec> pts{center};
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec plus = center;
    Vec minus = center;
    plus(i) += delta;
    minus(i) -= delta;
    pts.push_back(std::move(plus));
    pts.push_back(std::move(minus));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Vec p = center;
      p(i) += diag;
      p(j) += diag;
      pts.push_back(std::move(p));
    }
  }
  return pts;
}

SampleSet evaluate_samples(const VectorFunction& F, std::vector<Vec> points) {
  Mat values(static_cast<Eigen::Index>(points.size()), F.dim_out);
  for (std::size_t k = 0; k < points.size(); ++k)
    values.row(static_cast<Eigen::Index>(k)) = F(points[k]).transpose();
  return SampleSet{std::move(points), std::move(values)};
}

PolynomialModel fit_linear_interpolation(const SampleSet& samples, const Vec& center, double delta) {
  check_samples(samples, center, delta);
  const auto n = center.size();
  if (static_cast<Eigen::Index>(samples.points.size()) != n + 1)
    throw std::invalid_argument("linear interpolation needs exactly n+1 points");
  const Mat design = linear_design(samples.points, center, delta);
  Eigen::FullPivLU<Mat> lu(design);
  lu.setThreshold(kRankTol);
  if (!lu.isInvertible()) throw SingularStencil("linear interpolation stencil is degenerate");
  const Mat coef = lu.solve(samples.values);  // (n+1) x m

  PolynomialModel model;
  model.center = center;
  model.radius = delta;
  model.constant = coef.row(n).transpose();
  model.gradient = coef.topRows(n).transpose() / delta;
  return model;
}

PolynomialModel fit_quadratic_interpolation(const SampleSet& samples, const Vec& center,
                                            double delta) {
  check_samples(samples, center, delta);
  const auto n = center.size();
  const auto q = quadratic_basis_size(n);
  if (static_cast<Eigen::Index>(samples.points.size()) != q)
    throw std::invalid_argument("quadratic interpolation needs exactly (n+1)(n+2)/2 points");
  Mat design(q, q);
  for (Eigen::Index k = 0; k < q; ++k)
    design.row(k) = quadratic_basis((samples.points[static_cast<std::size_t>(k)] - center) / delta).transpose();
  Eigen::FullPivLU<Mat> lu(design);
  lu.setThreshold(kRankTol);
  if (!lu.isInvertible()) throw SingularStencil("quadratic interpolation stencil is degenerate");
  const Mat coef = lu.solve(samples.values);  // q x m

  const auto m = samples.values.cols();
  PolynomialModel model;
  model.center = center;
  model.radius = delta;
  model.constant = coef.row(0).transpose();
  model.gradient = coef.middleRows(1, n).transpose() / delta;
  const double inv_d2 = 1.0 / (delta * delta);
  for (Eigen::Index c = 0; c < m; ++c) {
    Mat h = Mat::Zero(n, n);
    Eigen::Index k = 1 + n;
    for (Eigen::Index i = 0; i < n; ++i) h(i, i) = coef(k++, c) * inv_d2;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        h(i, j) = coef(k++, c) * inv_d2;
        h(j, i) = h(i, j);
      }
    }
    model.hessians.push_back(std::move(h));
  }
  return model;
}

PolynomialModel fit_affine_regression(const SampleSet& samples, const Vec& center, double delta) {
  check_samples(samples, center, delta);
  const auto n = center.size();
  if (static_cast<Eigen::Index>(samples.points.size()) < n + 1)
    throw std::invalid_argument("regression needs at least n+1 points");
  const Mat design = linear_design(samples.points, center, delta);
  Eigen::ColPivHouseholderQR<Mat> qr(design);
  qr.setThreshold(kRankTol);
  if (qr.rank() < n + 1) throw SingularStencil("regression sample set is rank deficient");
  const Mat coef = qr.solve(samples.values);

  PolynomialModel model;
  model.center = center;
  model.radius = delta;
  model.constant = coef.row(n).transpose();
  model.gradient = coef.topRows(n).transpose() / delta;
  return model;
}

SmoothModel build_model(const VectorFunction& F, const Vec& center, double delta,
                        const Scheme& scheme, std::uint64_t seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("build_model: delta must be positive");
  if (center.size() != F.dim_in) throw std::invalid_argument("build_model: center dimension mismatch");
  if (scheme.oversample != 0 && scheme.kind != SchemeKind::least_squares_regression)
    throw std::invalid_argument("build_model: oversample only applies to regression");
  switch (scheme.kind) {
    case SchemeKind::linear_interpolation:
      return fit_linear_interpolation(evaluate_samples(F, linear_stencil(center, delta)), center, delta)
          .to_smooth();
    case SchemeKind::quadratic_interpolation:
      return fit_quadratic_interpolation(evaluate_samples(F, quadratic_stencil(center, delta)), center,
                                         delta)
          .to_smooth();
    case SchemeKind::least_squares_regression: {
      const int count = 2 * (F.dim_in + 1) + scheme.oversample;
      return fit_affine_regression(
                 evaluate_samples(F, sample_uniform_ball(center, delta, count, seed)), center, delta)
          .to_smooth();
    }
  }
  throw std::logic_error("build_model: unhandled scheme");
}

ModelFamily interpolation_family(const VectorFunction& F, const Vec& center, double delta_bar,
                                 const Scheme& scheme, std::uint64_t seed) {
  ModelFamily family;
  family.name = to_string(scheme.kind);
  family.source = F;
  family.center = center;
  family.delta_bar = delta_bar;
  family.build = [F, center, scheme, seed](double delta) {
    return build_model(F, center, delta, scheme, seed);
  };
  family.interpolates_center = scheme.kind != SchemeKind::least_squares_regression;
  return family;
}

ModelFamily exact_family(const VectorFunction& F, const Vec& center, double delta_bar) {
  ModelFamily family;
  family.name = "exact";
  family.source = F;
  family.center = center;
  family.delta_bar = delta_bar;
  family.build = [F, center](double delta) { return SmoothModel{center, delta, F}; };
  family.interpolates_center = true;
  return family;
}

double poisedness(const std::vector<Vec>& points, const Vec& center, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("poisedness: delta must be positive");
  const auto n = center.size();
  if (static_cast<Eigen::Index>(points.size()) < n + 1) return kInf;
  const Mat design = linear_design(points, center, delta);
  Eigen::JacobiSVD<Mat> svd(design);
  const Vec& sv = svd.singularValues();
  const double largest = sv(0);
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > kRankTol * largest)) return kInf;
  return largest / smallest;
}

VectorFunction identity_function(int n) {
  return VectorFunction{n, n, [](const Vec& x) -> Vec { return x; },
                        [n](const Vec&) -> Mat { return Mat::Identity(n, n); }};
}

ModelFamily adversarial_family(std::string_view name) {
  using Model2 = std::function<SmoothModel(double)>;
  const Vec origin = Vec::Zero(2);
  Model2 build;
  bool interpolates = false;

  auto make = [origin](double delta, std::function<Vec(const Vec&)> value,
                       std::function<Mat(const Vec&)> jacobian) {
    return SmoothModel{origin, delta, VectorFunction{2, 2, std::move(value), std::move(jacobian)}};
  };

  if (name == "ex33") {
    build = [make](double d) {
      return make(d, [d](const Vec& x) -> Vec { return Vec{{x(0) - d * d, x(1)}}; },
                  [](const Vec&) -> Mat { return Mat::Identity(2, 2); });
    };
  } else if (name == "ex42") {
    interpolates = true;
    build = [make](double d) {
      return make(d, [d](const Vec& x) -> Vec { return Vec{{x(0) - d * x(1), x(1)}}; },
                  [d](const Vec&) -> Mat { return Mat{{1.0, -d}, {0.0, 1.0}}; });
    };
  } else if (name == "ex43") {
    build = [make](double d) {
      return make(d, [d](const Vec& x) -> Vec { return Vec{{x(0) + d * d, x(1) + d * d}}; },
                  [](const Vec&) -> Mat { return Mat::Identity(2, 2); });
    };
  } else if (name == "ex44") {
    interpolates = true;
    build = [make](double d) {
      const double d2 = d * d;
      return make(d, [d2](const Vec& x) -> Vec { return Vec{{x(0) + d2 * x(1), x(1) + d2 * x(0)}}; },
                  [d2](const Vec&) -> Mat { return Mat{{1.0, d2}, {d2, 1.0}}; });
    };
  } else {
    throw std::invalid_argument("unknown adversarial family: " + std::string(name));
  }

  ModelFamily family;
  family.name = std::string(name);
  family.source = identity_function(2);
  family.center = origin;
  family.delta_bar = 1.0;
  family.build = std::move(build);
  family.claimed_kappa_F = 1.0;
  family.claimed_kappa_G = 1.0;
  family.interpolates_center = interpolates;
  return family;
}

PointErrors component_errors(const VectorFunction& F, const SmoothModel& model,
                             const std::vector<Vec>& points) {
  PointErrors worst;
  for (const auto& y : points) {
    const Vec fv = F(y);
    const Vec mv = model.value(y);
    if (!mv.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite model value at y = [" << y.transpose() << "]";
      throw std::domain_error(msg.str());
    }
    const Mat fj = F.jacobian(y);
    const Mat mj = model.jacobian(y);
    worst.value = std::max(worst.value, (fv - mv).cwiseAbs().maxCoeff());
    worst.gradient = std::max(worst.gradient, (fj - mj).rowwise().norm().maxCoeff());
  }
  return worst;
}

std::pair<BoundReport, BoundReport> certify_with_orders(const ModelFamily& family,
                                                        const std::vector<double>& deltas,
                                                        int samples_per_ball, std::uint64_t seed,
                                                        double value_order, double gradient_order) {
  const auto n = static_cast<int>(family.center.size());
  if (samples_per_ball < 2 * n + 1)
    throw std::invalid_argument("certify: samples_per_ball must be at least 2n+1");

  BoundReport value;
  value.label = family.name + ":value";
  BoundReport grad;
  grad.label = family.name + ":gradient";
  value.expected_order = value_order;
  grad.expected_order = gradient_order;

  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double delta = deltas[k];
    if (!(delta > 0.0) || !(delta < family.delta_bar))
      throw std::invalid_argument("certify: every delta must lie in (0, delta_bar)");
    if (k > 0 && !(delta < deltas[k - 1]))
      throw std::invalid_argument("certify: deltas must be strictly decreasing");
    const SmoothModel model = family.build(delta);
    if (model.radius != delta || model.center != family.center)
      throw std::logic_error("certify: family built a model with the wrong center or radius");
    const PointErrors e =
        component_errors(family.source, model, sample_ball(family.center, delta, samples_per_ball, seed));
    value.deltas.push_back(delta);
    grad.deltas.push_back(delta);
    value.errors.push_back(e.value);
    grad.errors.push_back(e.gradient);
    value.constant_estimate = std::max(value.constant_estimate, e.value / std::pow(delta, value_order));
    grad.constant_estimate = std::max(grad.constant_estimate, e.gradient / std::pow(delta, gradient_order));
  }

  auto finish = [&deltas](BoundReport& r, const std::optional<double>& claimed, double order) {
    const double kappa = claimed.value_or(r.constant_estimate);
    r.bound_satisfied = true;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      const double bound = kappa * std::pow(deltas[k], order);
      const bool ok = r.errors[k] <= bound * (1.0 + kBoundRelTol);
      r.bounds.push_back(bound);
      r.row_satisfied.push_back(ok);
      r.bound_satisfied = r.bound_satisfied && ok;
    }
    r.fitted_order = try_fit_order(r.deltas, r.errors);
    r.status = r.bound_satisfied ? ReportStatus::ok : ReportStatus::bound_failure;
    r.note = claimed ? "bound uses the claimed constant" : "bound uses the estimated constant";
  };
  finish(value, family.claimed_kappa_F, value_order);
  finish(grad, family.claimed_kappa_G, gradient_order);
  return {std::move(value), std::move(grad)};
}

std::pair<BoundReport, BoundReport> certify_fully_linear(const ModelFamily& family,
                                                         const std::vector<double>& deltas,
                                                         int samples_per_ball, std::uint64_t seed) {
  return certify_with_orders(family, deltas, samples_per_ball, seed, 2.0, 1.0);
}

}  // namespace flm
