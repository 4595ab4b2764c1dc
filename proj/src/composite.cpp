#include "flm/composite.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace flm {

CompositeFunction::CompositeFunction(ConvexOuter outer, VectorFunction inner)
    : outer_(std::move(outer)), inner_(std::move(inner)) {
  if (outer_.ambient_dim() != inner_.dim_out)
    throw std::invalid_argument("CompositeFunction: outer dimension must equal inner output dimension");
}

CompositeFunction::CompositeFunction(ConvexOuter outer, const SmoothModel& model)
    : CompositeFunction(std::move(outer), model.map) {
  center_ = model.center;
  radius_ = model.radius;
}

bool CompositeFunction::within_trust_region(const Vec& x) const {
  if (!radius_) return true;
  return (x - center_).norm() <= *radius_ * (1.0 + 1e-12) + 1e-15;
}

double comp_value(const CompositeFunction& c, const Vec& x) {
  if (!c.within_trust_region(x))
    std::clog << "warning: model composite evaluated outside its trust region\n";
  return outer_value(c.outer(), c.inner()(x));
}

std::string to_string(ChainRuleStatus status) {
  switch (status) {
    case ChainRuleStatus::interior: return "interior";
    case ChainRuleStatus::boundary: return "boundary";
    case ChainRuleStatus::outside_domain: return "outside_domain";
  }
  return "unknown";
}

SubdiffResult comp_subdiff(const CompositeFunction& c, const Vec& x, double act_tol) {
  const Vec z = c.inner()(x);
  const int n = c.inner().dim_in;
  if (!in_dom(c.outer(), z)) return {ConvexSet::empty(n), ChainRuleStatus::outside_domain};
  const ConvexSet w = outer_subdiff(c.outer(), z, act_tol);
  if (w.is_empty()) return {ConvexSet::empty(n), ChainRuleStatus::outside_domain};

  const Mat jt = c.inner().jacobian(x).transpose();
  std::vector<Vec> vertices;
  vertices.reserve(w.vertices().size());
  for (const auto& v : w.vertices()) vertices.push_back(jt * v);
  std::vector<Vec> rays;
  for (const auto& r : w.rays()) {
    Vec mapped = jt * r;
    if (mapped.norm() > kDedupTol) rays.push_back(std::move(mapped));
  }
  const auto status = interior_dom(c.outer(), z) ? ChainRuleStatus::interior : ChainRuleStatus::boundary;
  return {ConvexSet(n, std::move(vertices), std::move(rays)).deduplicated(kDedupTol), status};
}

namespace {

// Min ||sum_k lambda_k a_k + sum_j mu_j r_j|| over the simplex x orthant,
// solved with Wolfe's corral iterations extended to free-scale ray columns.
struct Generator {
  Vec col;
  bool is_ray;
};

struct AffineSolution {
  Vec coef;
  bool ok;
};

AffineSolution affine_min_norm(const std::vector<Generator>& gens, const std::vector<int>& support) {
  const auto s = static_cast<Eigen::Index>(support.size());
  Mat kkt = Mat::Zero(s + 1, s + 1);
  Vec rhs = Vec::Zero(s + 1);
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j)
      kkt(i, j) = gens[support[i]].col.dot(gens[support[j]].col);
    if (!gens[support[i]].is_ray) {
      kkt(i, s) = 1.0;
      kkt(s, i) = 1.0;
    }
  }
  rhs(s) = 1.0;
  Eigen::FullPivLU<Mat> lu(kkt);
  if (!lu.isInvertible()) return {Vec(), false};
  Vec sol = lu.solve(rhs);
  return {sol.head(s), true};
}

Vec combine(const std::vector<Generator>& gens, const std::vector<int>& support, const Vec& coef,
            Eigen::Index dim) {
  Vec x = Vec::Zero(dim);
  for (std::size_t i = 0; i < support.size(); ++i)
    x += coef(static_cast<Eigen::Index>(i)) * gens[support[i]].col;
  return x;
}

constexpr int kMaxIterations = 100000;

}  // namespace

MinNormResult min_norm_point(const Vec& v, const ConvexSet& s) {
  if (s.is_empty()) throw std::invalid_argument("min_norm_point: empty set");
  if (v.size() != s.ambient_dim()) throw std::invalid_argument("min_norm_point: dimension mismatch");
  const auto dim = v.size();

  std::vector<Generator> gens;
  double scale = 0.0;
  for (const auto& p : s.vertices()) {
    gens.push_back({p - v, false});
    scale = std::max(scale, (p - v).squaredNorm());
  }
  for (const auto& r : s.rays()) gens.push_back({r, true});
  const double vertex_tol = 1e-13 * std::max(scale, 1e-300);
  const double ray_tol = 1e-13 * std::sqrt(std::max(scale, 1e-300));

  int start = 0;
  for (int k = 0; k < static_cast<int>(s.vertices().size()); ++k) {
    if (gens[k].col.squaredNorm() < gens[start].col.squaredNorm()) start = k;
  }
  std::vector<int> support{start};
  Vec coef = Vec::Ones(1);
  Vec x = gens[start].col;

  auto violation = [&](int k) {
    const double xa = x.dot(gens[k].col);
    return gens[k].is_ray ? -xa : x.squaredNorm() - xa;
  };

  int iterations = 0;
  bool stalled = false;
  while (!stalled && iterations < kMaxIterations) {
    ++iterations;
    int entering = -1;
    double worst = 0.0;
    for (int k = 0; k < static_cast<int>(gens.size()); ++k) {
      const double viol = violation(k);
      const double tol = gens[k].is_ray ? ray_tol : vertex_tol;
      if (viol > tol && viol > worst) {
        worst = viol;
        entering = k;
      }
    }
    if (entering < 0) break;
    if (std::find(support.begin(), support.end(), entering) != support.end()) break;

    support.push_back(entering);
    coef.conservativeResize(coef.size() + 1);
    coef(coef.size() - 1) = 0.0;

    // Minor cycle: move toward the affine minimizer, dropping generators whose
    // weight reaches zero, until the affine minimizer is strictly feasible.
    while (iterations < kMaxIterations) {
      ++iterations;
      const AffineSolution aff = affine_min_norm(gens, support);
      if (!aff.ok) {
        // Numerically dependent support: drop the newest generator and stop.
        support.pop_back();
        coef.conservativeResize(coef.size() - 1);
        x = combine(gens, support, coef, dim);
        stalled = true;
        break;
      }
      if ((aff.coef.array() > 0.0).all()) {
        coef = aff.coef;
        x = combine(gens, support, coef, dim);
        break;
      }
      double theta = 1.0;
      for (Eigen::Index i = 0; i < aff.coef.size(); ++i) {
        if (aff.coef(i) <= 0.0) {
          const double denom = coef(i) - aff.coef(i);
          if (denom > 0.0) theta = std::min(theta, coef(i) / denom);
        }
      }
      coef = coef + theta * (aff.coef - coef);
      std::vector<int> kept;
      std::vector<double> kept_coef;
      for (Eigen::Index i = 0; i < coef.size(); ++i) {
        if (coef(i) > 1e-15) {
          kept.push_back(support[static_cast<std::size_t>(i)]);
          kept_coef.push_back(coef(i));
        }
      }
      if (std::find(kept.begin(), kept.end(), entering) == kept.end() && theta == 0.0) {
        // The entering generator cannot carry weight: rounding-level stall.
        stalled = true;
      }
      support = std::move(kept);
      coef = Eigen::Map<Vec>(kept_coef.data(), static_cast<Eigen::Index>(kept_coef.size()));
      x = combine(gens, support, coef, dim);
      if (stalled) break;
    }
  }

  MinNormResult result;
  result.nearest = v + x;
  result.distance = x.norm();
  result.iterations = iterations;
  double gap = 0.0;
  for (int k = 0; k < static_cast<int>(gens.size()); ++k) gap = std::max(gap, violation(k));
  result.gap = gap;
  return result;
}

double dist_point_set(const Vec& v, const ConvexSet& s) { return min_norm_point(v, s).distance; }

double hausdorff(const ConvexSet& a, const ConvexSet& b) {
  if (a.is_empty() || b.is_empty()) throw std::invalid_argument("hausdorff: empty set");
  if (!a.is_bounded() || !b.is_bounded())
    throw std::invalid_argument("hausdorff: unbounded set; use dist_point_set on generators instead");
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("hausdorff: dimension mismatch");
  double h = 0.0;
  for (const auto& p : a.vertices()) h = std::max(h, dist_point_set(p, b));
  for (const auto& p : b.vertices()) h = std::max(h, dist_point_set(p, a));
  return h;
}

bool interpolates_at(const VectorFunction& F, const SmoothModel& model, const Vec& center, double tol) {
  const Vec fc = F(center);
  const double scale = std::max(1.0, fc.lpNorm<Eigen::Infinity>());
  return (model.value(center) - fc).lpNorm<Eigen::Infinity>() <= tol * scale;
}

std::vector<SubgradientPair> pair_subgradients(const ConvexOuter& g, const VectorFunction& F,
                                               const SmoothModel& model, const Vec& center,
                                               double act_tol) {
  const Vec fc = F(center);
  if (!interior_dom(g, fc)) throw HypothesisViolation("F(center) is not interior to dom g");
  if (!interpolates_at(F, model, center))
    throw HypothesisViolation("model does not interpolate F at the center");
  const ConvexSet w = outer_subdiff(g, fc, act_tol);
  const Mat jf = F.jacobian(center).transpose();
  const Mat jm = model.jacobian(center).transpose();
  std::vector<SubgradientPair> pairs;
  for (const auto& gen : w.vertices()) {
    SubgradientPair p{gen, jf * gen, jm * gen, 0.0};
    p.gap = (p.exact - p.model).norm();
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace flm
