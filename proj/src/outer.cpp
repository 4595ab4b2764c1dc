#include "flm/outer.hpp"

#include <cmath>

namespace flm {

namespace {

void check_dim(const ConvexOuter& g, const Vec& z) {
  if (z.size() != g.ambient_dim()) throw std::invalid_argument("outer function: dimension mismatch");
}

Vec unit(int m, int i, double scale = 1.0) {
  Vec e = Vec::Zero(m);
  e(i) = scale;
  return e;
}

// Product of per-coordinate intervals [lo_i, hi_i] as a vertex list.
ConvexSet box_vertices(const Vec& lo, const Vec& hi) {
  const auto m = static_cast<int>(lo.size());
  std::vector<int> free;
  for (int i = 0; i < m; ++i) {
    if (lo(i) != hi(i)) free.push_back(i);
  }
  if (static_cast<int>(free.size()) > kMaxSignCompletions)
    throw std::length_error("abs-sum subdifferential: too many zero coordinates to enumerate");
  std::vector<Vec> vertices;
  const std::size_t total = std::size_t{1} << free.size();
  vertices.reserve(total);
  for (std::size_t mask = 0; mask < total; ++mask) {
    Vec v = lo;
    for (std::size_t b = 0; b < free.size(); ++b) {
      if (mask & (std::size_t{1} << b)) v(free[b]) = hi(free[b]);
    }
    vertices.push_back(std::move(v));
  }
  return ConvexSet(m, std::move(vertices));
}

ConvexSet abs_sum_subdiff(const Vec& weights, const Vec& z, double act_tol) {
  const auto m = z.size();
  Vec lo(m);
  Vec hi(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(z(i)) <= act_tol) {
      lo(i) = -weights(i);
      hi(i) = weights(i);
    } else {
      lo(i) = hi(i) = z(i) > 0 ? weights(i) : -weights(i);
    }
  }
  return box_vertices(lo, hi);
}

}  // namespace

std::string to_string(OuterKind kind) {
  switch (kind) {
    case OuterKind::max: return "max";
    case OuterKind::ell1: return "ell1";
    case OuterKind::halfspace_indicator: return "halfspace-indicator";
    case OuterKind::squared_hinge: return "squared-hinge";
    case OuterKind::weighted_abs_sum: return "weighted-abs-sum";
  }
  return "unknown";
}

ConvexOuter ConvexOuter::max(int m) {
  if (m <= 0) throw std::invalid_argument("max: dimension must be positive");
  return ConvexOuter(OuterKind::max, m);
}

ConvexOuter ConvexOuter::ell1(int m) {
  if (m <= 0) throw std::invalid_argument("ell1: dimension must be positive");
  ConvexOuter g(OuterKind::ell1, m);
  g.weights_ = Vec::Ones(m);
  return g;
}

ConvexOuter ConvexOuter::halfspace_indicator(int m, int index, double bound) {
  if (m <= 0) throw std::invalid_argument("halfspace-indicator: dimension must be positive");
  if (index < 0 || index >= m) throw std::invalid_argument("halfspace-indicator: index out of range");
  if (!std::isfinite(bound)) throw std::invalid_argument("halfspace-indicator: bound must be finite");
  ConvexOuter g(OuterKind::halfspace_indicator, m);
  g.index_ = index;
  g.bound_ = bound;
  return g;
}

ConvexOuter ConvexOuter::squared_hinge(int m) {
  if (m <= 0) throw std::invalid_argument("squared-hinge: dimension must be positive");
  return ConvexOuter(OuterKind::squared_hinge, m);
}

ConvexOuter ConvexOuter::weighted_abs_sum(Vec weights) {
  if (weights.size() == 0) throw std::invalid_argument("weighted-abs-sum: empty weights");
  if (!weights.allFinite() || (weights.array() < 0.0).any())
    throw std::invalid_argument("weighted-abs-sum: weights must be finite and nonnegative");
  ConvexOuter g(OuterKind::weighted_abs_sum, static_cast<int>(weights.size()));
  g.weights_ = std::move(weights);
  return g;
}

double outer_value(const ConvexOuter& g, const Vec& z) {
  check_dim(g, z);
  switch (g.kind()) {
    case OuterKind::max: return z.maxCoeff();
    case OuterKind::ell1:
    case OuterKind::weighted_abs_sum: return g.weights().dot(z.cwiseAbs());
    case OuterKind::halfspace_indicator: return z(g.index()) >= g.bound() ? 0.0 : kInf;
    case OuterKind::squared_hinge: return z.cwiseMax(0.0).squaredNorm();
  }
  throw std::logic_error("outer_value: unhandled kind");
}

bool in_dom(const ConvexOuter& g, const Vec& z) {
  check_dim(g, z);
  if (g.kind() == OuterKind::halfspace_indicator) return z(g.index()) >= g.bound();
  return true;
}

bool interior_dom(const ConvexOuter& g, const Vec& z) {
  check_dim(g, z);
  if (g.kind() == OuterKind::halfspace_indicator) return z(g.index()) > g.bound();
  return true;
}

ConvexSet outer_subdiff(const ConvexOuter& g, const Vec& z, double act_tol) {
  check_dim(g, z);
  if (act_tol < 0.0) throw std::invalid_argument("outer_subdiff: act_tol must be nonnegative");
  const int m = g.ambient_dim();
  switch (g.kind()) {
    case OuterKind::max: {
      const double top = z.maxCoeff();
      std::vector<Vec> vertices;
      for (int i = 0; i < m; ++i) {
        if (z(i) >= top - act_tol) vertices.push_back(unit(m, i));
      }
      return ConvexSet(m, std::move(vertices));
    }
    case OuterKind::ell1:
    case OuterKind::weighted_abs_sum: return abs_sum_subdiff(g.weights(), z, act_tol);
    case OuterKind::halfspace_indicator: {
      const double slack = z(g.index()) - g.bound();
      if (slack < 0.0) return ConvexSet::empty(m);
      if (slack <= act_tol) return ConvexSet(m, {Vec::Zero(m)}, {unit(m, g.index(), -1.0)});
      return ConvexSet::singleton(Vec::Zero(m));
    }
    case OuterKind::squared_hinge: return ConvexSet::singleton(Vec(2.0 * z.cwiseMax(0.0)));
  }
  throw std::logic_error("outer_subdiff: unhandled kind");
}

std::optional<double> lip_modulus(const ConvexOuter& g, const Vec& z, double act_tol) {
  const ConvexSet s = outer_subdiff(g, z, act_tol);
  if (s.is_empty()) return std::nullopt;
  if (!s.is_bounded()) return kInf;
  double best = 0.0;
  for (const auto& v : s.vertices()) best = std::max(best, v.norm());
  return best;
}

}  // namespace flm
