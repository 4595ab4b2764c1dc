#include "flm/core.hpp"

#include <cmath>
#include <random>

namespace flm {

ScalarField component(const VectorFunction& fn, int i) {
  if (i < 0 || i >= fn.dim_out) throw std::out_of_range("component index out of range");
  return ScalarField{
      [fn, i](const Vec& x) { return fn.value_at(x)(i); },
      [fn, i](const Vec& x) -> Vec { return fn.jacobian_at(x).row(i).transpose(); },
  };
}

ConvexSet::ConvexSet(int ambient_dim) : ambient_dim_(ambient_dim) {
  if (ambient_dim <= 0) throw std::invalid_argument("ConvexSet: ambient dimension must be positive");
}

ConvexSet::ConvexSet(int ambient_dim, std::vector<Vec> vertices, std::vector<Vec> rays)
    : ambient_dim_(ambient_dim), vertices_(std::move(vertices)) {
  if (ambient_dim <= 0) throw std::invalid_argument("ConvexSet: ambient dimension must be positive");
  if (vertices_.empty() && !rays.empty())
    throw std::invalid_argument("ConvexSet: rays given without vertices");
  for (const auto& v : vertices_) {
    if (v.size() != ambient_dim_) throw std::invalid_argument("ConvexSet: vertex dimension mismatch");
  }
  rays_.reserve(rays.size());
  for (const auto& r : rays) {
    if (r.size() != ambient_dim_) throw std::invalid_argument("ConvexSet: ray dimension mismatch");
    const double len = r.norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw std::invalid_argument("ConvexSet: zero or non-finite ray");
    rays_.push_back(r / len);
  }
}

ConvexSet ConvexSet::singleton(const Vec& point) {
  return ConvexSet(static_cast<int>(point.size()), {point});
}

ConvexSet ConvexSet::deduplicated(double tol) const {
  auto unique = [tol](const std::vector<Vec>& in) {
    std::vector<Vec> out;
    for (const auto& p : in) {
      bool seen = false;
      for (const auto& q : out) {
        if ((p - q).lpNorm<Eigen::Infinity>() <= tol) {
          seen = true;
          break;
        }
      }
      if (!seen) out.push_back(p);
    }
    return out;
  };
  if (is_empty()) return *this;
  return ConvexSet(ambient_dim_, unique(vertices_), unique(rays_));
}

std::string to_string(ReportStatus status) {
  switch (status) {
    case ReportStatus::ok: return "pass";
    case ReportStatus::bound_failure: return "bound_failure";
    case ReportStatus::hypothesis_violation: return "hypothesis_violation";
  }
  return "unknown";
}

std::vector<Vec> sample_uniform_ball(const Vec& center, double radius, int count,
                                     std::uint64_t seed) {
  if (!(radius > 0.0)) throw std::invalid_argument("sample_uniform_ball: radius must be positive");
  if (count < 0) throw std::invalid_argument("sample_uniform_ball: negative count");
  const auto n = center.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Vec> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vec dir(n);
    double len = 0.0;
    do {
      for (Eigen::Index j = 0; j < n; ++j) dir(j) = normal(rng);
      len = dir.norm();
    } while (len == 0.0);
    const double scale = std::pow(unit(rng), 1.0 / static_cast<double>(n));
    points.push_back(center + radius * (scale / len) * dir);
  }
  return points;
}

std::vector<Vec> sample_ball(const Vec& center, double radius, int count, std::uint64_t seed) {
  if (!(radius > 0.0)) throw std::invalid_argument("sample_ball: radius must be positive");
  if (count < 1) throw std::invalid_argument("sample_ball: count must be at least 1");
  const auto n = static_cast<int>(center.size());

  std::vector<Vec> points;
  points.reserve(static_cast<std::size_t>(count));
  points.push_back(center);
  if (count >= 2 * n + 1) {
    for (int i = 0; i < n; ++i) {
      Vec plus = center;
      Vec minus = center;
      plus(i) += radius;
      minus(i) -= radius;
      points.push_back(std::move(plus));
      points.push_back(std::move(minus));
    }
  }
  const int remaining = count - static_cast<int>(points.size());
  for (auto& p : sample_uniform_ball(center, radius, remaining, seed)) points.push_back(std::move(p));
  return points;
}

double fd_gradient_check(const ScalarField& fn, const Vec& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient_check: step must be positive");
  const Vec grad = fn.gradient_at(x);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vec xp = x;
    Vec xm = x;
    xp(j) += h;
    xm(j) -= h;
    const double fp = fn.value_at(xp);
    const double fm = fn.value_at(xm);
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::domain_error("fd_gradient_check: non-finite value on the stencil");
    const double fd = (fp - fm) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - grad(j)));
  }
  return worst;
}

}  // namespace flm
