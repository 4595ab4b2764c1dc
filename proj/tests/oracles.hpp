#pragma once
// Brute-force references shared by the unit tests and the acceptance binary.
#include "flm/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace flm::oracle {

/// min ||v - sum_i l_i p_i|| over a grid of convex weights with spacing 1/steps.
/// Up to four points; the innermost weight is walked incrementally.
inline double grid_distance(const Vec& v, const std::vector<Vec>& pts, int steps = 1000) {
  const int k = static_cast<int>(pts.size());
  const double h = 1.0 / steps;
  double best = std::numeric_limits<double>::infinity();
  std::vector<Vec> d;
  for (int i = 1; i < k; ++i) d.push_back(pts[i] - pts[0]);
  const Vec base = pts[0] - v;
  if (k == 1) return base.norm();
  if (k == 2) {
    for (int a = 0; a <= steps; ++a) best = std::min(best, (base + (a * h) * d[0]).squaredNorm());
    return std::sqrt(best);
  }
  if (k == 3) {
    const Vec step = h * d[1];
    for (int a = 0; a <= steps; ++a) {
      Vec p = base + (a * h) * d[0];
      for (int b = 0; a + b <= steps; ++b, p += step) best = std::min(best, p.squaredNorm());
    }
    return std::sqrt(best);
  }
  if (k != 4) throw std::invalid_argument("grid_distance: at most four points");
  // Fixed size inner loop; this is the hot path.
  const Eigen::Vector3d b3 = base.head<3>(), d0 = d[0].head<3>(), d1 = d[1].head<3>(), s2 = h * d[2].head<3>();
  if (v.size() != 3) throw std::invalid_argument("grid_distance: four points supported in R^3 only");
  for (int a = 0; a <= steps; ++a) {
    for (int b = 0; a + b <= steps; ++b) {
      Eigen::Vector3d p = b3 + (a * h) * d0 + (b * h) * d1;
      for (int c = 0; a + b + c <= steps; ++c, p += s2) best = std::min(best, p.squaredNorm());
    }
  }
  return std::sqrt(best);
}

struct RandomPolytope {
  std::vector<Vec> vertices;
  Vec query;
};

/// 1..4 vertices in [-1/2, 1/2]^3 and a query point in [-1, 1]^3.
inline RandomPolytope random_polytope(std::mt19937& rng) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> u(-0.5, 0.5), q(-1.0, 1.0);
  RandomPolytope r;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) r.vertices.push_back(Vec{{u(rng), u(rng), u(rng)}});
  r.query = Vec{{q(rng), q(rng), q(rng)}};
  return r;
}

}  // namespace flm::oracle
