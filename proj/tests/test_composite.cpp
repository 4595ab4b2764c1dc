#include <doctest.h>

#include "flm/battery.hpp"
#include "flm/composite.hpp"
#include "flm/models.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace flm;

namespace {

bool has_vertex(const ConvexSet& s, const Vec& v, double tol = 1e-12) {
  for (const auto& u : s.vertices())
    if ((u - v).lpNorm<Eigen::Infinity>() <= tol) return true;
  return false;
}

VectorFunction plus_minus() {
  return {1, 2, [](const Vec& x) -> Vec { return Vec{{x(0), -x(0)}}; },
          [](const Vec&) -> Mat { return Mat{{1.0}, {-1.0}}; }};
}

ConvexSet random_polytope_set(std::mt19937& rng, int dim, int max_vertices) {
  std::uniform_int_distribution<int> count(1, max_vertices);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec> v;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    Vec p(dim);
    for (int j = 0; j < dim; ++j) p(j) = u(rng);
    v.push_back(p);
  }
  return ConvexSet(dim, v);
}

}  // namespace

TEST_CASE("composite values") {
  CHECK(comp_value(CompositeFunction(ConvexOuter::max(2), plus_minus()), Vec::Constant(1, 2.0)) == 2.0);

  const SmoothModel m33 = adversarial_family("ex33").build(0.1);
  CHECK(std::isinf(comp_value(CompositeFunction(ConvexOuter::halfspace_indicator(2, 0, 0.0), m33), Vec::Zero(2))));

  const SmoothModel m43 = adversarial_family("ex43").build(0.5);
  CHECK(comp_value(CompositeFunction(ConvexOuter::ell1(2), m43), Vec::Zero(2)) == doctest::Approx(0.5));
}

TEST_CASE("model composites know their trust region") {
  const SmoothModel m = adversarial_family("ex44").build(0.5);
  const CompositeFunction c(ConvexOuter::ell1(2), m);
  CHECK(c.has_trust_region());
  CHECK(c.within_trust_region(Vec{{0.3, 0.3}}));
  CHECK_FALSE(c.within_trust_region(Vec{{0.5, 0.5}}));
  const CompositeFunction plain(ConvexOuter::ell1(2), identity_function(2));
  CHECK(plain.within_trust_region(Vec{{100.0, 0.0}}));
  CHECK_THROWS_AS(CompositeFunction(ConvexOuter::ell1(3), identity_function(2)), std::invalid_argument);
}

TEST_CASE("composite subdifferentials") {
  SUBCASE("ell1 of the identity at the origin is the box") {
    const auto r = comp_subdiff(CompositeFunction(ConvexOuter::ell1(2), identity_function(2)), Vec::Zero(2));
    CHECK(r.status == ChainRuleStatus::interior);
    CHECK(r.set.vertices().size() == 4);
    for (double a : {-1.0, 1.0})
      for (double b : {-1.0, 1.0}) CHECK(has_vertex(r.set, Vec{{a, b}}));
  }
  SUBCASE("indicator composed with the ex42 model") {
    for (double d : {0.5, 0.1, 0.01}) {
      const SmoothModel m = adversarial_family("ex42").build(d);
      const auto r = comp_subdiff(CompositeFunction(ConvexOuter::halfspace_indicator(2, 0, 0.0), m), Vec::Zero(2));
      CHECK(r.status == ChainRuleStatus::boundary);
      REQUIRE(r.set.vertices().size() == 1);
      CHECK(r.set.vertices()[0].norm() == 0.0);
      REQUIRE(r.set.rays().size() == 1);
      const Vec expect = Vec{{-1.0, d}}.normalized();
      CHECK((r.set.rays()[0] - expect).norm() <= 1e-15);
    }
  }
  SUBCASE("ell1 composed with the ex44 model off the center") {
    const double eps = 0.1;
    for (double d : {0.5, 0.1, 0.01}) {
      const SmoothModel m = adversarial_family("ex44").build(d);
      const auto r = comp_subdiff(CompositeFunction(ConvexOuter::ell1(2), m), Vec{{eps, 0.0}});
      REQUIRE(r.set.vertices().size() == 1);
      CHECK((r.set.vertices()[0] - Vec::Constant(2, 1.0 + d * d)).norm() <= 1e-15);
    }
  }
  SUBCASE("outside the domain") {
    const SmoothModel m = adversarial_family("ex33").build(0.1);
    const auto r = comp_subdiff(CompositeFunction(ConvexOuter::halfspace_indicator(2, 0, 0.0), m), Vec::Zero(2));
    CHECK(r.status == ChainRuleStatus::outside_domain);
    CHECK(r.set.is_empty());
  }
  SUBCASE("a ray in the kernel of the transposed Jacobian is dropped") {
    const VectorFunction flat{2, 2, [](const Vec& x) -> Vec { return Vec{{0.0, x(1)}}; },
                              [](const Vec&) -> Mat { return Mat{{0.0, 0.0}, {0.0, 1.0}}; }};
    const auto r = comp_subdiff(CompositeFunction(ConvexOuter::halfspace_indicator(2, 0, 0.0), flat), Vec::Zero(2));
    CHECK(r.set.rays().empty());
    CHECK(r.set.vertices().size() == 1);
  }
}

TEST_CASE("chain rule with a smooth outer matches finite differences") {
  const auto g = ConvexOuter::squared_hinge(2);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const auto& F : {sin_square(), quad_mix(), paraboloid_pair()}) {
    const CompositeFunction c(g, F);
    for (int k = 0; k < 10; ++k) {
      const Vec x{{u(rng), u(rng)}};
      const auto r = comp_subdiff(c, x);
      REQUIRE(r.set.vertices().size() == 1);
      ScalarField f{[&c](const Vec& y) { return comp_value(c, y); }, [w = r.set.vertices()[0]](const Vec&) -> Vec { return w; }};
      CHECK(fd_gradient_check(f, x, 1e-6) <= 1e-5);
    }
  }
}

TEST_CASE("comp_subdiff is the image of the outer generators") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const VectorFunction F = quad_mix();
  for (const auto& g : {ConvexOuter::max(2), ConvexOuter::ell1(2), ConvexOuter::weighted_abs_sum(Vec{{1.0, 3.0}})}) {
    for (int k = 0; k < 20; ++k) {
      Vec x{{u(rng), u(rng)}};
      if (k % 2 == 0) {
        // Land on a kink: shift until both components tie or hit zero.
        x(1) = 0.0;
      }
      const Vec z = F(x);
      const Mat J = F.jacobian(x);
      const ConvexSet w = outer_subdiff(g, z);
      const auto r = comp_subdiff(CompositeFunction(g, F), x);
      for (const auto& gen : w.vertices()) CHECK(has_vertex(r.set, J.transpose() * gen, 1e-12));
      for (const auto& v : r.set.vertices()) {
        bool found = false;
        for (const auto& gen : w.vertices()) found = found || (J.transpose() * gen - v).lpNorm<Eigen::Infinity>() <= 1e-12;
        CHECK(found);
      }
    }
  }
}

TEST_CASE("distances to sets") {
  const double d = 0.25;
  const ConvexSet cone(2, {Vec::Zero(2)}, {Vec{{-1.0, 0.0}}});
  CHECK(dist_point_set(Vec{{-1.0 / d, 1.0}}, cone) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dist_point_set(Vec{{-1.0, -1.0}}, ConvexSet::singleton(Vec{{1.0, 1.0}})) ==
        doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
  CHECK(dist_point_set(Vec::Zero(2), ConvexSet(2, {Vec{{1.0, 1.0}}, Vec{{1.0, -1.0}}})) ==
        doctest::Approx(1.0).epsilon(1e-12));
  const auto mn = min_norm_point(Vec::Zero(2), ConvexSet(2, {Vec{{1.0, 1.0}}, Vec{{1.0, -1.0}}}));
  CHECK((mn.nearest - Vec{{1.0, 0.0}}).norm() <= 1e-12);
  CHECK(mn.gap <= 1e-12);
  CHECK_THROWS_AS(dist_point_set(Vec::Zero(2), ConvexSet::empty(2)), std::invalid_argument);
}

TEST_CASE("distance to half-lines and cones against closed forms") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const Vec a{{u(rng), u(rng), u(rng)}}, r = Vec{{u(rng), u(rng), u(rng)}}.normalized();
    const Vec v{{u(rng), u(rng), u(rng)}};
    // Half-line a + t r, t >= 0.
    const double t = std::max(0.0, (v - a).dot(r));
    const double ref = (v - a - t * r).norm();
    CHECK(std::abs(dist_point_set(v, ConvexSet(3, {a}, {r})) - ref) <= 1e-10);
  }
  // Quadrant cone {x <= 0, y <= 0} in R^2 shifted to (1, 1): distance is the
  // norm of the positive part of v - (1,1).
  const ConvexSet quad(2, {Vec{{1.0, 1.0}}}, {Vec{{-1.0, 0.0}}, Vec{{0.0, -1.0}}});
  for (int k = 0; k < 200; ++k) {
    const Vec v{{u(rng), u(rng)}};
    const double ref = (v - Vec::Constant(2, 1.0)).cwiseMax(0.0).norm();
    CHECK(std::abs(dist_point_set(v, quad) - ref) <= 1e-10);
  }
  // Segment plus a ray: a strip-like set.
  const ConvexSet strip(2, {Vec{{0.0, 0.0}}, Vec{{0.0, 1.0}}}, {Vec{{1.0, 0.0}}});
  CHECK(dist_point_set(Vec{{5.0, 3.0}}, strip) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(dist_point_set(Vec{{-2.0, 0.5}}, strip) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(dist_point_set(Vec{{7.0, 0.25}}, strip) <= 1e-12);
}

TEST_CASE("min-norm solver agrees with a weight-grid oracle") {
  std::mt19937 rng(77);
  int four = 0;
  for (int k = 0; k < 12; ++k) {
    const auto p = oracle::random_polytope(rng);
    // Keep the unit test fast: the four-vertex grid is the expensive case.
    const int steps = p.vertices.size() == 4 ? 250 : 1000;
    four += p.vertices.size() == 4;
    const double ref = oracle::grid_distance(p.query, p.vertices, steps);
    const double got = dist_point_set(p.query, ConvexSet(3, p.vertices));
    CHECK(got <= ref + 1e-12);
    CHECK(ref - got <= (steps == 1000 ? 2e-3 : 8e-3));
  }
  CHECK(four > 0);
}

TEST_CASE("min-norm solver on larger random polytopes") {
  // KKT check: the nearest point p satisfies (v - p).(u - p) <= 0 for every vertex u.
  std::mt19937 rng(123);
  for (int k = 0; k < 200; ++k) {
    const int dim = 2 + k % 5;
    const ConvexSet s = random_polytope_set(rng, dim, 30);
    Vec v(dim);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < dim; ++i) v(i) = u(rng);
    const auto r = min_norm_point(v, s);
    for (const auto& w : s.vertices()) CHECK((v - r.nearest).dot(w - r.nearest) <= 1e-10);
    CHECK(r.distance == doctest::Approx((v - r.nearest).norm()));
  }
}

TEST_CASE("hausdorff distance") {
  const ConvexSet seg(2, {Vec::Zero(2), Vec{{1.0, 0.0}}});
  CHECK(hausdorff(seg, ConvexSet::singleton(Vec::Zero(2))) == doctest::Approx(1.0));
  CHECK(hausdorff(seg, seg) == 0.0);

  // ex43: the model value at 0 is (1/4, 1/4), so its subdifferential is {(1,1)}
  // while the exact one is the whole box; the far vertex is (-1,-1).
  const auto exact = comp_subdiff(CompositeFunction(ConvexOuter::ell1(2), identity_function(2)), Vec::Zero(2));
  const auto model =
      comp_subdiff(CompositeFunction(ConvexOuter::ell1(2), adversarial_family("ex43").build(0.5)), Vec::Zero(2));
  CHECK(hausdorff(exact.set, model.set) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));

  CHECK_THROWS_AS(hausdorff(ConvexSet(2, {Vec::Zero(2)}, {Vec{{1.0, 0.0}}}), seg), std::invalid_argument);
  CHECK_THROWS_AS(hausdorff(ConvexSet::empty(2), seg), std::invalid_argument);
  CHECK_THROWS_AS(hausdorff(ConvexSet::singleton(Vec::Zero(3)), seg), std::invalid_argument);
}

TEST_CASE("hausdorff is a metric on polytopes") {
  std::mt19937 rng(2);
  for (int k = 0; k < 100; ++k) {
    const ConvexSet a = random_polytope_set(rng, 3, 5).deduplicated();
    const ConvexSet b = random_polytope_set(rng, 3, 5).deduplicated();
    const ConvexSet c = random_polytope_set(rng, 3, 5).deduplicated();
    const double ab = hausdorff(a, b), ba = hausdorff(b, a);
    CHECK(ab >= 0.0);
    CHECK(std::abs(ab - ba) <= 1e-12);
    CHECK(hausdorff(a, a) <= 1e-12);
    CHECK(ab <= hausdorff(a, c) + hausdorff(c, b) + 1e-9);
    if (ab <= 1e-9) CHECK(hausdorff(b, a) <= 1e-9);
  }
  // Different vertex lists of the same set give zero.
  const ConvexSet tri(2, {Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}, Vec{{0.0, 1.0}}});
  const ConvexSet tri_extra(2, {Vec{{0.0, 1.0}}, Vec{{0.5, 0.25}}, Vec{{1.0, 0.0}}, Vec{{0.0, 0.0}}});
  CHECK(hausdorff(tri, tri_extra) <= 1e-12);
  // A distinct set is at positive distance.
  CHECK(hausdorff(tri, ConvexSet(2, {Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}})) > 0.1);
}

TEST_CASE("pair_subgradients") {
  SUBCASE("exact model gives zero gaps") {
    const VectorFunction F = sin_square();
    const Vec c{{0.5, 0.8}};
    const SmoothModel m = exact_family(F, c, 1.0).build(0.25);
    for (const auto& p : pair_subgradients(ConvexOuter::ell1(2), F, m, c)) CHECK(p.gap == 0.0);
  }
  SUBCASE("ex44 with the ell1 outer") {
    for (double d : {0.5, 0.1}) {
      const auto pairs = pair_subgradients(ConvexOuter::ell1(2), identity_function(2),
                                           adversarial_family("ex44").build(d), Vec::Zero(2));
      CHECK(pairs.size() == 4);
      bool seen = false;
      for (const auto& p : pairs) {
        // J~^T w = w + d^2 (w2, w1): every gap is sqrt(2) d^2.
        CHECK(p.gap == doctest::Approx(std::sqrt(2.0) * d * d).epsilon(1e-12));
        if ((p.generator - Vec::Constant(2, 1.0)).norm() == 0.0) {
          seen = true;
          CHECK(p.exact == Vec::Constant(2, 1.0));
          CHECK((p.model - Vec::Constant(2, 1.0 + d * d)).norm() <= 1e-15);
        }
      }
      CHECK(seen);
    }
  }
  SUBCASE("max outer gaps respect sqrt(m) kappa_G Delta") {
    const VectorFunction F = quad_mix();
    const Vec c{{0.3, -0.2}};
    const ModelFamily fam = interpolation_family(F, c, 1.0, Scheme::linear());
    const std::vector<double> deltas{0.5, 0.25, 0.125, 0.0625};
    const auto [value, grad] = certify_fully_linear(fam, deltas, 200, 0);
    for (double d : deltas) {
      for (const auto& p : pair_subgradients(ConvexOuter::max(2), F, fam.build(d), c, 1.0))
        CHECK(p.gap <= std::sqrt(2.0) * grad.constant_estimate * d * (1.0 + 1e-9));
    }
  }
  SUBCASE("hypothesis failures") {
    CHECK_THROWS_AS(pair_subgradients(ConvexOuter::ell1(2), identity_function(2), adversarial_family("ex43").build(0.5),
                                      Vec::Zero(2)),
                    HypothesisViolation);
    CHECK_THROWS_AS(pair_subgradients(ConvexOuter::halfspace_indicator(2, 0, 0.0), identity_function(2),
                                      adversarial_family("ex42").build(0.5), Vec::Zero(2)),
                    HypothesisViolation);
  }
}

TEST_CASE("interpolation check at the center") {
  const SmoothModel m = adversarial_family("ex42").build(0.5);
  CHECK(interpolates_at(identity_function(2), m, Vec::Zero(2)));
  CHECK_FALSE(interpolates_at(identity_function(2), adversarial_family("ex43").build(0.5), Vec::Zero(2)));
}
