#include <doctest.h>

#include "flm/battery.hpp"
#include "flm/solver.hpp"

#include <cmath>

using namespace flm;

namespace {

void check_trace_invariants(const SolverTrace& t, const SolverConfig& cfg) {
  REQUIRE_FALSE(t.iterations.empty());
  double last_accepted = kInf;
  for (std::size_t k = 0; k < t.iterations.size(); ++k) {
    const auto& it = t.iterations[k];
    CHECK(it.delta > 0.0);
    CHECK(it.delta <= cfg.delta_max);
    CHECK(it.value <= last_accepted);
    if (it.accepted) {
      CHECK(it.predicted_reduction > 0.0);
      CHECK(it.actual_reduction > 0.0);
      CHECK(it.actual_reduction >= cfg.eta_accept * it.predicted_reduction);
      const double next = k + 1 < t.iterations.size() ? t.iterations[k + 1].value : t.f_final;
      CHECK(next == doctest::Approx(it.value - it.actual_reduction).epsilon(1e-12));
    }
    last_accepted = it.value;
  }
}

bool same_trace(const SolverTrace& a, const SolverTrace& b) {
  if (a.iterations.size() != b.iterations.size() || a.status != b.status) return false;
  for (std::size_t k = 0; k < a.iterations.size(); ++k) {
    const auto& p = a.iterations[k];
    const auto& q = b.iterations[k];
    if (p.x != q.x || p.delta != q.delta || p.value != q.value || p.stationarity != q.stationarity ||
        p.accepted != q.accepted || p.predicted_reduction != q.predicted_reduction ||
        p.actual_reduction != q.actual_reduction)
      return false;
  }
  return a.x_final == b.x_final && a.f_final == b.f_final;
}

}  // namespace

TEST_CASE("stationarity measure") {
  CHECK(stationarity(ConvexOuter::max(2), paraboloid_pair(), Vec::Zero(2)) <= 1e-12);
  CHECK(stationarity(ConvexOuter::ell1(2), identity_function(2), Vec::Zero(2)) <= 1e-12);
  // Squared hinge is smooth: the measure is the gradient norm, 2 * (3, 0) here.
  CHECK(stationarity(ConvexOuter::squared_hinge(2), identity_function(2), Vec{{3.0, -5.0}}) ==
        doctest::Approx(6.0).epsilon(1e-14));
  const Vec x{{0.4, -1.2}};
  const Vec grad = 2.0 * sin_square().jacobian(x).transpose() * sin_square()(x).cwiseMax(0.0);
  CHECK(stationarity(ConvexOuter::squared_hinge(2), sin_square(), x) == doctest::Approx(grad.norm()).epsilon(1e-12));
  // Away from the minimax point only one paraboloid is active.
  CHECK(stationarity(ConvexOuter::max(2), paraboloid_pair(), Vec{{0.0, 0.5}}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(stationarity(ConvexOuter::halfspace_indicator(2, 0, 0.0), identity_function(2), Vec::Zero(2)),
                  HypothesisViolation);
  const SmoothModel m = adversarial_family("ex42").build(0.5);
  CHECK(stationarity(ConvexOuter::ell1(2), m, Vec::Zero(2)) <= 1e-12);
}

TEST_CASE("symmetric paraboloid minimax") {
  const SolverConfig cfg;
  const auto t = minimize(ConvexOuter::max(2), paraboloid_pair(), Vec{{2.0, 2.0}}, cfg);
  CHECK(t.status == SolverStatus::converged);
  CHECK(t.iterations.size() <= 200);
  CHECK(t.x_final.norm() <= 1e-3);
  CHECK(std::abs(t.f_final - 1.0) <= 1e-3);
  check_trace_invariants(t, cfg);
  CHECK(same_trace(t, minimize(ConvexOuter::max(2), paraboloid_pair(), Vec{{2.0, 2.0}}, cfg)));
}

TEST_CASE("ell1 of a shifted identity") {
  const SolverConfig cfg;
  const auto t = minimize(ConvexOuter::ell1(2), shifted_identity(), Vec::Zero(2), cfg);
  CHECK((t.x_final - Vec{{1.0, -2.0}}).norm() <= 1e-3);
  CHECK(t.f_final <= 1e-3);
  check_trace_invariants(t, cfg);
}

TEST_CASE("squared hinge reaches the nonpositive orthant") {
  const SolverConfig cfg;
  const auto t = minimize(ConvexOuter::squared_hinge(2), identity_function(2), Vec{{3.0, -5.0}}, cfg);
  CHECK(t.f_final <= 1e-6);
  CHECK(t.x_final(0) <= 1e-3);
  CHECK(t.x_final(1) <= 1e-3);
  check_trace_invariants(t, cfg);
}

TEST_CASE("trace invariants across seeds and starts") {
  for (std::uint64_t seed : {0u, 1u, 7u}) {
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.max_iters = 60;
    for (const Vec& x0 : {Vec{{2.0, 2.0}}, Vec{{-1.5, 0.3}}, Vec{{0.1, -3.0}}}) {
      const auto a = minimize(ConvexOuter::max(2), quad_mix(), x0, cfg);
      check_trace_invariants(a, cfg);
      CHECK(same_trace(a, minimize(ConvexOuter::max(2), quad_mix(), x0, cfg)));
      const auto b = minimize(ConvexOuter::ell1(2), sin_square(), x0, cfg);
      check_trace_invariants(b, cfg);
    }
  }
}

TEST_CASE("iteration cap is a status, not an error") {
  SolverConfig cfg;
  cfg.max_iters = 3;
  const auto t = minimize(ConvexOuter::max(2), paraboloid_pair(), Vec{{2.0, 2.0}}, cfg);
  CHECK(t.status == SolverStatus::max_iterations);
  CHECK(t.iterations.size() == 3);
}

TEST_CASE("solver input validation") {
  CHECK_THROWS_AS(minimize(ConvexOuter::halfspace_indicator(2, 0, 0.0), identity_function(2), Vec::Ones(2)),
                  std::invalid_argument);
  SolverConfig bad;
  bad.gamma_shrink = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SolverConfig{};
  bad.eta_accept = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SolverConfig{};
  bad.initial_delta = 3.0;  // above delta_max
  CHECK_THROWS_AS(minimize(ConvexOuter::max(2), paraboloid_pair(), Vec::Zero(2), bad), std::invalid_argument);
  CHECK_THROWS_AS(minimize(ConvexOuter::max(2), paraboloid_pair(), Vec::Zero(3)), std::invalid_argument);
}
