#pragma once

// Demonstration trust-region loop for min g(F(x)) driven by linear
// interpolation models of F.

#include "flm/composite.hpp"
#include "flm/models.hpp"

namespace flm {

struct SolverConfig {
  double initial_delta = 0.5;
  double delta_max = 2.0;
  double eta_accept = 0.1;
  double gamma_shrink = 0.5;
  double gamma_grow = 2.0;
  double stationarity_tol = 1e-5;
  int max_iters = 200;
  int subproblem_samples = 20;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct SolverIteration {
  Vec x;
  double delta = 0.0;
  double value = 0.0;
  double stationarity = 0.0;
  bool accepted = false;
  double predicted_reduction = 0.0;
  double actual_reduction = 0.0;
};

enum class SolverStatus { converged, max_iterations, step_failure };

std::string to_string(SolverStatus status);

struct SolverTrace {
  std::vector<SolverIteration> iterations;
  SolverStatus status = SolverStatus::max_iterations;
  Vec x_final;
  double f_final = 0.0;
};

/// dist(0, d(g o inner)(x)). Throws HypothesisViolation when inner(x) is not
/// interior to dom g.
double stationarity(const ConvexOuter& g, const VectorFunction& inner, const Vec& x,
                    double act_tol = kDefaultActTol);
double stationarity(const ConvexOuter& g, const SmoothModel& model, const Vec& x,
                    double act_tol = kDefaultActTol);

/// Rejects extended-valued g with std::invalid_argument.
SolverTrace minimize(const ConvexOuter& g, const VectorFunction& F, const Vec& x0,
                     const SolverConfig& cfg = {});

}  // namespace flm
