#include "flm/solver.hpp"

#include <cmath>

namespace flm {

void SolverConfig::validate() const {
  if (!(initial_delta > 0.0)) throw std::invalid_argument("solver: initial_delta must be positive");
  if (!(delta_max >= initial_delta)) throw std::invalid_argument("solver: delta_max must be >= initial_delta");
  if (!(eta_accept > 0.0 && eta_accept < 1.0)) throw std::invalid_argument("solver: eta_accept must lie in (0,1)");
  if (!(gamma_shrink > 0.0 && gamma_shrink < 1.0)) throw std::invalid_argument("solver: gamma_shrink must lie in (0,1)");
  if (!(gamma_grow > 1.0)) throw std::invalid_argument("solver: gamma_grow must exceed 1");
  if (!(stationarity_tol > 0.0)) throw std::invalid_argument("solver: stationarity_tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be positive");
  if (subproblem_samples < 1) throw std::invalid_argument("solver: subproblem_samples must be positive");
}

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iterations: return "max_iterations";
    case SolverStatus::step_failure: return "step_failure";
  }
  return "unknown";
}

namespace {

MinNormResult min_norm_subgradient(const CompositeFunction& c, const Vec& x, double act_tol) {
  const SubdiffResult sd = comp_subdiff(c, x, act_tol);
  if (sd.status != ChainRuleStatus::interior)
    throw HypothesisViolation("stationarity: inner(x) is not interior to dom g (" + to_string(sd.status) + ")");
  return min_norm_point(Vec::Zero(x.size()), sd.set);
}

}  // namespace

double stationarity(const ConvexOuter& g, const VectorFunction& inner, const Vec& x, double act_tol) {
  return min_norm_subgradient(CompositeFunction(g, inner), x, act_tol).distance;
}

double stationarity(const ConvexOuter& g, const SmoothModel& model, const Vec& x, double act_tol) {
  return min_norm_subgradient(CompositeFunction(g, model), x, act_tol).distance;
}

SolverTrace minimize(const ConvexOuter& g, const VectorFunction& F, const Vec& x0,
                     const SolverConfig& cfg) {
  cfg.validate();
  if (!g.finite_valued()) throw std::invalid_argument("minimize: extended-valued outer functions are not supported");
  if (x0.size() != F.dim_in) throw std::invalid_argument("minimize: x0 dimension mismatch");

  SolverTrace trace;
  Vec x = x0;
  double fx = outer_value(g, F(x));
  double delta = cfg.initial_delta;
  trace.status = SolverStatus::max_iterations;

  for (int k = 0; k < cfg.max_iters; ++k) {
    const SmoothModel model = build_model(F, x, delta, Scheme::linear(), cfg.seed);
    const CompositeFunction mc(g, model);
    // Components within delta of activity count as active for the step and
    // the stopping test.
    const MinNormResult mn = min_norm_subgradient(mc, x, delta);
    const Vec p = mn.nearest;
    const double crit = mn.distance;

    SolverIteration it{x, delta, fx, crit, false, 0.0, 0.0};
    if (std::max(delta, crit) <= cfg.stationarity_tol) {
      trace.iterations.push_back(it);
      trace.status = SolverStatus::converged;
      break;
    }

    std::vector<Vec> candidates =
        sample_ball(x, delta, cfg.subproblem_samples, cfg.seed + static_cast<std::uint64_t>(k));
    if (crit > 0.0) candidates.push_back(x - (delta / crit) * p);

    std::size_t best = 0;
    double best_model = kInf;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double mv = outer_value(g, model.value(candidates[i]));
      if (mv < best_model) {
        best_model = mv;
        best = i;
      }
    }

    const double predicted = fx - best_model;
    if (predicted > 0.0) {
      const double f_trial = outer_value(g, F(candidates[best]));
      const double actual = fx - f_trial;
      it.predicted_reduction = predicted;
      it.actual_reduction = actual;
      if (actual >= cfg.eta_accept * predicted) {
        it.accepted = true;
        x = candidates[best];
        fx = f_trial;
      }
    }
    trace.iterations.push_back(it);
    delta = it.accepted ? std::min(cfg.gamma_grow * delta, cfg.delta_max) : cfg.gamma_shrink * delta;
    if (delta < 1e-15 * std::max(1.0, x.norm())) {
      trace.status = SolverStatus::step_failure;
      break;
    }
  }
  trace.x_final = x;
  trace.f_final = fx;
  return trace;
}

}  // namespace flm
