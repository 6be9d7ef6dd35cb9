#include "geoshoot/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "geoshoot/errors.hpp"
#include "geoshoot/image.hpp"

namespace geoshoot {

void OptimizerConfig::validate() const {
  if (max_outer_iterations < 0) throw std::invalid_argument("max_outer_iterations must be >= 0");
  if (cg_max_iterations < 1) throw std::invalid_argument("cg_max_iterations must be >= 1");
  if (!(cg_relative_tolerance > 0.0)) throw std::invalid_argument("cg_relative_tolerance must be positive");
  if (!(initial_step > 0.0)) throw std::invalid_argument("initial_step must be positive");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw std::invalid_argument("backtrack_factor must lie in (0,1)");
  }
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
    throw std::invalid_argument("sufficient_decrease must lie in (0,1)");
  }
  if (max_backtracks < 0) throw std::invalid_argument("max_backtracks must be >= 0");
  if (!(gradient_tolerance > 0.0)) throw std::invalid_argument("gradient_tolerance must be positive");
}

CgResult cg_solve(const LinearOperator& op, const BandLimitedField& rhs,
                  const SpectralOperators& ops, int max_iterations, double relative_tolerance) {
  CgResult out;
  out.solution = BandLimitedField(rhs.band(), rhs.components());
  const double b_norm = norm_V(rhs, ops);
  out.residual_history.push_back(b_norm);
  if (b_norm == 0.0) {
    out.converged = true;
    return out;
  }
  BandLimitedField r = rhs;
  BandLimitedField p = rhs;
  double rr = b_norm * b_norm;
  for (int it = 0; it < max_iterations; ++it) {
    const BandLimitedField Hp = op(p);
    const double curvature = inner_product_V(p, Hp, ops);
    if (!(curvature > 0.0)) {
      out.negative_curvature = true;
      break;
    }
    const double alpha = rr / curvature;
    out.solution.axpy(alpha, p);
    r.axpy(-alpha, Hp);
    const double rr_next = inner_product_V(r, r, ops);
    out.iterations = it + 1;
    out.residual_history.push_back(std::sqrt(std::max(rr_next, 0.0)));
    if (out.residual_history.back() <= relative_tolerance * b_norm) {
      out.converged = true;
      break;
    }
    p *= rr_next / rr;
    p += r;
    rr = rr_next;
  }
  return out;
}

Metrics metrics(const RegistrationProblem& problem, const GradientReport& report) {
  if (!report.cache) throw InvalidState("metrics: report carries no forward pass");
  Metrics m;
  const double base = mse(problem.source(), problem.target());
  const double now = mse(report.cache->final_image(), problem.target());
  m.mse_rel = base == 0.0 ? 0.0 : 100.0 * now / base;
  if (report.gradient) {
    const auto g = include(*report.gradient, problem.source().shape());
    for (double x : g.data()) m.grad_inf_norm = std::max(m.grad_inf_norm, std::abs(x));
  }
  return m;
}

namespace {

struct LineSearchOutcome {
  bool accepted = false;
  double step = 0.0;
  BandLimitedField v0;
};

LineSearchOutcome backtrack(const RegistrationProblem& problem, const GradientReport& current,
                            const BandLimitedField& direction, double slope,
                            const OptimizerConfig& config) {
  LineSearchOutcome out;
  double eps = config.initial_step;
  for (int b = 0; b <= config.max_backtracks; ++b, eps *= config.backtrack_factor) {
    BandLimitedField trial = current.v0;
    trial.axpy(eps, direction);
    double energy = 0.0;
    try {
      const GradientReport r = problem.evaluate(trial);
      energy = r.energy;
      if (!std::isnan(config.jacobian_floor) &&
          !(problem.min_jacobian_determinant(r) > config.jacobian_floor)) {
        continue;
      }
    } catch (const NumericalBlowup&) {
      continue;
    }
    if (std::isfinite(energy) &&
        energy <= current.energy + config.sufficient_decrease * eps * slope) {
      out.accepted = true;
      out.step = eps;
      out.v0 = std::move(trial);
      return out;
    }
  }
  return out;
}

}  // namespace

StepResult step(const RegistrationProblem& problem, const GradientReport& current,
                const OptimizerConfig& config) {
  if (!current.gradient) throw InvalidState("step needs a report produced by gradient()");
  const SpectralOperators& ops = problem.ops();
  const BandLimitedField& g = *current.gradient;

  StepResult result;
  result.v0 = current.v0;
  result.report = current;

  const BandLimitedField minus_g = -g;
  const auto hvp = [&](const BandLimitedField& d) { return problem.gauss_newton_hvp(current, d); };
  CgResult cg = cg_solve(hvp, minus_g, ops, config.cg_max_iterations, config.cg_relative_tolerance);
  result.cg_iterations = cg.iterations;
  result.negative_curvature = cg.negative_curvature;

  BandLimitedField direction = std::move(cg.solution);
  double slope = inner_product_V(g, direction, ops);
  if (direction.is_zero() || !(slope < 0.0)) {
    direction = minus_g;
    slope = -inner_product_V(g, g, ops);
  }
  if (slope == 0.0) {
    result.stalled = true;
    return result;
  }

  LineSearchOutcome ls = backtrack(problem, current, direction, slope, config);
  if (!ls.accepted) {
    const double steepest = -inner_product_V(g, g, ops);
    ls = backtrack(problem, current, minus_g, steepest, config);
  }
  if (!ls.accepted) {
    result.stalled = true;
    return result;
  }
  result.step = ls.step;
  result.v0 = std::move(ls.v0);
  result.report = problem.gradient(result.v0);
  return result;
}

RunResult run(const RegistrationProblem& problem, const BandLimitedField& v0_init,
              const OptimizerConfig& config, const RowSink& sink) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  RunResult out;
  out.v0 = v0_init;
  out.report = problem.gradient(v0_init);
  const Metrics m0 = metrics(problem, out.report);
  const double g0 = m0.grad_inf_norm;

  auto emit = [&](const ConvergenceRow& row) {
    out.record.push_back(row);
    if (sink) sink(row);
  };
  emit({0, out.report.energy, m0.mse_rel, 1.0, 0, 0.0, elapsed()});
  if (g0 == 0.0) return out;

  double grad_rel = 1.0;
  for (int n = 1; n <= config.max_outer_iterations; ++n) {
    if (grad_rel <= config.gradient_tolerance) break;
    StepResult s = step(problem, out.report, config);
    if (s.stalled) {
      out.stalled = true;
      break;
    }
    out.v0 = std::move(s.v0);
    out.report = std::move(s.report);
    const Metrics m = metrics(problem, out.report);
    grad_rel = m.grad_inf_norm / g0;
    emit({n, out.report.energy, m.mse_rel, grad_rel, s.cg_iterations, s.step, elapsed()});
  }
  return out;
}

}  // namespace geoshoot
