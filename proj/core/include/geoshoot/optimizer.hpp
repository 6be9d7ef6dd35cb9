#pragma once

#include <functional>
#include <vector>

#include "geoshoot/problem.hpp"

namespace geoshoot {

struct OptimizerConfig {
  int max_outer_iterations = 10;
  int cg_max_iterations = 20;
  double cg_relative_tolerance = 1e-1;
  double initial_step = 1.0;
  double backtrack_factor = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 10;
  double gradient_tolerance = 1e-3;  // on grad_inf_rel
  // Trial steps whose recovered map phi(1) has a Jacobian determinant at or
  // below this floor anywhere on the grid are rejected. Disabled when NaN.
  double jacobian_floor = 0.0;

  void validate() const;
};

struct CgResult {
  BandLimitedField solution;
  int iterations = 0;
  std::vector<double> residual_history;  // V-norms, starting with ||rhs||
  bool converged = false;
  bool negative_curvature = false;
};

using LinearOperator = std::function<BandLimitedField(const BandLimitedField&)>;

/// Conjugate gradients in the V inner product.
CgResult cg_solve(const LinearOperator& op, const BandLimitedField& rhs,
                  const SpectralOperators& ops, int max_iterations, double relative_tolerance);

struct ConvergenceRow {
  int iteration = 0;
  double energy = 0.0;
  double mse_rel = 0.0;       // percent
  double grad_inf_rel = 0.0;
  int cg_iterations = 0;
  double step = 0.0;
  double wall_time = 0.0;     // seconds since the run started
};

using ConvergenceRecord = std::vector<ConvergenceRow>;

struct Metrics {
  double mse_rel = 0.0;
  double grad_inf_norm = 0.0;
};

/// MSE_rel = 100 mse(m(1), I1) / mse(I0, I1) (0 when both vanish) and the
/// sup norm of iota(gradient) over all components.
Metrics metrics(const RegistrationProblem& problem, const GradientReport& report);

struct StepResult {
  BandLimitedField v0;
  GradientReport report;  // with gradient, at the returned v0
  int cg_iterations = 0;
  double step = 0.0;
  bool stalled = false;
  bool negative_curvature = false;
};

/// One Gauss-Newton-Krylov iteration from the gradient report at the current iterate.
StepResult step(const RegistrationProblem& problem, const GradientReport& current,
                const OptimizerConfig& config);

struct RunResult {
  BandLimitedField v0;
  GradientReport report;
  ConvergenceRecord record;
  bool stalled = false;
};

using RowSink = std::function<void(const ConvergenceRow&)>;

RunResult run(const RegistrationProblem& problem, const BandLimitedField& v0_init,
              const OptimizerConfig& config, const RowSink& sink = {});

}  // namespace geoshoot
