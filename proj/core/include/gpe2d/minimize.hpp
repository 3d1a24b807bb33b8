#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gpe2d/energy.hpp"

namespace gpe2d {

/// Knobs of the diagonal-Jacobian Newton solver and its continuation.
struct SolverConfig {
  int max_newton_iters = 20000;  // per continuation stage
  double grad_tol = 1e-8;        // projected-gradient 2-norm at the final stage
  double stage_tol = 1e-5;       // same, at intermediate stages
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 40;
  int continuation_steps_rho = 5;
  int continuation_steps_theta = 20;
  double diag_floor = 1e-12;
  int max_halvings = 6;

  void validate() const;
  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Starting modes (l1, l2) per component.
struct InitialGuess {
  std::array<std::array<int, 2>, 2> modes{};
  /// Restrict the iteration to the reflection parity of the guess along every
  /// axis on which all trap centers sit at 0. Without it, rounding noise in
  /// the symmetry-breaking modes grows and the iteration slides to a lower state.
  bool keep_parity = true;

  friend bool operator==(const InitialGuess&, const InitialGuess&) = default;
};

struct Solution {
  Fields fields;
  StateReport report;
  /// Set by solve_excited when the result reproduces the ground-state energy.
  bool collapsed_to_ground = false;
};

/// Throws NonConvergence carrying the final residual unless the report is converged.
void require_converged(const Solution& solution);

/// Lagrange multipliers: the chemical potentials at the current fields.
std::array<double, 2> update_multiplier(const Fields& fields, const SystemParams& params);
std::array<double, 2> update_multiplier(const DiscreteEnergy& energy, const Fields& fields);

/// Gradient of the Lagrangian E(phi) + sum_i lambda_i (N_i - |phi_i|^2).
CoeffPair lagrangian_gradient(const DiscreteEnergy& energy, const Fields& fields,
                              const std::array<double, 2>& multipliers);

/// Max-norm of the stationarity residual (lambda_k - lambda) phi_k + ... with lambda = mu.
double stationarity_residual(const DiscreteEnergy& energy, const Fields& fields);

struct StepResult {
  Fields fields;
  double step_size = 0.0;
  double merit_before = 0.0;
  double merit_after = 0.0;
};

/// One modified Newton step with the diagonal of the Lagrangian Hessian and
/// Armijo backtracking on the Lagrangian merit (multipliers frozen, trial
/// points renormalized before evaluation). Throws LineSearchFailure.
StepResult newton_step(const DiscreteEnergy& energy, const Fields& fields,
                       const std::array<double, 2>& multipliers, const SolverConfig& config);
StepResult newton_step(const Fields& fields, const SystemParams& params,
                       const std::array<double, 2>& multipliers, const SolverConfig& config);

/// rho ramps 0 -> 1 with theta = 0, then all theta_ij ramp jointly to their
/// targets. The theta ramp is omitted when the target coupling matrix is zero.
std::vector<SystemParams> continuation_schedule(const SystemParams& target, const SolverConfig& config);

/// Outcome of iterating at fixed parameters.
struct StageResult {
  Fields fields;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  /// Merit after every accepted step; nonincreasing up to round-off.
  std::vector<double> merit_history;
};

StageResult solve_stage(const DiscreteEnergy& energy, Fields fields, double tol, const SolverConfig& config);

/// Walks parameters linearly from `from` to `to`, warm-starting each solve.
/// A LineSearchFailure halves the increment and retries (up to
/// config.max_halvings times per target); intermediate points use
/// config.stage_tol and the end point uses `final_tol`.
struct PathResult {
  Fields fields;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  int halvings = 0;
};

PathResult continue_path(const BasisPtr& basis, const SystemParams& from, const SystemParams& to, Fields fields,
                         double final_tol, const SolverConfig& config);

/// Fills the report (energy parts, chemical potentials, overlap, residual)
/// for the given fields.
StateReport make_report(const DiscreteEnergy& energy, const Fields& fields, int iterations, bool converged);

/// Flips each component so that its largest-magnitude quartic-grid sample is positive.
void fix_sign(Fields& fields);

Solution solve_ground(const SystemParams& params, const BasisPtr& basis, const SolverConfig& config);

/// Continuation from the H_{l1,l2} modes given in `guess`. When `ground_energy`
/// is given, a result within 1e-6 (relative) of it is flagged as collapsed.
Solution solve_excited(const SystemParams& params, const BasisPtr& basis, const SolverConfig& config,
                       const InitialGuess& guess, std::optional<double> ground_energy = std::nullopt);

/// Continues an existing solution to new parameters (used for kappa sweeps).
Solution continue_solution(const Solution& start, const SystemParams& start_params, const SystemParams& target,
                           const BasisPtr& basis, const SolverConfig& config);

}  // namespace gpe2d
