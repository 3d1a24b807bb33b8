#include "gpe2d/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpe2d/errors.hpp"

namespace gpe2d {

namespace {

struct Eval {
  FieldSamples samples;
  EnergyBreakdown energy;
  double merit = 0.0;
};

double merit_of(const EnergyBreakdown& e, const Fields& f, const std::array<double, 2>& lambda) {
  double m = e.total;
  for (int i = 0; i < 2; ++i) m += lambda[i] * (f[i].target_mass() - f[i].mass());
  return m;
}

Eval evaluate(const DiscreteEnergy& energy, const Fields& fields, const std::array<double, 2>& lambda) {
  Eval ev;
  ev.samples = energy.sample(fields);
  ev.energy = energy.evaluate(fields, ev.samples);
  ev.merit = merit_of(ev.energy, fields, lambda);
  return ev;
}

CoeffPair projected(const CoeffPair& g, const Fields& fields, const std::array<double, 2>& lambda) {
  CoeffPair out;
  for (int i = 0; i < 2; ++i) out[i] = g[i] - 2.0 * lambda[i] * fields[i].coeffs();
  return out;
}

double norm2(const CoeffPair& p) { return std::sqrt(p[0].squaredNorm() + p[1].squaredNorm()); }

Fields normalized(Fields f) {
  for (auto& c : f) c = normalize(std::move(c));
  return f;
}

struct StepOutcome {
  Fields fields;
  Eval eval;
  double step = 0.0;
};

// Core of newton_step, reusing the caller's evaluation at the current point.
StepOutcome step_impl(const DiscreteEnergy& energy, const Fields& fields, const Eval& current,
                      const std::array<double, 2>& lambda, const CoeffPair& G, const CoeffPair& hdiag,
                      const SolverConfig& cfg, const CoeffPair* keep) {
  CoeffPair d;
  CoeffPair jabs;
  double slope = 0.0;
  for (int i = 0; i < 2; ++i) {
    const auto J = (hdiag[i].array() - 2.0 * lambda[i]);
    const auto mag = J.abs().max(cfg.diag_floor);
    jabs[i] = mag;
    const CoeffMatrix signed_j = (J < 0.0).select(-mag, mag);
    d[i] = -(G[i].array() / signed_j.array()).matrix();
    if (keep) d[i].array() *= (*keep)[i].array();
    slope += (G[i].array() * d[i].array()).sum();
  }
  if (slope >= 0.0) {
    // Negative curvature dominates: fall back to the descent direction.
    slope = 0.0;
    for (int i = 0; i < 2; ++i) {
      d[i] = -(G[i].array() / jabs[i].array()).matrix();
      if (keep) d[i].array() *= (*keep)[i].array();
      slope += (G[i].array() * d[i].array()).sum();
    }
  }
  if (slope == 0.0) return {fields, current, 1.0};

  double alpha = 1.0;
  for (int b = 0; b <= cfg.max_backtracks; ++b) {
    Fields trial = fields;
    for (int i = 0; i < 2; ++i) trial[i].coeffs() += alpha * d[i];
    bool finite = true;
    for (const auto& t : trial) finite = finite && t.coeffs().allFinite() && t.mass() > 0.0;
    if (finite) {
      trial = normalized(std::move(trial));
      Eval ev = evaluate(energy, trial, lambda);
      std::array<double, 2> dmass{};
      const double dE = energy.difference(fields, current.samples, trial, ev.samples, &dmass).total;
      const double dmerit = dE - lambda[0] * dmass[0] - lambda[1] * dmass[1];
      if (std::isfinite(dmerit) && dmerit <= cfg.armijo_c * alpha * slope)
        return {std::move(trial), std::move(ev), alpha};
    }
    alpha *= cfg.backtrack_factor;
  }
  throw LineSearchFailure("Armijo backtracking failed after " + std::to_string(cfg.max_backtracks) +
                          " reductions");
}

SystemParams interpolate(const SystemParams& from, const SystemParams& to, double s) {
  if (s >= 1.0) return to;
  SystemParams p = to;
  p.rho = from.rho + s * (to.rho - from.rho);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) p.theta[i][j] = from.theta[i][j] + s * (to.theta[i][j] - from.theta[i][j]);
  return p;
}

SystemParams linear_start(const SystemParams& target) {
  SystemParams p = target;
  p.rho = 0.0;
  p.theta = {};
  return p;
}

StageResult stage_impl(const DiscreteEnergy& energy, Fields fields, double tol, const SolverConfig& config,
                       const CoeffPair* keep) {
  fields = normalized(std::move(fields));
  StageResult r{fields, 0, 0.0, false, {}};
  std::array<double, 2> lambda{};
  Eval ev = evaluate(energy, fields, lambda);
  for (int it = 0;; ++it) {
    lambda = energy.chemical_potentials(fields, ev.energy, ev.samples);
    ev.merit = merit_of(ev.energy, fields, lambda);
    const CoeffPair G = projected(energy.gradient(fields, ev.samples), fields, lambda);
    r.residual = norm2(G);
    if (!std::isfinite(r.residual)) throw NumericalFailure("non-finite gradient during Newton iteration");
    if (r.residual <= tol) {
      r.converged = true;
      break;
    }
    if (it == config.max_newton_iters) break;
    const CoeffPair hdiag = energy.hessian_diagonal(ev.samples);
    auto step = step_impl(energy, fields, ev, lambda, G, hdiag, config, keep);
    fields = std::move(step.fields);
    ev = std::move(step.eval);
    r.merit_history.push_back(ev.merit);
    ++r.iterations;
  }
  r.fields = std::move(fields);
  return r;
}

PathResult path_impl(const BasisPtr& basis, const SystemParams& from, const SystemParams& to, Fields fields,
                     double final_tol, const SolverConfig& config, const CoeffPair* keep) {
  PathResult out{std::move(fields), 0, 0.0, false, 0};
  double done = 0.0;
  double ds = 1.0;
  int halvings = 0;
  while (done < 1.0) {
    const double s = std::min(1.0, done + ds);
    const bool end = s >= 1.0;
    const DiscreteEnergy energy(basis, interpolate(from, to, s));
    try {
      auto r = stage_impl(energy, out.fields, end ? final_tol : config.stage_tol, config, keep);
      out.fields = std::move(r.fields);
      out.iterations += r.iterations;
      out.residual = r.residual;
      out.converged = r.converged;
      done = s;
    } catch (const LineSearchFailure&) {
      if (halvings >= config.max_halvings) throw;
      ++halvings;
      ds *= 0.5;
    }
  }
  out.halvings = halvings;
  return out;
}

Solution solve_from(const SystemParams& params, const BasisPtr& basis, const SolverConfig& config, Fields fields,
                    const CoeffPair* keep) {
  params.validate();
  config.validate();
  require_quartic_exactness(basis->axis(0).quartic, basis->L1());
  require_quartic_exactness(basis->axis(1).quartic, basis->L2());

  const auto schedule = continuation_schedule(params, config);
  SystemParams prev = linear_start(params);
  int iterations = 0;
  bool converged = false;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const bool last = k + 1 == schedule.size();
    auto r = path_impl(basis, prev, schedule[k], std::move(fields), last ? config.grad_tol : config.stage_tol,
                       config, keep);
    fields = std::move(r.fields);
    iterations += r.iterations;
    converged = r.converged;
    prev = schedule[k];
  }
  fix_sign(fields);
  Solution sol{fields, {}, false};
  sol.report = make_report(DiscreteEnergy(basis, params), sol.fields, iterations, converged);
  return sol;
}

}  // namespace

void SolverConfig::validate() const {
  auto positive_int = [](int v, const char* key) {
    if (v < 1) throw InvalidParameter(key, "must be a positive integer");
  };
  positive_int(max_newton_iters, "max_newton_iters");
  positive_int(max_backtracks, "max_backtracks");
  positive_int(continuation_steps_rho, "continuation_steps_rho");
  positive_int(continuation_steps_theta, "continuation_steps_theta");
  if (max_halvings < 0) throw InvalidParameter("max_halvings", "must be nonnegative");
  if (!(grad_tol > 0.0)) throw InvalidParameter("grad_tol", "must be positive");
  if (!(stage_tol > 0.0)) throw InvalidParameter("stage_tol", "must be positive");
  if (!(diag_floor > 0.0)) throw InvalidParameter("diag_floor", "must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw InvalidParameter("armijo_c", "must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw InvalidParameter("backtrack_factor", "must lie in (0, 1)");
}

void require_converged(const Solution& solution) {
  if (!solution.report.converged)
    throw NonConvergence("solver did not reach the gradient tolerance", solution.report.residual_norm);
}

std::array<double, 2> update_multiplier(const DiscreteEnergy& energy, const Fields& fields) {
  return energy.chemical_potentials(fields);
}

std::array<double, 2> update_multiplier(const Fields& fields, const SystemParams& params) {
  return chemical_potentials(fields, params);
}

CoeffPair lagrangian_gradient(const DiscreteEnergy& energy, const Fields& fields,
                              const std::array<double, 2>& multipliers) {
  return projected(energy.gradient(fields), fields, multipliers);
}

double stationarity_residual(const DiscreteEnergy& energy, const Fields& fields) {
  const auto G = lagrangian_gradient(energy, fields, energy.chemical_potentials(fields));
  return 0.5 * std::max(G[0].cwiseAbs().maxCoeff(), G[1].cwiseAbs().maxCoeff());
}

StepResult newton_step(const DiscreteEnergy& energy, const Fields& fields,
                       const std::array<double, 2>& multipliers, const SolverConfig& config) {
  config.validate();
  const Eval current = evaluate(energy, fields, multipliers);
  const CoeffPair G = projected(energy.gradient(fields, current.samples), fields, multipliers);
  const CoeffPair hdiag = energy.hessian_diagonal(current.samples);
  auto out = step_impl(energy, fields, current, multipliers, G, hdiag, config, nullptr);
  return {std::move(out.fields), out.step, current.merit, out.eval.merit};
}

StepResult newton_step(const Fields& fields, const SystemParams& params, const std::array<double, 2>& multipliers,
                       const SolverConfig& config) {
  return newton_step(DiscreteEnergy(fields[0].basis_ptr(), params), fields, multipliers, config);
}

std::vector<SystemParams> continuation_schedule(const SystemParams& target, const SolverConfig& config) {
  config.validate();
  std::vector<SystemParams> out;
  SystemParams base = linear_start(target);
  for (int k = 1; k <= config.continuation_steps_rho; ++k) {
    SystemParams p = base;
    p.rho = k == config.continuation_steps_rho ? target.rho : target.rho * k / config.continuation_steps_rho;
    out.push_back(p);
  }
  const bool coupled = target.theta[0][0] != 0.0 || target.theta[1][1] != 0.0 || target.theta[0][1] != 0.0;
  if (coupled) {
    const SystemParams start = out.back();
    for (int k = 1; k <= config.continuation_steps_theta; ++k)
      out.push_back(interpolate(start, target, double(k) / config.continuation_steps_theta));
  }
  return out;
}

StageResult solve_stage(const DiscreteEnergy& energy, Fields fields, double tol, const SolverConfig& config) {
  return stage_impl(energy, std::move(fields), tol, config, nullptr);
}

PathResult continue_path(const BasisPtr& basis, const SystemParams& from, const SystemParams& to, Fields fields,
                         double final_tol, const SolverConfig& config) {
  return path_impl(basis, from, to, std::move(fields), final_tol, config, nullptr);
}

StateReport make_report(const DiscreteEnergy& energy, const Fields& fields, int iterations, bool converged) {
  StateReport rep;
  const auto s = energy.sample(fields);
  const auto e = energy.evaluate(fields, s);
  const auto mu = energy.chemical_potentials(fields, e, s);
  rep.energy = e.total;
  rep.energies_per_component = {e.component(0), e.component(1)};
  rep.chemical_potentials = mu;
  rep.overlap_integral = energy.overlap(s);
  rep.residual_norm = norm2(projected(energy.gradient(fields, s), fields, mu));
  rep.iterations = iterations;
  rep.converged = converged;
  return rep;
}

void fix_sign(Fields& fields) {
  for (auto& f : fields) {
    const Matrix v = values_on_quartic_grid(f);
    Eigen::Index r = 0, c = 0;
    v.cwiseAbs().maxCoeff(&r, &c);
    if (v(r, c) < 0.0) f.coeffs() = -f.coeffs();
  }
}

Solution solve_ground(const SystemParams& params, const BasisPtr& basis, const SolverConfig& config) {
  Fields start{CoefficientField::mode(basis, 0, 0, params.N[0]), CoefficientField::mode(basis, 0, 0, params.N[1])};
  return solve_from(params, basis, config, std::move(start), nullptr);
}

Solution solve_excited(const SystemParams& params, const BasisPtr& basis, const SolverConfig& config,
                       const InitialGuess& guess, std::optional<double> ground_energy) {
  for (int i = 0; i < 2; ++i) {
    const auto [l1, l2] = guess.modes[i];
    if (l1 < 0 || l1 >= basis->L1() || l2 < 0 || l2 >= basis->L2())
      throw InvalidParameter("modes", "initial-guess mode outside the basis");
  }
  Fields start{CoefficientField::mode(basis, guess.modes[0][0], guess.modes[0][1], params.N[0]),
               CoefficientField::mode(basis, guess.modes[1][0], guess.modes[1][1], params.N[1])};
  // Reflection x_j -> -x_j maps the problem to itself when every trap is
  // centered on that axis; the guess then fixes the parity of each component.
  std::optional<CoeffPair> keep;
  if (guess.keep_parity) {
    keep.emplace();
    for (int i = 0; i < 2; ++i) {
      (*keep)[i] = CoeffMatrix::Ones(basis->L1(), basis->L2());
      for (int j = 0; j < 2; ++j) {
        if (params.centers[0][j] != 0.0 || params.centers[1][j] != 0.0) continue;
        const int parity = guess.modes[i][j] % 2;
        for (int a = 0; a < basis->L1(); ++a)
          for (int b = 0; b < basis->L2(); ++b)
            if ((j == 0 ? a : b) % 2 != parity) (*keep)[i](a, b) = 0.0;
      }
    }
  }
  Solution sol = solve_from(params, basis, config, std::move(start), keep ? &*keep : nullptr);
  if (ground_energy) {
    const double tol = 1e-6 * std::max(1.0, std::abs(*ground_energy));
    sol.collapsed_to_ground = std::abs(sol.report.energy - *ground_energy) <= tol;
  }
  return sol;
}

Solution continue_solution(const Solution& start, const SystemParams& start_params, const SystemParams& target,
                           const BasisPtr& basis, const SolverConfig& config) {
  target.validate();
  config.validate();
  auto r = continue_path(basis, start_params, target, start.fields, config.grad_tol, config);
  fix_sign(r.fields);
  Solution sol{r.fields, {}, false};
  sol.report = make_report(DiscreteEnergy(basis, target), sol.fields, r.iterations, r.converged);
  return sol;
}

}  // namespace gpe2d
