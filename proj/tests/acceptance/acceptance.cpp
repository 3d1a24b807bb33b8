// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../unit/oracles.hpp"
#include "gpe2d/basis.hpp"
#include "gpe2d/errors.hpp"
#include "gpe2d/minimize.hpp"
#include "gpe2d/segregation.hpp"
#include "gpe2d/thomasfermi.hpp"

using namespace gpe2d;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& o, bool ok, const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += buf;
  if (!ok) {
    o.pass = false;
    o.detail += " [x]";
  }
}

// Converged states collected for the mass and mu-identity criterion.
struct RunRecord {
  std::string label;
  SystemParams params;
  BasisPtr basis;
  Fields fields;
};
std::vector<RunRecord> converged_runs;

void keep(const std::string& label, const SystemParams& p, const BasisPtr& b, const Fields& f) {
  converged_runs.push_back({label, p, b, f});
}

SystemParams system_of(double t11, double t22, double t12) {
  SystemParams p;
  p.theta = {{{t11, t12}, {t12, t22}}};
  return p;
}

int sign_changes(const Matrix& row, double threshold) {
  int n = 0, last = 0;
  for (Eigen::Index k = 0; k < row.size(); ++k) {
    const double v = row(k);
    if (std::abs(v) < threshold) continue;
    const int s = v > 0 ? 1 : -1;
    if (last && s != last) ++n;
    last = s;
  }
  return n;
}

Outcome criterion1() {
  Outcome o;
  const auto b = make_basis({16, 1.0}, {16, 1.0});
  const SystemParams p;
  const auto sol = solve_ground(p, b, SolverConfig{});
  note(o, sol.report.converged, "converged=%d", int(sol.report.converged));
  for (int i = 0; i < 2; ++i) {
    const double e = sol.report.energies_per_component[i], mu = sol.report.chemical_potentials[i];
    const double c00 = sol.fields[i].coeffs()(0, 0);
    const double off = sol.fields[i].mass() - c00 * c00;
    note(o, std::abs(e - 1.0) <= 1e-8, "E%d-1=%.1e", i + 1, e - 1.0);
    note(o, std::abs(mu - 1.0) <= 1e-8, "mu%d-1=%.1e", i + 1, mu - 1.0);
    note(o, off < 1e-12, "off-mode mass %.1e", off);
  }
  if (sol.report.converged) keep("criterion 1", p, b, sol.fields);
  return o;
}

Outcome criterion2() {
  Outcome o;
  double worst_moment = 0.0;
  for (int L : {4, 8, 16, 32}) {
    const auto rule = gauss_hermite_rule(BasisSpec{L, 1.0});
    for (int p = 0; p <= 4 * L - 3; p += 2) {
      double s = 0.0;
      for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weights[k] * std::pow(rule.nodes[k], p);
      const double ref = oracle::gaussian_moment(p, 2.0);
      worst_moment = std::max(worst_moment, std::abs(s - ref) / ref);
    }
  }
  note(o, worst_moment <= 1e-9, "max moment rel err %.2e over L=4,8,16,32", worst_moment);

  std::mt19937_64 rng(2024);
  double worst_gram = 0.0;
  const int Ls[] = {4, 8, 16, 32};
  for (int t = 0; t < 100; ++t) {
    const int L = Ls[t % 4];
    const AxisBasis axis(BasisSpec{L, 1.0});
    std::uniform_int_distribution<int> pick(0, L - 1);
    const int a = pick(rng), bb = pick(rng), c = pick(rng), d = pick(rng);
    double q = 0.0;
    for (std::size_t k = 0; k < axis.quartic.size(); ++k) {
      const auto K = Eigen::Index(k);
      q += axis.quartic.plain_weights[k] * axis.quartic_values(a, K) * axis.quartic_values(bb, K) *
           axis.quartic_values(c, K) * axis.quartic_values(d, K);
    }
    const double ref = oracle::trapezoid(
        [&](double x) {
          return oracle::hermite_function(a, 1.0, x) * oracle::hermite_function(bb, 1.0, x) *
                 oracle::hermite_function(c, 1.0, x) * oracle::hermite_function(d, 1.0, x);
        },
        14.0, 4000);
    worst_gram = std::max(worst_gram, std::abs(q - ref));
  }
  note(o, worst_gram <= 1e-8, "max Gram err vs 4000-pt trapezoid %.2e (100 tuples)", worst_gram);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto b = make_basis({10, 1.0}, {10, 1.0});
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> th(0.0, 100.0), kap(0.0, 50.0), cen(-1.5, 1.5);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    SystemParams p = system_of(th(rng), th(rng), kap(rng));
    p.centers = {{{cen(rng), cen(rng)}, {cen(rng), cen(rng)}}};
    const Fields f{oracle::random_field(b, 1.0, rng), oracle::random_field(b, 1.0, rng)};
    const DiscreteEnergy en(b, p);
    const auto g = en.gradient(f);
    double err = 0.0, gmax = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 10; ++a)
        for (int c = 0; c < 10; ++c) {
          const double h = 1e-5;
          Fields fp = f, fm = f;
          fp[i].coeffs()(a, c) += h;
          fm[i].coeffs()(a, c) -= h;
          const double fd = (en.evaluate(fp).total - en.evaluate(fm).total) / (2 * h);
          err = std::max(err, std::abs(fd - g[i](a, c)));
          gmax = std::max(gmax, std::abs(g[i](a, c)));
        }
    worst = std::max(worst, err / gmax);
  }
  note(o, worst <= 1e-6, "max rel err %.2e over 100 states", worst);
  return o;
}

Outcome criterion4() {
  Outcome o;
  const SystemParams p = system_of(400.0, 400.0, 0.0);
  const double exact = std::sqrt(400.0 / M_PI);
  const auto mu_tf = tf_solve_mu(p);
  note(o, std::abs(mu_tf[0] - exact) <= 1e-8, "TF mu=%.10f (err %.1e)", mu_tf[0], mu_tf[0] - exact);
  const auto b = make_basis({40, 1.0}, {40, 1.0});
  const auto sol = solve_ground(p, b, SolverConfig{});
  const double mu = sol.report.chemical_potentials[0];
  const double rel = std::abs(mu - mu_tf[0]) / mu_tf[0];
  note(o, sol.report.converged, "converged=%d after %d iterations", int(sol.report.converged), sol.report.iterations);
  note(o, rel <= 0.05, "spectral mu=%.6f, rel diff %.3f%%", mu, 100 * rel);
  if (sol.report.converged) keep("criterion 4", p, b, sol.fields);
  return o;
}

Outcome criterion5() {
  Outcome o;
  const std::pair<double, OverlapClass> cases[] = {
      {6.0, OverlapClass::NoOverlap}, {2.0, OverlapClass::PartialOverlap}, {0.0, OverlapClass::FullOverlap}};
  for (const auto& [c, expected] : cases) {
    SystemParams p = system_of(400.0, 200.0, 100.0);
    p.centers = {{{c, 0.0}, {-c, 0.0}}};
    const auto g = tf_geometry(p, tf_solve_mu(p));
    note(o, g.overlap.cls == expected, "+-%g: %s (mu %.5f, %.5f)", c, to_string(g.overlap.cls), g.mu[0], g.mu[1]);
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const SystemParams base = system_of(400.0, 150.0, 0.0);
  const auto b = make_basis({32, 1.0}, {32, 1.0});
  const std::vector<double> kappas{1.0, 10.0, 100.0, 1200.0};
  std::vector<Fields> states;
  const auto rec = run_kappa_sweep(base, kappas, b, SolverConfig{}, {}, &states);
  const auto trial = build_segregated_trial(base, b, SolverConfig{}, 0, 0.0);

  bool all_converged = true;
  double worst_drop = 0.0;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    all_converged = all_converged && rec[k].converged;
    if (k) worst_drop = std::max(worst_drop, rec[k - 1].energy - rec[k].energy);
  }
  note(o, all_converged, "all records converged=%d", int(all_converged));
  note(o, worst_drop <= 1e-7, "E = %.6f, %.6f, %.6f, %.6f (max decrease %.1e)", rec[0].energy, rec[1].energy,
       rec[2].energy, rec[3].energy, std::max(worst_drop, 0.0));
  const double ratio = rec.back().overlap / rec.front().overlap;
  note(o, ratio <= 0.1, "overlap(1200)/overlap(1)=%.4f", ratio);
  double worst_gap = -1e300;
  for (const auto& r : rec) worst_gap = std::max(worst_gap, r.energy - trial.energy);
  note(o, worst_gap <= 0.0, "trial energy %.4f, max c_k - trial %.4f", trial.energy, worst_gap);

  // Qualitative structure of the most segregated state on the export grid.
  const Grid2D grid{};
  const Matrix u = synthesize_on_grid(states.back()[0], grid), v = synthesize_on_grid(states.back()[1], grid);
  const Matrix u2 = u.array().square(), v2 = v.array().square();
  Eigen::Index r1, c1, r2, c2;
  u2.maxCoeff(&r1, &c1);
  v2.maxCoeff(&r2, &c2);
  const double d1 = std::hypot(grid.x(int(c1)), grid.y(int(r1))), d2 = std::hypot(grid.x(int(c2)), grid.y(int(r2)));
  const double shared = (u2.array() * v2.array()).sum() / std::sqrt(u2.array().square().sum() * v2.array().square().sum());
  note(o, std::abs(d1 - d2) > 1.0, "peak radii %.2f / %.2f, normalized grid overlap %.3f", d1, d2, shared);

  const auto lim = check_limit_properties(rec, trial, base);
  std::printf("  limit properties: %s, overlap exponent %.3f\n", lim.all() ? "all hold" : "violated",
              lim.overlap_exponent);
  for (std::size_t k = 0; k < rec.size(); ++k) {
    SystemParams p = base;
    p.set_coupling(rec[k].kappa);
    if (rec[k].converged) keep("criterion 6 kappa=" + std::to_string(int(rec[k].kappa)), p, b, states[k]);
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  const SystemParams p = system_of(50.0, 5.0, 0.0);
  const auto b = make_basis({32, 1.0}, {32, 1.0});
  const auto ground = solve_ground(p, b, SolverConfig{});
  const InitialGuess guess{{{{1, 0}, {0, 0}}}};
  const auto ex = solve_excited(p, b, SolverConfig{}, guess, ground.report.energy);
  note(o, ex.report.converged && ground.report.converged, "converged=%d", int(ex.report.converged));
  note(o, ex.report.energy > ground.report.energy && !ex.collapsed_to_ground, "E_excited=%.6f > E_ground=%.6f",
       ex.report.energy, ground.report.energy);
  const Grid2D grid{};
  const int mid = grid.ny / 2;
  for (int i = 0; i < 2; ++i) {
    const Matrix row = synthesize_on_grid(ex.fields[i], grid).row(mid);
    const double peak = row.cwiseAbs().maxCoeff();
    const int n = sign_changes(row, 1e-2 * peak);
    const int raw = sign_changes(row, 0.0);
    const int expected = i == 0 ? 1 : 0;
    note(o, n == expected, "phi%d mid-row sign changes %d (|v| >= 1%% of peak; %d counting tail ripple)", i + 1, n,
         raw);
  }
  if (ground.report.converged) keep("criterion 7 ground", p, b, ground.fields);
  if (ex.report.converged) keep("criterion 7 excited", p, b, ex.fields);
  return o;
}

Outcome criterion8() {
  Outcome o;
  double worst_mass = 0.0, worst_identity = 0.0, worst_equation = 0.0;
  for (const auto& r : converged_runs) {
    const DiscreteEnergy en(r.basis, r.params);
    const auto mu = en.chemical_potentials(r.fields);
    const auto g = en.gradient(r.fields);
    for (int i = 0; i < 2; ++i) {
      const auto& c = r.fields[i].coeffs();
      worst_mass = std::max(worst_mass, std::abs(r.fields[i].mass() - r.params.N[i]));
      const double proj = (g[i].array() * c.array()).sum() / (2 * r.fields[i].mass());
      worst_identity = std::max(worst_identity, std::abs(proj - mu[i]) / std::abs(mu[i]));
      worst_equation = std::max(worst_equation, (0.5 * g[i] - mu[i] * c).norm() / (std::abs(mu[i]) * c.norm()));
    }
  }
  note(o, !converged_runs.empty(), "%zu converged runs from criteria 1, 4, 6, 7", converged_runs.size());
  note(o, worst_mass <= 1e-10, "max |mass - N| %.1e", worst_mass);
  note(o, worst_identity <= 1e-8, "mu identity rel err %.1e", worst_identity);
  note(o, worst_equation <= 1e-8, "stationary equation rel residual %.1e", worst_equation);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "linear limit exactness", 5, criterion1},
      {2, "quadrature exactness", 10, criterion2},
      {3, "gradient correctness", 30, criterion3},
      {4, "TF chemical potential", 120, criterion4},
      {5, "overlap taxonomy", 30, criterion5},
      {6, "segregation sweep", 600, criterion6},
      {7, "excited-state structure", 120, criterion7},
      {8, "mass conservation and mu identity", 60, criterion8},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %d (%s): %s  %s; %.2f s (limit %.0f s)%s\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.limit_seconds, in_time ? "" : " [x]");
    std::fflush(stdout);
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed ? 1 : 0;
}
