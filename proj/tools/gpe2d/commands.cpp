#include "gpe2d/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gpe2d/errors.hpp"
#include "gpe2d/io.hpp"
#include "gpe2d/thomasfermi.hpp"

namespace gpe2d::cli {

namespace fs = std::filesystem;

namespace {

template <class Fn>
void parallel_chunks(int n, unsigned threads, Fn fn) {
  const int t = std::max(1, std::min<int>(int(threads), n));
  if (t == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::jthread> pool;
  for (int k = 0; k < t; ++k) {
    const int a = n * k / t, b = n * (k + 1) / t;
    pool.emplace_back([=] { fn(a, b); });
  }
}

Matrix export_field(const CoefficientField& f, const Grid2D& grid, unsigned threads) {
  grid.validate();
  std::vector<double> xs(std::size_t(grid.nx)), ys(std::size_t(grid.ny));
  for (int i = 0; i < grid.nx; ++i) xs[std::size_t(i)] = grid.x(i);
  for (int j = 0; j < grid.ny; ++j) ys[std::size_t(j)] = grid.y(j);
  const Matrix left = hermite_function_values(f.basis().spec(1), ys).transpose() * f.coeffs().transpose();
  Matrix out(grid.ny, grid.nx);
  parallel_chunks(grid.nx, threads, [&](int a, int b) {
    const std::vector<double> part(xs.begin() + a, xs.begin() + b);
    out.middleCols(a, b - a) = left * hermite_function_values(f.basis().spec(0), part);
  });
  return out;
}

void write_state(const fs::path& dir, const std::string& prefix, const Fields& fields, const Grid2D& grid) {
  const unsigned threads = export_threads();
  for (int i = 0; i < 2; ++i) {
    const std::string n = std::to_string(i + 1);
    io::write_coefficients(dir / (prefix + n + ".coeffs"), fields[i]);
    io::write_grid(dir / (prefix + n + ".grid"), grid, i + 1, export_field(fields[i], grid, threads));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw NumericalFailure("cannot write " + path.string());
  out << text;
}

fs::path prepare_dir(const RunConfig& c) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

BasisPtr basis_of(const RunConfig& c) { return make_basis(c.basis_x, c.basis_y); }

void print_report(const char* what, const StateReport& r) {
  std::printf("%s: energy %.12g  mu %.12g %.12g  overlap %.6g  residual %.3g  iterations %d  %s\n", what, r.energy,
              r.chemical_potentials[0], r.chemical_potentials[1], r.overlap_integral, r.residual_norm, r.iterations,
              r.converged ? "converged" : "NOT converged");
}

}  // namespace

unsigned export_threads() {
  const char* env = std::getenv("GPE2D_THREADS");
  long n = 0;
  if (env && *env) {
    char* end = nullptr;
    n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 0) throw InvalidParameter("GPE2D_THREADS", "must be a nonnegative integer");
  }
  if (n == 0) return std::max(1u, std::thread::hardware_concurrency());
  return unsigned(n);
}

int cmd_solve(const RunConfig& c) {
  const auto basis = basis_of(c);
  const Solution sol = solve_ground(c.system, basis, c.solver);
  const fs::path dir = prepare_dir(c);
  write_state(dir, "phi", sol.fields, c.grid);
  write_text(dir / "report.json", io::report_to_json(sol.report));
  print_report("ground state", sol.report);
  return sol.report.converged ? kOk : kNonConvergence;
}

int cmd_excited(const RunConfig& c) {
  const auto basis = basis_of(c);
  const Solution ground = solve_ground(c.system, basis, c.solver);
  const Solution sol = solve_excited(c.system, basis, c.solver, c.excited, ground.report.energy);
  const fs::path dir = prepare_dir(c);
  write_state(dir, "phi", sol.fields, c.grid);
  write_text(dir / "report.json", io::report_to_json(sol.report));
  nlohmann::json extra;
  extra["modes"] = {{c.excited.modes[0][0], c.excited.modes[0][1]}, {c.excited.modes[1][0], c.excited.modes[1][1]}};
  extra["keep_parity"] = c.excited.keep_parity;
  extra["ground_energy"] = ground.report.energy;
  extra["collapsed_to_ground"] = sol.collapsed_to_ground;
  write_text(dir / "excited.json", extra.dump(2) + "\n");
  print_report("excited state", sol.report);
  if (sol.collapsed_to_ground) std::fprintf(stderr, "warning: excited run collapsed onto the ground state\n");
  return sol.report.converged ? kOk : kNonConvergence;
}

int cmd_tf(const RunConfig& c) {
  const Pair mu = tf_solve_mu(c.system);
  const TFGeometry g = tf_geometry(c.system, mu);
  const fs::path dir = prepare_dir(c);
  {
    std::ofstream out(dir / "tf_report.txt");
    write_tf_report(out, g);
  }
  const unsigned threads = export_threads();
  for (int i = 0; i < 2; ++i) {
    Matrix v(c.grid.ny, c.grid.nx);
    parallel_chunks(c.grid.ny, threads, [&](int a, int b) {
      for (int j = a; j < b; ++j)
        for (int k = 0; k < c.grid.nx; ++k) v(j, k) = tf_density(g, c.system, i, c.grid.x(k), c.grid.y(j));
    });
    io::write_grid(dir / ("tf" + std::to_string(i + 1) + ".grid"), c.grid, i + 1, v);
  }
  write_tf_report(std::cout, g);
  return kOk;
}

int cmd_sweep(const RunConfig& c) {
  if (c.kappas.empty()) throw InvalidParameter("kappas", "empty kappa grid");
  const auto basis = basis_of(c);
  std::vector<Fields> states;
  const auto records = run_kappa_sweep(c.system, c.kappas, basis, c.solver, c.sweep, &states);
  const fs::path dir = prepare_dir(c);
  {
    std::ofstream out(dir / "sweep.csv");
    write_sweep_csv(out, records);
  }
  write_state(dir, "sweep_last_phi", states.back(), c.grid);
  write_sweep_csv(std::cout, records);
  const bool all = std::all_of(records.begin(), records.end(), [](const SweepRecord& r) { return r.converged; });
  return all ? kOk : kNonConvergence;
}

int cmd_quadcheck(const RunConfig& c) {
  bool ok = true;
  for (const BasisSpec& spec : {c.basis_x, c.basis_y}) {
    const AxisBasis axis(spec);
    const auto quartic = check_moments(axis.quartic, 4 * spec.L - 3);
    const auto quadratic = check_moments(axis.quadratic, 2 * spec.L);
    std::printf("L=%d beta=%.17g\n", spec.L, spec.beta);
    std::printf("  quartic rule:   %zu nodes, even moments to degree %d, max rel error %.3e\n", axis.quartic.size(),
                quartic.max_degree, quartic.max_relative_error);
    std::printf("  quadratic rule: %zu nodes, even moments to degree %d, max rel error %.3e\n", axis.quadratic.size(),
                quadratic.max_degree, quadratic.max_relative_error);
    ok = ok && quartic.max_relative_error <= 1e-9 && quadratic.max_relative_error <= 1e-9;
  }
  std::printf("%s\n", ok ? "quadrature exact" : "quadrature NOT exact");
  return ok ? kOk : kNumericalFailure;
}

int run(const Invocation& inv) {
  try {
    RunConfig c = inv.config ? load_run_config(*inv.config) : RunConfig{};
    if (inv.out) c.out_dir = inv.out->string();
    if (inv.kappas) c.kappas = parse_double_list(*inv.kappas, "kappas");
    if (inv.modes) {
      const auto v = parse_double_list(*inv.modes, "modes");
      if (v.size() != 2 && v.size() != 4) throw InvalidParameter("modes", "expected l1,l2 or l1,l2,l1,l2");
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] != double(int(v[k]))) throw InvalidParameter("modes", "mode indices must be integers");
        c.excited.modes[k / 2][k % 2] = int(v[k]);
      }
    }
    c.validate();
    if (inv.command == "solve") return cmd_solve(c);
    if (inv.command == "excited") return cmd_excited(c);
    if (inv.command == "tf") return cmd_tf(c);
    if (inv.command == "sweep") return cmd_sweep(c);
    if (inv.command == "quadcheck") return cmd_quadcheck(c);
    throw InvalidParameter("command", "unknown command '" + inv.command + "'");
  } catch (const InvalidParameter& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const UnsupportedAnisotropy& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "not converged: %s (residual %.3g)\n", e.what(), e.residual());
    return kNonConvergence;
  } catch (const SingularCoupling& e) {
    std::fprintf(stderr, "singular coupling: %s\n", e.what());
    return kSingularCoupling;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericalFailure;
  }
}

}  // namespace gpe2d::cli
