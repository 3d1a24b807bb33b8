#include "gpe2d/segregation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "gpe2d/errors.hpp"
#include "gpe2d/io.hpp"

namespace gpe2d {

namespace {

std::vector<double> warm_points(double from, double to, int per_decade) {
  std::vector<double> out;
  double lo = from;
  if (lo <= 0.0) {
    lo = to * 1e-2;
    if (lo > 0.0) out.push_back(lo);
  }
  if (!(lo > 0.0) || to <= lo) return out;
  const int n = int(std::ceil(per_decade * std::log10(to / lo) - 1e-9));
  for (int j = 1; j < n; ++j) out.push_back(lo * std::pow(to / lo, double(j) / n));
  return out;
}

SweepRecord record_of(double kappa, const StateReport& r) {
  return {kappa, r.energy, r.overlap_integral, kappa * r.overlap_integral, r.chemical_potentials, r.converged};
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// 1 on the kept side, 0 beyond the split, C^1 ramp of the given width in between.
double mask_value(double x, double split, double width, int side) {
  const double t = side < 0 ? (split - x) / width : (x - split) / width;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return smoothstep(t);
}

// <H_k, m H_l> on one axis by composite Gauss-Legendre with panel edges at
// the ramp ends.
Matrix mask_matrix(const BasisSpec& spec, double split, double width, int side) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const double X = (std::sqrt(2.0 * spec.L + 1.0) + 10.0) / spec.beta;
  std::vector<double> edges{-X, X};
  for (double e : {split - width, split, split + width})
    if (e > -X && e < X) edges.push_back(e);
  std::sort(edges.begin(), edges.end());

  std::vector<double> xs, ws;
  const auto& ab = Rule::abscissa();
  const auto& wt = Rule::weights();
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const int panels = std::max(1, int(std::ceil((edges[k + 1] - edges[k]) / 0.25)));
    const double h = (edges[k + 1] - edges[k]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = edges[k] + (p + 0.5) * h;
      for (std::size_t q = 0; q < ab.size(); ++q) {
        xs.push_back(c + 0.5 * h * ab[q]);
        ws.push_back(0.5 * h * wt[q]);
        if (ab[q] != 0.0) {
          xs.push_back(c - 0.5 * h * ab[q]);
          ws.push_back(0.5 * h * wt[q]);
        }
      }
    }
  }
  Matrix H = hermite_function_values(spec, xs);  // L x n
  for (std::size_t q = 0; q < xs.size(); ++q)
    H.col(Eigen::Index(q)) *= std::sqrt(ws[q] * mask_value(xs[q], split, width, side));
  return H * H.transpose();
}

double fitted_exponent(const std::vector<SweepRecord>& fit) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : fit) {
    if (!(r.overlap > 0.0)) return -std::numeric_limits<double>::infinity();
    const double x = std::log(r.kappa), y = std::log(r.overlap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = double(fit.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::vector<SweepRecord> run_kappa_sweep(const SystemParams& base, const std::vector<double>& kappas,
                                         const BasisPtr& basis, const SolverConfig& config,
                                         const SweepOptions& options, std::vector<Fields>* states) {
  base.validate();
  config.validate();
  if (kappas.empty()) throw InvalidParameter("kappas", "empty kappa grid");
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    if (!std::isfinite(kappas[k]) || kappas[k] < 0.0) throw InvalidParameter("kappas", "must be finite and >= 0");
    if (k > 0 && !(kappas[k] > kappas[k - 1])) throw InvalidParameter("kappas", "must be strictly increasing");
  }
  if (options.points_per_decade < 1) throw InvalidParameter("points_per_decade", "must be >= 1");

  SolverConfig loose = config;
  loose.grad_tol = std::max(config.grad_tol, config.stage_tol);

  std::vector<SweepRecord> out;
  std::optional<Solution> current;
  SystemParams current_params = base;
  for (double kappa : kappas) {
    SystemParams target = base;
    target.set_coupling(kappa);
    std::optional<Solution> sol;
    if (!current) {
      sol = solve_ground(target, basis, config);
    } else {
      Solution s = *current;
      SystemParams sp = current_params;
      try {
        for (double kk : warm_points(current_params.coupling(), kappa, options.points_per_decade)) {
          SystemParams mid = base;
          mid.set_coupling(kk);
          s = continue_solution(s, sp, mid, basis, loose);
          sp = mid;
        }
        sol = continue_solution(s, sp, target, basis, config);
      } catch (const LineSearchFailure&) {
        Fields f = s.fields;
        sol = Solution{f, make_report(DiscreteEnergy(basis, target), f, 0, false), false};
      }
    }
    out.push_back(record_of(kappa, sol->report));
    if (states) states->push_back(sol->fields);
    current = std::move(sol);
    current_params = target;
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  using io::format_double;
  os << "kappa,energy,overlap,weighted_overlap,mu1,mu2,converged\n";
  for (const auto& r : records)
    os << format_double(r.kappa) << ',' << format_double(r.energy) << ',' << format_double(r.overlap) << ','
       << format_double(r.weighted_overlap) << ',' << format_double(r.mu[0]) << ',' << format_double(r.mu[1]) << ','
       << (r.converged ? 1 : 0) << '\n';
}

std::vector<SweepRecord> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "kappa,energy,overlap,weighted_overlap,mu1,mu2,converged")
    throw ParseError("sweep csv: bad header");
  std::vector<SweepRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw ParseError("sweep csv: expected 7 columns");
    std::array<double, 6> v{};
    for (int k = 0; k < 6; ++k) {
      char* end = nullptr;
      v[std::size_t(k)] = std::strtod(cells[std::size_t(k)].c_str(), &end);
      if (end == cells[std::size_t(k)].c_str() || *end != '\0') throw ParseError("sweep csv: bad number '" + cells[std::size_t(k)] + "'");
    }
    if (cells[6] != "0" && cells[6] != "1") throw ParseError("sweep csv: converged must be 0 or 1");
    out.push_back({v[0], v[1], v[2], v[3], {v[4], v[5]}, cells[6] == "1"});
  }
  return out;
}

SegregatedTrial build_segregated_trial(const SystemParams& params, const BasisPtr& basis, const SolverConfig& config,
                                       int split_axis, double split_coordinate, double width) {
  SystemParams free = params;
  free.set_coupling(0.0);
  return build_segregated_trial(params, solve_ground(free, basis, config).fields, split_axis, split_coordinate,
                                width);
}

SegregatedTrial build_segregated_trial(const SystemParams& params, const Fields& uncoupled, int split_axis,
                                       double split_coordinate, double width) {
  params.validate();
  if (split_axis != 0 && split_axis != 1) throw InvalidParameter("split_axis", "must be 0 or 1");
  if (!std::isfinite(split_coordinate)) throw InvalidParameter("split_coordinate", "must be finite");
  if (!(width > 0.0)) throw InvalidParameter("width", "must be positive");
  const double c0 = params.centers[0][std::size_t(split_axis)];
  const double c1 = params.centers[1][std::size_t(split_axis)];
  std::array<int, 2> side{-1, 1};
  if (c0 != c1) {
    if ((c0 - split_coordinate) * (c1 - split_coordinate) > 0.0)
      throw InvalidParameter("split_coordinate", "split does not separate the trap centers");
    side = c0 < c1 ? std::array{-1, 1} : std::array{1, -1};
  }

  const auto& basis = uncoupled[0].basis_ptr();
  const BasisSpec& spec = basis->spec(split_axis);
  SegregatedTrial trial{uncoupled, 0.0, 0.0, 0.0};
  for (int i = 0; i < 2; ++i) {
    const Matrix M = mask_matrix(spec, split_coordinate, width, side[std::size_t(i)]);
    CoeffMatrix c = split_axis == 0 ? CoeffMatrix(M * uncoupled[i].coeffs()) : CoeffMatrix(uncoupled[i].coeffs() * M);
    const double n = params.N[std::size_t(i)];
    if (c.squaredNorm() < 1e-3 * n) throw MaskCollapse("masked mass below 1e-3 N: split misplaced");
    trial.fields[i] = normalize(CoefficientField(basis, std::move(c), n));
  }
  const DiscreteEnergy energy(basis, params);
  const auto s = energy.sample(trial.fields);
  trial.energy = energy.evaluate(trial.fields, s).uncoupled();
  trial.overlap = energy.overlap(s);
  const double m0 = s.quartic[0].cwiseAbs().maxCoeff();
  const double m1 = s.quartic[1].cwiseAbs().maxCoeff();
  trial.product_ratio = (s.quartic[0].array() * s.quartic[1].array()).abs().maxCoeff() / (m0 * m1);
  return trial;
}

LimitReport check_limit_properties(const std::vector<SweepRecord>& records, const SegregatedTrial& trial,
                                   const SystemParams& params) {
  if (records.size() < 3) throw PreconditionViolation("limit checks need at least 3 records");
  double kmin = std::numeric_limits<double>::infinity(), kmax = 0.0;
  for (const auto& r : records) {
    if (r.kappa > 0.0) kmin = std::min(kmin, r.kappa);
    kmax = std::max(kmax, r.kappa);
  }
  if (!(kmax >= 100.0 * kmin * (1.0 - 1e-12)))
    throw PreconditionViolation("limit checks need kappas spanning at least two decades");

  LimitReport rep;
  rep.energies_nondecreasing = true;
  for (std::size_t k = 1; k < records.size(); ++k)
    if (records[k].energy < records[k - 1].energy - 1e-7) {
      rep.energies_nondecreasing = false;
      rep.failures.push_back("(a) energy decreases from kappa=" + io::format_double(records[k - 1].kappa) +
                             " to kappa=" + io::format_double(records[k].kappa));
    }

  rep.below_trial = true;
  for (const auto& r : records)
    if (r.energy > trial.energy + 1e-6 || r.weighted_overlap > trial.energy + 1e-6) {
      rep.below_trial = false;
      rep.failures.push_back("(b) kappa=" + io::format_double(r.kappa) + " exceeds the segregated trial energy " +
                             io::format_double(trial.energy));
    }

  std::vector<SweepRecord> fit;
  for (const auto& r : records)
    if (r.kappa >= kmax / 10.0) fit.push_back(r);
  for (auto it = records.rbegin(); fit.size() < 2 && it != records.rend(); ++it)
    if (it->kappa < kmax / 10.0 && it->kappa > 0.0) fit.insert(fit.begin(), *it);
  rep.overlap_exponent = fitted_exponent(fit);
  rep.overlap_decays = rep.overlap_exponent <= -0.5;
  if (!rep.overlap_decays)
    rep.failures.push_back("(c) overlap exponent " + io::format_double(rep.overlap_exponent) + " above -0.5");

  rep.mu_bounded = true;
  for (int i = 0; i < 2; ++i) {
    rep.mu_bound[std::size_t(i)] = 2.0 * trial.energy / params.N[std::size_t(i)];
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) m = std::max(m, r.mu[std::size_t(i)]);
    rep.max_mu[std::size_t(i)] = m;
    if (!std::isfinite(m) || !(m < rep.mu_bound[std::size_t(i)])) {
      rep.mu_bounded = false;
      rep.failures.push_back("(d) mu" + std::to_string(i + 1) + " max " + io::format_double(m) + " not below " +
                             io::format_double(rep.mu_bound[std::size_t(i)]));
    }
  }
  return rep;
}

void require_all(const LimitReport& report) {
  if (report.all()) return;
  std::string msg = "limit properties violated:";
  for (const auto& f : report.failures) msg += "\n  " + f;
  throw PropertyViolation(msg);
}

}  // namespace gpe2d
