#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "gpe2d/minimize.hpp"

namespace gpe2d {

struct SweepRecord {
  double kappa = 0.0;
  double energy = 0.0;
  double overlap = 0.0;
  double weighted_overlap = 0.0;  // kappa * overlap
  std::array<double, 2> mu{};
  bool converged = false;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct SweepOptions {
  /// Unrecorded warm-start points inserted between consecutive kappas.
  int points_per_decade = 8;
};

/// Ground states along increasing inter-species couplings, each warm-started
/// from the previous one. Records that fail to converge are flagged and the
/// sweep continues. The final fields per record go to `states` when given.
std::vector<SweepRecord> run_kappa_sweep(const SystemParams& base, const std::vector<double>& kappas,
                                         const BasisPtr& basis, const SolverConfig& config,
                                         const SweepOptions& options = {}, std::vector<Fields>* states = nullptr);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_sweep_csv(std::istream& is);

struct SegregatedTrial {
  Fields fields;
  /// E_infinity of the trial: the energy without the inter-species term.
  double energy = 0.0;
  /// max |phi1 phi2| / (max |phi1| max |phi2|) on the quartic grid.
  double product_ratio = 0.0;
  double overlap = 0.0;
};

/// Masks each component's uncoupled ground state to its own side of the
/// line x_axis = coordinate with a C^1 ramp of the given width, projects the
/// result back onto the basis and renormalizes. Component 1 keeps the lower
/// side when the centers agree along the axis. Throws MaskCollapse when less
/// than 1e-3 N_i survives the mask.
SegregatedTrial build_segregated_trial(const SystemParams& params, const BasisPtr& basis, const SolverConfig& config,
                                       int split_axis, double split_coordinate, double width = 1.0);

/// Same, starting from given uncoupled fields instead of solving for them.
SegregatedTrial build_segregated_trial(const SystemParams& params, const Fields& uncoupled, int split_axis,
                                       double split_coordinate, double width = 1.0);

struct LimitReport {
  bool energies_nondecreasing = false;
  bool below_trial = false;
  bool overlap_decays = false;
  bool mu_bounded = false;
  double overlap_exponent = 0.0;
  std::array<double, 2> max_mu{};
  std::array<double, 2> mu_bound{};
  std::vector<std::string> failures;

  bool all() const { return energies_nondecreasing && below_trial && overlap_decays && mu_bounded; }
};

/// Checks a sweep against the strong-coupling limit: (a) energies
/// nondecreasing within 1e-7, (b) every energy and every kappa-weighted
/// overlap at most trial.energy + 1e-6,
/// (c) overlap ~ kappa^p with p <= -0.5 over the top decade, (d) mu_i below
/// 2 trial.energy / N_i. Needs at least 3 records spanning 2 decades.
LimitReport check_limit_properties(const std::vector<SweepRecord>& records, const SegregatedTrial& trial,
                                   const SystemParams& params);

/// Throws PropertyViolation listing every failed clause.
void require_all(const LimitReport& report);

}  // namespace gpe2d
