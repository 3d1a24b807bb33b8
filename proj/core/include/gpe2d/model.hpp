#pragma once

#include <array>
#include <utility>

#include <Eigen/Core>

#include "gpe2d/basis.hpp"

namespace gpe2d {

/// Physical parameters of the coupled two-component system (hbar = 1).
///
/// Index convention: `omega[i][j]` and `centers[i][j]` refer to component i
/// along axis j, both zero-based.
struct SystemParams {
  std::array<double, 2> m{1.0, 1.0};
  std::array<std::array<double, 2>, 2> theta{};  // symmetric, theta[0][1] is the inter-species coupling
  std::array<std::array<double, 2>, 2> omega{{{1.0, 1.0}, {1.0, 1.0}}};
  std::array<std::array<double, 2>, 2> centers{};
  std::array<double, 2> N{1.0, 1.0};
  double rho = 1.0;

  /// Inter-species coupling (kappa).
  double coupling() const noexcept { return theta[0][1]; }
  void set_coupling(double kappa) noexcept { theta[0][1] = theta[1][0] = kappa; }

  /// Throws InvalidParameter naming the first offending key.
  void validate() const;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Trap potential V_i at a point.
double potential_value(const SystemParams& params, int component, double x1, double x2);

using CoeffMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Hermite coefficients of one component, stored as an L1 x L2 row-major
/// matrix so the flat data is in (l1, l2) order with l1 the slow index.
class CoefficientField {
 public:
  CoefficientField(BasisPtr basis, double target_mass);
  CoefficientField(BasisPtr basis, CoeffMatrix coeffs, double target_mass);

  /// Unit-mass-scaled single mode H_{l1,l2} carrying the whole target mass.
  static CoefficientField mode(BasisPtr basis, int l1, int l2, double target_mass);

  const TensorBasis2D& basis() const noexcept { return *basis_; }
  const BasisPtr& basis_ptr() const noexcept { return basis_; }
  const CoeffMatrix& coeffs() const noexcept { return coeffs_; }
  CoeffMatrix& coeffs() noexcept { return coeffs_; }
  double target_mass() const noexcept { return target_mass_; }

  /// Parseval mass: sum of squared coefficients.
  double mass() const { return coeffs_.squaredNorm(); }

 private:
  BasisPtr basis_;
  CoeffMatrix coeffs_;
  double target_mass_;
};

/// Scales the coefficients so that their squared sum equals the target mass.
/// Throws DegenerateState for an all-zero field.
CoefficientField normalize(CoefficientField field);

/// Field values on the quartic-rule tensor grid (n1 x n2, node-major).
Matrix values_on_quartic_grid(const CoefficientField& field);
/// Field values on the quadratic-rule tensor grid.
Matrix values_on_quadratic_grid(const CoefficientField& field);

/// Uniform rectangular lattice with inclusive end points.
struct Grid2D {
  double x0 = -11.0, x1 = 11.0;
  int nx = 201;
  double y0 = -11.0, y1 = 11.0;
  int ny = 201;

  void validate() const;
  double x(int i) const { return nx == 1 ? x0 : x0 + (x1 - x0) * i / (nx - 1); }
  double y(int j) const { return ny == 1 ? y0 : y0 + (y1 - y0) * j / (ny - 1); }
  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

/// Field values on the lattice as an ny x nx matrix (row = fixed y,
/// ascending x), computed separably.
Matrix synthesize_on_grid(const CoefficientField& field, const Grid2D& grid);

/// Result summary of a stationary-state computation.
struct StateReport {
  double energy = 0.0;
  std::array<double, 2> energies_per_component{};
  std::array<double, 2> chemical_potentials{};
  double overlap_integral = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

}  // namespace gpe2d
