#pragma once

#include <array>

#include "gpe2d/model.hpp"

namespace gpe2d {

/// The two components of a state; both must share one basis.
using Fields = std::array<CoefficientField, 2>;
/// Per-component coefficient arrays (gradients, diagonals, directions).
using CoeffPair = std::array<CoeffMatrix, 2>;

/// Parts of the truncated energy
///   E = sum_i [ sum_l lambda^(i)_l phi_l^2 + rho \int (V_i - ref_i) phi_i^2
///              + theta_ii/2 \int phi_i^4 ] + theta_12 \int phi_1^2 phi_2^2
/// where ref_i = ((beta1^2 x1)^2 + (beta2^2 x2)^2) / (2 m_i) and
/// lambda^(i) = (beta1^2 (l1 + 1/2) + beta2^2 (l2 + 1/2)) / m_i.
struct EnergyBreakdown {
  std::array<double, 2> kinetic_plus_trap{};
  std::array<double, 2> potential_correction{};
  std::array<double, 2> quartic{};
  double coupling = 0.0;
  double total = 0.0;

  /// E_i: everything that belongs to component i alone.
  double component(int i) const { return kinetic_plus_trap[i] + potential_correction[i] + quartic[i]; }
  /// E_infinity: the total with the inter-species term removed.
  double uncoupled() const { return component(0) + component(1); }
};

/// Field values of both components on both tensor quadrature grids.
struct FieldSamples {
  std::array<Matrix, 2> quartic;    // n1 x n2 per component
  std::array<Matrix, 2> quadratic;  // m1 x m2 per component
};

/// Discrete energy functional for fixed parameters, with precomputed
/// quadrature tables. All quadrature reductions use compensated summation in
/// a fixed order, so results are bit-reproducible.
class DiscreteEnergy {
 public:
  DiscreteEnergy(BasisPtr basis, const SystemParams& params);

  const SystemParams& params() const noexcept { return params_; }
  const TensorBasis2D& basis() const noexcept { return *basis_; }

  FieldSamples sample(const Fields& fields) const;

  EnergyBreakdown evaluate(const Fields& fields) const;
  EnergyBreakdown evaluate(const Fields& fields, const FieldSamples& s) const;

  /// dE/dphi for both components.
  CoeffPair gradient(const Fields& fields) const;
  CoeffPair gradient(const Fields& fields, const FieldSamples& s) const;

  /// Diagonal of the Hessian of E (the multiplier term is not included).
  CoeffPair hessian_diagonal(const FieldSamples& s) const;

  /// mu_i from N_i mu_i = E_i + theta_ii/2 \int phi_i^4 + theta_12 \int phi_1^2 phi_2^2,
  /// with N_i the current Parseval mass of component i.
  std::array<double, 2> chemical_potentials(const Fields& fields) const;
  std::array<double, 2> chemical_potentials(const Fields& fields, const EnergyBreakdown& e,
                                            const FieldSamples& s) const;

  /// E(to) - E(from) term by term, written as sums of (a' - a)(a' + a) so it
  /// stays accurate when the two states nearly coincide. The mass change of
  /// each component is returned in `mass_change`.
  EnergyBreakdown difference(const Fields& from, const FieldSamples& s_from, const Fields& to,
                             const FieldSamples& s_to, std::array<double, 2>* mass_change = nullptr) const;

  double overlap(const FieldSamples& s) const;
  /// \int phi_i^4 on the quartic grid.
  double quartic_integral(const FieldSamples& s, int i) const;

 private:
  void check(const Fields& fields) const;

  BasisPtr basis_;
  SystemParams params_;
  std::array<Matrix, 2> lambda_;          // L1 x L2 per component
  std::array<Matrix, 2> weighted_corr_;   // rho (V_i - ref_i) times plain weights, quadratic grid
  Matrix quartic_weights_;                // plain weights on the quartic grid
  std::array<Matrix, 2> quartic_sq_;      // squared node values per axis (L x n)
  std::array<Matrix, 2> quadratic_sq_;    // squared node values per axis (L x m)
};

EnergyBreakdown total_energy(const Fields& fields, const SystemParams& params);
CoeffPair gradient(const Fields& fields, const SystemParams& params);
std::array<double, 2> chemical_potentials(const Fields& fields, const SystemParams& params);
/// \int phi_1^2 phi_2^2 by tensor quadrature.
double overlap_integral(const Fields& fields);

/// Compensated sum of a .* b over two equally shaped matrices.
double weighted_sum(const Matrix& weights, const Matrix& values);

}  // namespace gpe2d
