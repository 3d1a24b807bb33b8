#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>

#include "gpe2d/model.hpp"

namespace gpe2d {

using Pair = std::array<double, 2>;
using Matrix22 = std::array<std::array<double, 2>, 2>;

/// w_ij = theta_ij / (2 det Theta), alpha_1 = w22 - w12, alpha_2 = w11 - w12.
struct TFCoefficients {
  Matrix22 w{};
  Pair alpha{};
  double det_theta = 0.0;
};

/// Throws SingularCoupling when det Theta or one of the alphas vanishes.
TFCoefficients tf_coefficients(const Matrix22& theta);

enum class OverlapClass { NoOverlap, PartialOverlap, FullOverlap };

const char* to_string(OverlapClass c);

struct OverlapInfo {
  OverlapClass cls = OverlapClass::NoOverlap;
  /// d^2 sat within the tie band of one of the two thresholds.
  bool boundary = false;
};

/// Compares the squared center distance with (r1 - r2)^2 and (r1 + r2)^2,
/// r_i = sqrt(2 mu_i). Ties resolve to the more overlapping class.
OverlapInfo tf_classify(const Pair& mu, const Matrix22& centers);

struct TFGeometry {
  Pair mu{};
  Pair r{};
  /// Squared radii of the interaction circles; may be negative (empty circle).
  Pair R2{};
  /// sqrt(R2), NaN where R2 < 0.
  Pair R{};
  Matrix22 y{};
  TFCoefficients coeffs;
  OverlapInfo overlap;
  /// det Theta < 0: the formulas are evaluated as is.
  bool strong_coupling = false;
};

/// Rejects inputs the TF algebra does not cover: non-unit trap frequencies or
/// masses (UnsupportedAnisotropy) and nonpositive theta_ii (InvalidParameter).
void tf_check_params(const SystemParams& params);

TFGeometry tf_geometry(const SystemParams& params, const Pair& mu);

/// Piecewise TF profile of component `component` (0-based). Negative
/// radicands evaluate to 0 and bump `*clamped` when given.
double tf_density(const TFGeometry& geom, const SystemParams& params, int component, double x1, double x2,
                  std::size_t* clamped = nullptr);

/// \int tf_density^2 for both components, integrated exactly along x2 and
/// with tanh-sinh along x1 between the breakpoints of the four circles.
Pair tf_masses(const TFGeometry& geom, const SystemParams& params);

/// Closed form sqrt(N_i theta_ii / pi), ignoring the coupling.
Pair tf_decoupled_mu(const SystemParams& params);

/// Chemical potentials whose TF profiles carry masses N_i. Throws NoSolution
/// when the damped Newton iteration fails.
Pair tf_solve_mu(const SystemParams& params);

/// ny x nx samples of tf_density on the grid (row = fixed y).
Matrix tf_density_grid(const TFGeometry& geom, const SystemParams& params, int component, const Grid2D& grid);

void write_tf_report(std::ostream& os, const TFGeometry& geom);

}  // namespace gpe2d
