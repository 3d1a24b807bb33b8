#include "gpe2d/model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gpe2d/errors.hpp"

namespace gpe2d {

namespace {

std::string key2(const char* base, int i, int j) {
  return std::string(base) + std::to_string(i + 1) + std::to_string(j + 1);
}

void require_finite(double v, const std::string& key) {
  if (!std::isfinite(v)) throw InvalidParameter(key, "must be finite");
}

}  // namespace

void SystemParams::validate() const {
  for (int i = 0; i < 2; ++i) {
    const std::string mi = "m" + std::to_string(i + 1);
    const std::string ni = "N" + std::to_string(i + 1);
    require_finite(m[i], mi);
    require_finite(N[i], ni);
    if (!(m[i] > 0.0)) throw InvalidParameter(mi, "mass must be positive");
    if (!(N[i] > 0.0)) throw InvalidParameter(ni, "particle number must be positive");
    for (int j = 0; j < 2; ++j) {
      require_finite(theta[i][j], key2("theta", i, j));
      require_finite(omega[i][j], key2("omega", i, j));
      require_finite(centers[i][j], key2("x", i, j));
      if (theta[i][j] < 0.0) throw InvalidParameter(key2("theta", i, j), "coupling must be nonnegative");
      if (!(omega[i][j] > 0.0)) throw InvalidParameter(key2("omega", i, j), "trap frequency must be positive");
    }
  }
  if (theta[0][1] != theta[1][0]) throw InvalidParameter("theta12", "coupling matrix must be symmetric");
  require_finite(rho, "rho");
  if (rho < 0.0 || rho > 1.0) throw InvalidParameter("rho", "must lie in [0, 1]");
}

double potential_value(const SystemParams& params, int component, double x1, double x2) {
  if (component < 0 || component > 1) throw InvalidParameter("component", "must be 0 or 1");
  const auto& w = params.omega[component];
  const auto& c = params.centers[component];
  const double d1 = x1 - c[0];
  const double d2 = x2 - c[1];
  return 0.5 * params.m[component] * (w[0] * w[0] * d1 * d1 + w[1] * w[1] * d2 * d2);
}

CoefficientField::CoefficientField(BasisPtr basis, double target_mass)
    : basis_(std::move(basis)), target_mass_(target_mass) {
  if (!basis_) throw InvalidParameter("basis", "null basis");
  if (!(target_mass_ > 0.0)) throw InvalidParameter("N", "target mass must be positive");
  coeffs_ = CoeffMatrix::Zero(basis_->L1(), basis_->L2());
}

CoefficientField::CoefficientField(BasisPtr basis, CoeffMatrix coeffs, double target_mass)
    : CoefficientField(std::move(basis), target_mass) {
  if (coeffs.rows() != coeffs_.rows() || coeffs.cols() != coeffs_.cols())
    throw BasisMismatch("coefficient array shape does not match the basis");
  coeffs_ = std::move(coeffs);
}

CoefficientField CoefficientField::mode(BasisPtr basis, int l1, int l2, double target_mass) {
  CoefficientField f(std::move(basis), target_mass);
  if (l1 < 0 || l1 >= f.basis().L1() || l2 < 0 || l2 >= f.basis().L2())
    throw InvalidParameter("mode", "mode index outside the basis");
  f.coeffs()(l1, l2) = std::sqrt(target_mass);
  return f;
}

CoefficientField normalize(CoefficientField field) {
  const double mass = field.mass();
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw DegenerateState("cannot normalize a field with zero or non-finite mass");
  field.coeffs() *= std::sqrt(field.target_mass() / mass);
  return field;
}

Matrix values_on_quartic_grid(const CoefficientField& field) {
  const auto& b = field.basis();
  return b.axis(0).quartic_values.transpose() * field.coeffs() * b.axis(1).quartic_values;
}

Matrix values_on_quadratic_grid(const CoefficientField& field) {
  const auto& b = field.basis();
  return b.axis(0).quadratic_values.transpose() * field.coeffs() * b.axis(1).quadratic_values;
}

void Grid2D::validate() const {
  if (nx < 1) throw InvalidParameter("grid_nx", "must be >= 1");
  if (ny < 1) throw InvalidParameter("grid_ny", "must be >= 1");
  for (auto [v, k] : {std::pair{x0, "grid_x0"}, {x1, "grid_x1"}, {y0, "grid_y0"}, {y1, "grid_y1"}})
    if (!std::isfinite(v)) throw InvalidParameter(k, "must be finite");
}

Matrix synthesize_on_grid(const CoefficientField& field, const Grid2D& grid) {
  grid.validate();
  std::vector<double> xs(static_cast<std::size_t>(grid.nx)), ys(static_cast<std::size_t>(grid.ny));
  for (int i = 0; i < grid.nx; ++i) xs[static_cast<std::size_t>(i)] = grid.x(i);
  for (int j = 0; j < grid.ny; ++j) ys[static_cast<std::size_t>(j)] = grid.y(j);
  const Matrix hx = hermite_function_values(field.basis().spec(0), xs);  // L1 x nx
  const Matrix hy = hermite_function_values(field.basis().spec(1), ys);  // L2 x ny
  // (ny x L2) (L2 x L1) (L1 x nx)
  return hy.transpose() * field.coeffs().transpose() * hx;
}

}  // namespace gpe2d
