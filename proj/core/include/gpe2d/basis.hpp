#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace gpe2d {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Truncation and scale of a 1D Hermite basis: modes 0..L-1, scale beta.
struct BasisSpec {
  int L = 16;
  double beta = 1.0;

  void validate() const;
  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

/// Harmonic-oscillator eigenvalue beta^2 (l + 1/2).
double hermite_eigenvalue(int l, double beta);

/// Writes the L normalized Hermite functions H_l^beta(x) e^{-beta^2 x^2 / 2}
/// at a single point into `out` (size L). Values whose magnitude is below
/// e^{-700} are returned as exactly zero.
void hermite_functions_at(double x, double beta, std::span<double> out);

/// Row l holds the l-th Hermite function at every point.
Matrix hermite_function_values(const BasisSpec& spec, std::span<const double> points);

/// Gauss–Hermite rule for the weight e^{-a x^2}.
///
/// `weights` integrate f(x) e^{-a x^2}; `plain_weights` = weights * e^{a x^2}
/// integrate g(x) directly and are exact whenever g is a polynomial of degree
/// <= 2n-1 times e^{-a x^2}. The plain weights are computed without forming
/// e^{a x^2}, so they stay finite for large n.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> plain_weights;
  double weight_exponent = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point rule for the weight e^{-a x^2} (Golub–Welsch plus Newton polish).
QuadratureRule gauss_hermite_rule(int n, double weight_exponent);

/// The 2L-1 node rule for e^{-2 beta^2 x^2}; exact for all quartic products of
/// the basis functions.
QuadratureRule gauss_hermite_rule(const BasisSpec& spec);

/// Companion L+1 node rule for e^{-beta^2 x^2}; exact for products of two
/// basis functions times any quadratic polynomial.
QuadratureRule gauss_hermite_quadratic_rule(const BasisSpec& spec);

/// Analytic moment \int x^p e^{-a x^2} dx (zero for odd p).
double gaussian_moment(int p, double a);

struct MomentCheck {
  int max_degree = 0;
  double max_relative_error = 0.0;
};

/// Largest relative error over even moments p <= max_even_degree.
MomentCheck check_moments(const QuadratureRule& rule, int max_even_degree);

/// Throws DegenerateBasis unless `rule` integrates every quartic product of
/// the first L basis functions (even moments up to 4L-4) to 1e-9.
void require_quartic_exactness(const QuadratureRule& rule, int L);

/// One axis of the tensor basis with both rules and cached node values.
struct AxisBasis {
  BasisSpec spec;
  QuadratureRule quartic;
  QuadratureRule quadratic;
  Matrix quartic_values;    // L x quartic.size()
  Matrix quadratic_values;  // L x quadratic.size()

  explicit AxisBasis(BasisSpec s);
};

/// Tensor product of two 1D Hermite bases, with eigenvalue table
/// beta1^2 (l1 + 1/2) + beta2^2 (l2 + 1/2).
class TensorBasis2D {
 public:
  TensorBasis2D(BasisSpec x, BasisSpec y);

  const AxisBasis& axis(int j) const { return j == 0 ? x_ : y_; }
  const BasisSpec& spec(int j) const { return axis(j).spec; }
  int L1() const noexcept { return x_.spec.L; }
  int L2() const noexcept { return y_.spec.L; }
  int size() const noexcept { return L1() * L2(); }

  /// L1 x L2 table of reference eigenvalues.
  const Matrix& eigenvalues() const noexcept { return eigenvalues_; }
  double eigenvalue(int l1, int l2) const { return eigenvalues_(l1, l2); }

  bool same_as(const TensorBasis2D& other) const {
    return x_.spec == other.x_.spec && y_.spec == other.y_.spec;
  }

 private:
  AxisBasis x_;
  AxisBasis y_;
  Matrix eigenvalues_;
};

using BasisPtr = std::shared_ptr<const TensorBasis2D>;

BasisPtr make_basis(BasisSpec x, BasisSpec y);

}  // namespace gpe2d
