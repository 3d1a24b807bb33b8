#include "gpe2d/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "gpe2d/errors.hpp"

namespace gpe2d {

namespace {

constexpr double kUnderflowLog = -700.0;
constexpr double kRescale = 1e150;

// Runs the normalized three-term recurrence for psi_l(t), l < count, without
// the Gaussian factor, rescaling to keep the iterate finite. Each value is
// reported as (mantissa, log_scale) with psi_l = mantissa * exp(log_scale).
template <typename Sink>
void scaled_hermite_recurrence(double t, int count, Sink&& sink) {
  const double log_rescale = std::log(kRescale);
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  double log_scale = -0.5 * t * t;
  sink(0, cur, log_scale);
  for (int l = 0; l + 1 < count; ++l) {
    const double next = std::sqrt(2.0 / (l + 1)) * t * cur - std::sqrt(double(l) / (l + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += log_rescale;
    }
    sink(l + 1, cur, log_scale);
  }
}

double finalize(double mantissa, double log_scale, double log_norm) {
  if (mantissa == 0.0) return 0.0;
  const double log_mag = std::log(std::abs(mantissa)) + log_scale + log_norm;
  if (log_mag < kUnderflowLog) return 0.0;
  if (log_scale > kUnderflowLog) {
    const double v = mantissa * std::exp(log_scale + log_norm);
    if (std::isfinite(v)) return v;
  }
  return std::copysign(std::exp(log_mag), mantissa);
}

// psi_n(t) / psi_n'(t) for the (beta = 1) Hermite function of degree n,
// used to polish eigensolver nodes. psi_n' = sqrt(2n) psi_{n-1} - t psi_n.
double newton_ratio(double t, int n) {
  double pn = 0.0, pm = 0.0, scale_n = 0.0, scale_m = 0.0;
  scaled_hermite_recurrence(t, n + 1, [&](int l, double v, double s) {
    if (l == n - 1) {
      pm = v;
      scale_m = s;
    } else if (l == n) {
      pn = v;
      scale_n = s;
    }
  });
  // bring psi_{n-1} to the scale of psi_n
  pm *= std::exp(scale_m - scale_n);
  const double deriv = std::sqrt(2.0 * n) * pm - t * pn;
  return pn / deriv;
}

}  // namespace

void BasisSpec::validate() const {
  if (L < 1) throw InvalidParameter("L", "must be >= 1, got " + std::to_string(L));
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw InvalidParameter("beta", "must be a positive finite number");
}

double hermite_eigenvalue(int l, double beta) { return beta * beta * (l + 0.5); }

void hermite_functions_at(double x, double beta, std::span<double> out) {
  const int count = static_cast<int>(out.size());
  if (count == 0) return;
  const double log_norm = 0.5 * std::log(beta);
  scaled_hermite_recurrence(beta * x, count, [&](int l, double v, double s) {
    out[static_cast<std::size_t>(l)] = finalize(v, s, log_norm);
  });
}

Matrix hermite_function_values(const BasisSpec& spec, std::span<const double> points) {
  spec.validate();
  Matrix values(spec.L, static_cast<Eigen::Index>(points.size()));
  std::vector<double> column(static_cast<std::size_t>(spec.L));
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!std::isfinite(points[k])) throw InvalidParameter("points", "non-finite evaluation point");
    hermite_functions_at(points[k], spec.beta, column);
    for (int l = 0; l < spec.L; ++l) values(l, static_cast<Eigen::Index>(k)) = column[l];
  }
  return values;
}

QuadratureRule gauss_hermite_rule(int n, double weight_exponent) {
  if (n < 1) throw InvalidParameter("nodes", "quadrature needs at least one node");
  if (!(weight_exponent > 0.0)) throw InvalidParameter("weight_exponent", "must be positive");

  // Jacobi matrix of the weight e^{-t^2}: zero diagonal, sqrt(k/2) off-diagonal.
  std::vector<double> t(static_cast<std::size_t>(n), 0.0);
  if (n > 1) {
    Vector diag = Vector::Zero(n);
    Vector sub(n - 1);
    for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw NumericalFailure("Gauss-Hermite tridiagonal eigensolve did not converge (n=" +
                             std::to_string(n) + ")");
    for (int k = 0; k < n; ++k) t[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);

    for (double& node : t) {
      for (int it = 0; it < 4; ++it) {
        const double step = newton_ratio(node, n);
        if (!std::isfinite(step)) break;
        node -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(node))) break;
      }
    }
    std::sort(t.begin(), t.end());
    for (int k = 0; k < n / 2; ++k) {
      const double sym = 0.5 * (t[static_cast<std::size_t>(n - 1 - k)] - t[static_cast<std::size_t>(k)]);
      t[static_cast<std::size_t>(k)] = -sym;
      t[static_cast<std::size_t>(n - 1 - k)] = sym;
    }
    if (n % 2 == 1) t[static_cast<std::size_t>(n / 2)] = 0.0;
  }

  QuadratureRule rule;
  rule.weight_exponent = weight_exponent;
  rule.nodes.resize(t.size());
  rule.weights.resize(t.size());
  rule.plain_weights.resize(t.size());
  const double inv_scale = 1.0 / std::sqrt(weight_exponent);
  std::vector<double> psi(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < t.size(); ++k) {
    // plain weight for e^{-t^2}: 1 / (n psi_{n-1}(t)^2)
    double pm = 0.0, scale = 0.0;
    scaled_hermite_recurrence(t[k], n, [&](int l, double v, double s) {
      if (l == n - 1) {
        pm = v;
        scale = s + 0.5 * t[k] * t[k];  // strip the Gaussian
      }
    });
    // psi_{n-1}(t)^2 = pm^2 e^{2 scale} e^{-t^2}; plain weight multiplies back e^{t^2}
    const double log_plain = -std::log(double(n)) - 2.0 * std::log(std::abs(pm)) - 2.0 * scale + t[k] * t[k];
    const double log_weight = log_plain - t[k] * t[k];
    rule.nodes[k] = t[k] * inv_scale;
    rule.plain_weights[k] = std::exp(log_plain) * inv_scale;
    rule.weights[k] = std::exp(log_weight) * inv_scale;
    if (!std::isfinite(rule.plain_weights[k]) || !(rule.plain_weights[k] > 0.0))
      throw NumericalFailure("Gauss-Hermite weight is not finite and positive");
  }
  return rule;
}

QuadratureRule gauss_hermite_rule(const BasisSpec& spec) {
  spec.validate();
  return gauss_hermite_rule(2 * spec.L - 1, 2.0 * spec.beta * spec.beta);
}

QuadratureRule gauss_hermite_quadratic_rule(const BasisSpec& spec) {
  spec.validate();
  return gauss_hermite_rule(spec.L + 1, spec.beta * spec.beta);
}

double gaussian_moment(int p, double a) {
  if (p < 0) throw InvalidParameter("p", "moment order must be nonnegative");
  if (p % 2 == 1) return 0.0;
  const double h = 0.5 * (p + 1);
  return std::exp(std::lgamma(h) - h * std::log(a));
}

MomentCheck check_moments(const QuadratureRule& rule, int max_even_degree) {
  MomentCheck out;
  const double a = rule.weight_exponent;
  for (int p = 0; p <= max_even_degree; p += 2) {
    const double h = 0.5 * (p + 1);
    const double log_exact = std::lgamma(h) - h * std::log(a);
    // sum_k w_k x_k^p / exact, accumulated in log space
    double sum = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double x = rule.nodes[k];
      if (rule.weights[k] == 0.0) continue;
      double term;
      if (p == 0) {
        term = std::exp(std::log(rule.weights[k]) - log_exact);
      } else {
        if (x == 0.0) continue;
        term = std::exp(std::log(rule.weights[k]) + p * std::log(std::abs(x)) - log_exact);
      }
      const double y = term - comp;
      const double s = sum + y;
      comp = (s - sum) - y;
      sum = s;
    }
    out.max_relative_error = std::max(out.max_relative_error, std::abs(sum - 1.0));
    out.max_degree = p;
  }
  return out;
}

void require_quartic_exactness(const QuadratureRule& rule, int L) {
  const int degree = 4 * (L - 1);
  const auto check = check_moments(rule, degree);
  if (!(check.max_relative_error <= 1e-9))
    throw DegenerateBasis("quadrature with " + std::to_string(rule.size()) +
                          " nodes does not integrate quartic products of " + std::to_string(L) +
                          " modes (max relative moment error " +
                          std::to_string(check.max_relative_error) + ")");
}

AxisBasis::AxisBasis(BasisSpec s)
    : spec(s), quartic(gauss_hermite_rule(s)), quadratic(gauss_hermite_quadratic_rule(s)) {
  quartic_values = hermite_function_values(spec, quartic.nodes);
  quadratic_values = hermite_function_values(spec, quadratic.nodes);
}

TensorBasis2D::TensorBasis2D(BasisSpec x, BasisSpec y) : x_(x), y_(y) {
  eigenvalues_.resize(L1(), L2());
  for (int a = 0; a < L1(); ++a)
    for (int b = 0; b < L2(); ++b)
      eigenvalues_(a, b) = hermite_eigenvalue(a, x_.spec.beta) + hermite_eigenvalue(b, y_.spec.beta);
}

BasisPtr make_basis(BasisSpec x, BasisSpec y) { return std::make_shared<const TensorBasis2D>(x, y); }

}  // namespace gpe2d
