#include "gpe2d/energy.hpp"

#include <cmath>

#include "gpe2d/errors.hpp"

namespace gpe2d {

namespace {

// Kahan accumulator; iteration order is fixed by the caller.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

Matrix outer(const std::vector<double>& a, const std::vector<double>& b) {
  Matrix m(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(Eigen::Index(i), Eigen::Index(j)) = a[i] * b[j];
  return m;
}

}  // namespace

double weighted_sum(const Matrix& weights, const Matrix& values) {
  KahanSum s;
  const double* w = weights.data();
  const double* v = values.data();
  for (Eigen::Index k = 0; k < weights.size(); ++k) s.add(w[k] * v[k]);
  return s.value();
}

DiscreteEnergy::DiscreteEnergy(BasisPtr basis, const SystemParams& params)
    : basis_(std::move(basis)), params_(params) {
  if (!basis_) throw InvalidParameter("basis", "null basis");
  params_.validate();
  const auto& ax = basis_->axis(0);
  const auto& ay = basis_->axis(1);
  const double b1 = ax.spec.beta * ax.spec.beta;
  const double b2 = ay.spec.beta * ay.spec.beta;

  quartic_weights_ = outer(ax.quartic.plain_weights, ay.quartic.plain_weights);
  const Matrix quad_weights = outer(ax.quadratic.plain_weights, ay.quadratic.plain_weights);
  for (int i = 0; i < 2; ++i) {
    lambda_[i] = basis_->eigenvalues() / params_.m[i];
    Matrix corr(quad_weights.rows(), quad_weights.cols());
    for (Eigen::Index a = 0; a < corr.rows(); ++a) {
      const double x1 = ax.quadratic.nodes[std::size_t(a)];
      for (Eigen::Index c = 0; c < corr.cols(); ++c) {
        const double x2 = ay.quadratic.nodes[std::size_t(c)];
        const double ref = (b1 * b1 * x1 * x1 + b2 * b2 * x2 * x2) / (2.0 * params_.m[i]);
        corr(a, c) = params_.rho * (potential_value(params_, i, x1, x2) - ref) * quad_weights(a, c);
      }
    }
    weighted_corr_[i] = std::move(corr);
  }
  for (int j = 0; j < 2; ++j) {
    quartic_sq_[j] = basis_->axis(j).quartic_values.array().square();
    quadratic_sq_[j] = basis_->axis(j).quadratic_values.array().square();
  }
}

void DiscreteEnergy::check(const Fields& fields) const {
  for (const auto& f : fields)
    if (!f.basis().same_as(*basis_)) throw BasisMismatch("field basis differs from the energy basis");
}

FieldSamples DiscreteEnergy::sample(const Fields& fields) const {
  check(fields);
  FieldSamples s;
  for (int i = 0; i < 2; ++i) {
    s.quartic[i] = values_on_quartic_grid(fields[i]);
    s.quadratic[i] = values_on_quadratic_grid(fields[i]);
  }
  return s;
}

double DiscreteEnergy::overlap(const FieldSamples& s) const {
  const Matrix prod = s.quartic[0].array().square() * s.quartic[1].array().square();
  return weighted_sum(quartic_weights_, prod);
}

double DiscreteEnergy::quartic_integral(const FieldSamples& s, int i) const {
  const Matrix p4 = s.quartic[i].array().square().square();
  return weighted_sum(quartic_weights_, p4);
}

EnergyBreakdown DiscreteEnergy::evaluate(const Fields& fields) const { return evaluate(fields, sample(fields)); }

EnergyBreakdown DiscreteEnergy::evaluate(const Fields& fields, const FieldSamples& s) const {
  check(fields);
  EnergyBreakdown e;
  for (int i = 0; i < 2; ++i) {
    const Matrix c2 = fields[i].coeffs().array().square();
    e.kinetic_plus_trap[i] = weighted_sum(lambda_[i], c2);
    const Matrix q2 = s.quadratic[i].array().square();
    e.potential_correction[i] = weighted_sum(weighted_corr_[i], q2);
    e.quartic[i] = 0.5 * params_.theta[i][i] * quartic_integral(s, i);
  }
  e.coupling = params_.coupling() * overlap(s);
  KahanSum t;
  for (int i = 0; i < 2; ++i) {
    t.add(e.kinetic_plus_trap[i]);
    t.add(e.potential_correction[i]);
    t.add(e.quartic[i]);
  }
  t.add(e.coupling);
  e.total = t.value();
  return e;
}

EnergyBreakdown DiscreteEnergy::difference(const Fields& from, const FieldSamples& sf, const Fields& to,
                                           const FieldSamples& st, std::array<double, 2>* mass_change) const {
  check(from);
  check(to);
  const auto& ax = basis_->axis(0);
  const auto& ay = basis_->axis(1);
  std::array<Matrix, 2> dq, dp;
  EnergyBreakdown e;
  for (int i = 0; i < 2; ++i) {
    const CoeffMatrix dc = to[i].coeffs() - from[i].coeffs();
    const Matrix sc = to[i].coeffs() + from[i].coeffs();
    dq[i] = ax.quadratic_values.transpose() * dc * ay.quadratic_values;
    dp[i] = ax.quartic_values.transpose() * dc * ay.quartic_values;
    const Matrix dc2 = dc.array() * sc.array();
    e.kinetic_plus_trap[i] = weighted_sum(lambda_[i], dc2);
    if (mass_change) (*mass_change)[i] = weighted_sum(Matrix::Ones(dc2.rows(), dc2.cols()), dc2);
    const Matrix dq2 = dq[i].array() * (st.quadratic[i] + sf.quadratic[i]).array();
    e.potential_correction[i] = weighted_sum(weighted_corr_[i], dq2);
    const Matrix dp4 = dp[i].array() * (st.quartic[i] + sf.quartic[i]).array() *
                       (st.quartic[i].array().square() + sf.quartic[i].array().square());
    e.quartic[i] = 0.5 * params_.theta[i][i] * weighted_sum(quartic_weights_, dp4);
  }
  const Matrix dcross = dp[0].array() * (st.quartic[0] + sf.quartic[0]).array() * st.quartic[1].array().square() +
                        sf.quartic[0].array().square() * dp[1].array() * (st.quartic[1] + sf.quartic[1]).array();
  e.coupling = params_.coupling() * weighted_sum(quartic_weights_, dcross);
  KahanSum t;
  for (int i = 0; i < 2; ++i) {
    t.add(e.kinetic_plus_trap[i]);
    t.add(e.potential_correction[i]);
    t.add(e.quartic[i]);
  }
  t.add(e.coupling);
  e.total = t.value();
  return e;
}

CoeffPair DiscreteEnergy::gradient(const Fields& fields) const { return gradient(fields, sample(fields)); }

CoeffPair DiscreteEnergy::gradient(const Fields& fields, const FieldSamples& s) const {
  check(fields);
  const auto& ax = basis_->axis(0);
  const auto& ay = basis_->axis(1);
  CoeffPair g;
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    const Matrix lin = weighted_corr_[i].cwiseProduct(s.quadratic[i]);
    const Matrix& p = s.quartic[i];
    const Matrix nl = quartic_weights_.array() *
                      (params_.theta[i][i] * p.array().cube() +
                       params_.coupling() * s.quartic[j].array().square() * p.array());
    Matrix gi = ax.quadratic_values * lin * ay.quadratic_values.transpose();
    gi.noalias() += ax.quartic_values * nl * ay.quartic_values.transpose();
    gi.array() += lambda_[i].array() * fields[i].coeffs().array();
    g[i] = 2.0 * gi;
  }
  return g;
}

CoeffPair DiscreteEnergy::hessian_diagonal(const FieldSamples& s) const {
  CoeffPair h;
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    const Matrix nl = quartic_weights_.array() *
                      (3.0 * params_.theta[i][i] * s.quartic[i].array().square() +
                       params_.coupling() * s.quartic[j].array().square());
    Matrix hi = quadratic_sq_[0] * weighted_corr_[i] * quadratic_sq_[1].transpose();
    hi.noalias() += quartic_sq_[0] * nl * quartic_sq_[1].transpose();
    hi += lambda_[i];
    h[i] = 2.0 * hi;
  }
  return h;
}

std::array<double, 2> DiscreteEnergy::chemical_potentials(const Fields& fields) const {
  const auto s = sample(fields);
  return chemical_potentials(fields, evaluate(fields, s), s);
}

std::array<double, 2> DiscreteEnergy::chemical_potentials(const Fields& fields, const EnergyBreakdown& e,
                                                          const FieldSamples&) const {
  std::array<double, 2> mu{};
  for (int i = 0; i < 2; ++i) {
    const double mass = fields[i].mass();
    if (!(mass > 0.0)) throw DegenerateState("chemical potential of a zero field");
    // quartic[i] already holds theta_ii/2 \int phi^4
    mu[i] = (e.component(i) + e.quartic[i] + e.coupling) / mass;
  }
  return mu;
}

EnergyBreakdown total_energy(const Fields& fields, const SystemParams& params) {
  return DiscreteEnergy(fields[0].basis_ptr(), params).evaluate(fields);
}

CoeffPair gradient(const Fields& fields, const SystemParams& params) {
  return DiscreteEnergy(fields[0].basis_ptr(), params).gradient(fields);
}

std::array<double, 2> chemical_potentials(const Fields& fields, const SystemParams& params) {
  return DiscreteEnergy(fields[0].basis_ptr(), params).chemical_potentials(fields);
}

double overlap_integral(const Fields& fields) {
  if (!fields[0].basis().same_as(fields[1].basis())) throw BasisMismatch("fields use different bases");
  const Matrix p = values_on_quartic_grid(fields[0]);
  const Matrix q = values_on_quartic_grid(fields[1]);
  const auto& b = fields[0].basis();
  const Matrix w = outer(b.axis(0).quartic.plain_weights, b.axis(1).quartic.plain_weights);
  const Matrix prod = p.array().square() * q.array().square();
  return weighted_sum(w, prod);
}

}  // namespace gpe2d
