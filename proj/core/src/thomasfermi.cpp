#include "gpe2d/thomasfermi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "gpe2d/errors.hpp"
#include "gpe2d/io.hpp"

namespace gpe2d {

namespace {

constexpr double kTieBand = 1e-12;

double sq(double v) { return v * v; }

double dist2(double x1, double x2, const Pair& c) { return sq(x1 - c[0]) + sq(x2 - c[1]); }

struct Circle {
  Pair c;
  double rho2;
};

enum class Region { Overlap, Single, Outside };

Region region_of(const TFGeometry& g, const SystemParams& p, int i, double x1, double x2) {
  const bool in_d1 = dist2(x1, x2, p.centers[0]) <= sq(g.r[0]);
  const bool in_d2 = dist2(x1, x2, p.centers[1]) <= sq(g.r[1]);
  if (in_d1 && in_d2) {
    bool in_o = true;
    for (int k = 0; k < 2; ++k) {
      const double dy = dist2(x1, x2, g.y[k]);
      in_o = in_o && (g.coeffs.alpha[k] > 0.0 ? dy <= g.R2[k] : dy >= g.R2[k]);
    }
    if (in_o) return Region::Overlap;
  }
  return (i == 0 ? in_d1 : in_d2) ? Region::Single : Region::Outside;
}

double radicand(const TFGeometry& g, const SystemParams& p, int i, Region reg, double x1, double x2) {
  switch (reg) {
    case Region::Overlap:
      return g.coeffs.alpha[i] * (g.R2[i] - dist2(x1, x2, g.y[i]));
    case Region::Single:
      return (sq(g.r[i]) - dist2(x1, x2, p.centers[i])) / (2.0 * p.theta[i][i]);
    case Region::Outside:
      break;
  }
  return 0.0;
}

std::vector<Circle> circles(const TFGeometry& g, const SystemParams& p) {
  std::vector<Circle> out;
  for (int k = 0; k < 2; ++k) out.push_back({p.centers[k], sq(g.r[k])});
  for (int k = 0; k < 2; ++k)
    if (g.R2[k] > 0.0 && std::isfinite(g.R2[k])) out.push_back({g.y[k], g.R2[k]});
  return out;
}

// x1 coordinates where the boundary structure along vertical lines changes.
std::vector<double> breakpoints(const std::vector<Circle>& cs) {
  std::vector<double> xs;
  for (const auto& c : cs) {
    const double r = std::sqrt(c.rho2);
    xs.push_back(c.c[0] - r);
    xs.push_back(c.c[0] + r);
  }
  for (std::size_t a = 0; a < cs.size(); ++a)
    for (std::size_t b = a + 1; b < cs.size(); ++b) {
      const double dx = cs[b].c[0] - cs[a].c[0];
      const double dy = cs[b].c[1] - cs[a].c[1];
      const double d = std::hypot(dx, dy);
      const double ra = std::sqrt(cs[a].rho2), rb = std::sqrt(cs[b].rho2);
      if (d == 0.0 || d > ra + rb || d < std::abs(ra - rb)) continue;
      const double along = (cs[a].rho2 - cs[b].rho2 + d * d) / (2.0 * d);
      const double h = std::sqrt(std::max(0.0, cs[a].rho2 - along * along));
      const double px = cs[a].c[0] + along * dx / d;
      xs.push_back(px + h * dy / d);
      xs.push_back(px - h * dy / d);
    }
  return xs;
}

// Exact integral of the squared profile along x2 at fixed x1: the integrand
// is a quadratic between consecutive circle crossings, so Simpson is exact.
double slice_mass(const TFGeometry& g, const SystemParams& p, const std::vector<Circle>& cs, int i, double x1) {
  const double half2 = sq(g.r[i]) - sq(x1 - p.centers[i][0]);
  if (half2 <= 0.0) return 0.0;
  const double lo = p.centers[i][1] - std::sqrt(half2);
  const double hi = p.centers[i][1] + std::sqrt(half2);
  std::vector<double> pts{lo, hi};
  for (const auto& c : cs) {
    const double h2 = c.rho2 - sq(x1 - c.c[0]);
    if (h2 <= 0.0) continue;
    for (double v : {c.c[1] - std::sqrt(h2), c.c[1] + std::sqrt(h2)})
      if (v > lo && v < hi) pts.push_back(v);
  }
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k], b = pts[k + 1];
    if (!(b > a)) continue;
    const double m = 0.5 * (a + b);
    const Region reg = region_of(g, p, i, x1, m);
    if (reg == Region::Outside) continue;
    const double fa = radicand(g, p, i, reg, x1, a);
    const double fm = radicand(g, p, i, reg, x1, m);
    const double fb = radicand(g, p, i, reg, x1, b);
    total += (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }
  return total;
}

double weighted_norm(const Pair& f, const Pair& n) { return std::max(std::abs(f[0]) / n[0], std::abs(f[1]) / n[1]); }

}  // namespace

TFCoefficients tf_coefficients(const Matrix22& theta) {
  TFCoefficients c;
  c.det_theta = theta[0][0] * theta[1][1] - theta[0][1] * theta[1][0];
  if (c.det_theta == 0.0) throw SingularCoupling("det Theta = 0: TF geometry undefined");
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c.w[i][j] = theta[i][j] / (2.0 * c.det_theta);
  c.alpha = {c.w[1][1] - c.w[0][1], c.w[0][0] - c.w[0][1]};
  if (c.alpha[0] == 0.0) throw SingularCoupling("alpha_1 = 0: TF geometry undefined");
  if (c.alpha[1] == 0.0) throw SingularCoupling("alpha_2 = 0: TF geometry undefined");
  return c;
}

const char* to_string(OverlapClass c) {
  switch (c) {
    case OverlapClass::NoOverlap:
      return "NoOverlap";
    case OverlapClass::PartialOverlap:
      return "PartialOverlap";
    case OverlapClass::FullOverlap:
      return "FullOverlap";
  }
  return "?";
}

OverlapInfo tf_classify(const Pair& mu, const Matrix22& centers) {
  for (int i = 0; i < 2; ++i)
    if (!(mu[i] > 0.0)) throw InvalidParameter(i == 0 ? "mu1" : "mu2", "chemical potential must be positive");
  const double r1 = std::sqrt(2.0 * mu[0]);
  const double r2 = std::sqrt(2.0 * mu[1]);
  const double d2 = sq(centers[0][0] - centers[1][0]) + sq(centers[0][1] - centers[1][1]);
  const double lower = sq(r1 - r2);
  const double upper = sq(r1 + r2);
  if (std::abs(d2 - lower) <= kTieBand * std::max(1.0, lower)) return {OverlapClass::FullOverlap, true};
  if (std::abs(d2 - upper) <= kTieBand * std::max(1.0, upper)) return {OverlapClass::PartialOverlap, true};
  if (d2 < lower) return {OverlapClass::FullOverlap, false};
  if (d2 < upper) return {OverlapClass::PartialOverlap, false};
  return {OverlapClass::NoOverlap, false};
}

void tf_check_params(const SystemParams& params) {
  params.validate();
  for (int i = 0; i < 2; ++i) {
    if (params.m[i] != 1.0) throw UnsupportedAnisotropy("TF geometry requires unit masses");
    for (int j = 0; j < 2; ++j)
      if (params.omega[i][j] != 1.0) throw UnsupportedAnisotropy("TF geometry requires unit trap frequencies");
    if (!(params.theta[i][i] > 0.0))
      throw InvalidParameter(i == 0 ? "theta11" : "theta22", "TF needs a positive self-coupling");
  }
}

TFGeometry tf_geometry(const SystemParams& params, const Pair& mu) {
  tf_check_params(params);
  TFGeometry g;
  g.coeffs = tf_coefficients(params.theta);
  g.strong_coupling = g.coeffs.det_theta < 0.0;
  g.mu = mu;
  g.overlap = tf_classify(mu, params.centers);
  const auto& x = params.centers;
  const auto& w = g.coeffs.w;
  const auto& a = g.coeffs.alpha;
  for (int i = 0; i < 2; ++i) g.r[i] = std::sqrt(2.0 * mu[i]);

  // y_ij = x_ij - (-1)^i (w12 / alpha_i) Delta_j x with i 1-based.
  for (int j = 0; j < 2; ++j) {
    const double delta = x[0][j] - x[1][j];
    g.y[0][j] = x[0][j] + w[0][1] / a[0] * delta;
    g.y[1][j] = x[1][j] - w[0][1] / a[1] * delta;
    const double q1 = (w[1][1] * x[0][j] - w[0][1] * x[1][j]) / (w[1][1] - w[0][1]);
    const double q2 = (w[0][0] * x[1][j] - w[0][1] * x[0][j]) / (w[0][0] - w[0][1]);
    const double scale = 1.0 + std::abs(q1) + std::abs(q2);
    if (std::abs(q1 - g.y[0][j]) > 1e-10 * scale || std::abs(q2 - g.y[1][j]) > 1e-10 * scale)
      throw NumericalFailure("TF center forms disagree");
  }

  const double x1n = sq(x[0][0]) + sq(x[0][1]);
  const double x2n = sq(x[1][0]) + sq(x[1][1]);
  const double y1n = sq(g.y[0][0]) + sq(g.y[0][1]);
  const double y2n = sq(g.y[1][0]) + sq(g.y[1][1]);
  g.R2[0] = (2.0 * w[1][1] * mu[0] - 2.0 * w[0][1] * mu[1] + w[0][1] * x2n - w[1][1] * x1n) / a[0] + y1n;
  g.R2[1] = (2.0 * w[0][0] * mu[1] - 2.0 * w[0][1] * mu[0] + w[0][1] * x1n - w[0][0] * x2n) / a[1] + y2n;
  const std::array<double, 2> xn{x1n, x2n}, yn{y1n, y2n};
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    const double compact = sq(g.r[i]) + 2.0 * w[0][1] / a[i] * (mu[i] - mu[j]) + w[0][1] / a[i] * (xn[j] - yn[i]) -
                           w[j][j] / a[i] * (xn[i] - yn[i]);
    const double scale = 1.0 + std::abs(compact) + std::abs(w[0][1] / a[i]) * (xn[j] + yn[i]) +
                         std::abs(w[j][j] / a[i]) * (xn[i] + yn[i]);
    if (std::abs(compact - g.R2[i]) > 1e-10 * scale) throw NumericalFailure("TF radius forms disagree");
    g.R[i] = g.R2[i] >= 0.0 ? std::sqrt(g.R2[i]) : std::numeric_limits<double>::quiet_NaN();
  }
  return g;
}

double tf_density(const TFGeometry& geom, const SystemParams& params, int component, double x1, double x2,
                  std::size_t* clamped) {
  if (component < 0 || component > 1) throw InvalidParameter("component", "must be 0 or 1");
  const Region reg = region_of(geom, params, component, x1, x2);
  const double rad = radicand(geom, params, component, reg, x1, x2);
  if (rad < 0.0) {
    if (clamped) ++*clamped;
    return 0.0;
  }
  return std::sqrt(rad);
}

Pair tf_masses(const TFGeometry& geom, const SystemParams& params) {
  const auto cs = circles(geom, params);
  const auto bps = breakpoints(cs);
  boost::math::quadrature::tanh_sinh<double> integrator;
  Pair out{};
  for (int i = 0; i < 2; ++i) {
    const double lo = params.centers[i][0] - geom.r[i];
    const double hi = params.centers[i][0] + geom.r[i];
    std::vector<double> xs{lo, hi};
    for (double b : bps)
      if (b > lo && b < hi) xs.push_back(b);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
      if (xs[k + 1] - xs[k] <= 1e-12 * geom.r[i]) continue;
      auto f = [&](double x1) { return slice_mass(geom, params, cs, i, x1); };
      total += integrator.integrate(f, xs[k], xs[k + 1], 1e-13);
    }
    out[i] = total;
  }
  return out;
}

Pair tf_decoupled_mu(const SystemParams& params) {
  tf_check_params(params);
  return {std::sqrt(params.N[0] * params.theta[0][0] / std::numbers::pi),
          std::sqrt(params.N[1] * params.theta[1][1] / std::numbers::pi)};
}

Pair tf_solve_mu(const SystemParams& params) {
  Pair mu = tf_decoupled_mu(params);
  if (params.coupling() == 0.0) return mu;
  tf_coefficients(params.theta);

  const double mu_max = 1e3 * std::max(mu[0], mu[1]);
  auto residual = [&](const Pair& m) {
    const Pair mass = tf_masses(tf_geometry(params, m), params);
    return Pair{mass[0] - params.N[0], mass[1] - params.N[1]};
  };
  Pair f = residual(mu);
  double fn = weighted_norm(f, params.N);
  for (int it = 0; it < 200; ++it) {
    if (fn <= 1e-11) return mu;
    double J[2][2];
    for (int j = 0; j < 2; ++j) {
      Pair mp = mu;
      const double h = 1e-7 * mu[j];
      mp[j] += h;
      const Pair fp = residual(mp);
      for (int i = 0; i < 2; ++i) J[i][j] = (fp[i] - f[i]) / h;
    }
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (det == 0.0 || !std::isfinite(det)) throw NoSolution("singular mass Jacobian in the TF normalization");
    const Pair step{-(J[1][1] * f[0] - J[0][1] * f[1]) / det, -(-J[1][0] * f[0] + J[0][0] * f[1]) / det};
    bool accepted = false;
    for (double t = 1.0; t > 1e-8; t *= 0.5) {
      const Pair trial{mu[0] + t * step[0], mu[1] + t * step[1]};
      if (!(trial[0] > 0.0 && trial[1] > 0.0 && trial[0] <= mu_max && trial[1] <= mu_max)) continue;
      const Pair ft = residual(trial);
      const double tn = weighted_norm(ft, params.N);
      if (tn < fn) {
        mu = trial;
        f = ft;
        fn = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (fn <= 1e-9) return mu;
      throw NoSolution("TF normalization: no decrease along the Newton direction");
    }
  }
  if (fn <= 1e-9) return mu;
  throw NoSolution("TF normalization did not converge");
}

Matrix tf_density_grid(const TFGeometry& geom, const SystemParams& params, int component, const Grid2D& grid) {
  grid.validate();
  Matrix out(grid.ny, grid.nx);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) out(j, i) = tf_density(geom, params, component, grid.x(i), grid.y(j));
  return out;
}

void write_tf_report(std::ostream& os, const TFGeometry& g) {
  using io::format_double;
  auto pair = [&](const char* key, const Pair& v) {
    os << key << " = " << format_double(v[0]) << ' ' << format_double(v[1]) << '\n';
  };
  os << "gpe2d-tf v1\n";
  pair("mu", g.mu);
  pair("r", g.r);
  pair("R", g.R);
  pair("R_squared", g.R2);
  pair("y1", g.y[0]);
  pair("y2", g.y[1]);
  pair("alpha", g.coeffs.alpha);
  os << "det_theta = " << format_double(g.coeffs.det_theta) << '\n';
  os << "class = " << to_string(g.overlap.cls) << '\n';
  os << "boundary = " << (g.overlap.boundary ? 1 : 0) << '\n';
  os << "strong_coupling = " << (g.strong_coupling ? 1 : 0) << '\n';
}

}  // namespace gpe2d
