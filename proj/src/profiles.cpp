#include "ivac/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "ivac/special.hpp"

namespace ivac {

bool RadialProfile::compact() const { return std::isfinite(r_hi); }

RadialProfile bump_profile(double r_lo, double r_hi, double amplitude) {
  if (!(0.0 <= r_lo && r_lo < r_hi) || !std::isfinite(r_hi))
    throw std::invalid_argument("bump_profile: need 0 <= r_lo < r_hi < inf");
  const double mid = 0.5 * (r_lo + r_hi);
  const double inv = 2.0 / (r_hi - r_lo);  // dt/dr
  RadialProfile p;
  p.r_lo = r_lo;
  p.r_hi = r_hi;
  p.closed_form = "bump";
  p.f = [=](double r) { return amplitude * bump_kernel((r - mid) * inv); };
  p.d1 = [=](double r) { return amplitude * inv * bump_kernel_d1((r - mid) * inv); };
  p.d2 = [=](double r) { return amplitude * inv * inv * bump_kernel_d2((r - mid) * inv); };
  return p;
}

RadialProfile ball_profile(double radius, double amplitude) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("ball_profile: need 0 < radius < inf");
  const double inv = 1.0 / radius;
  RadialProfile p;
  p.r_lo = 0.0;
  p.r_hi = radius;
  p.closed_form = "ball";
  p.f = [=](double r) { return amplitude * bump_kernel(r * inv); };
  p.d1 = [=](double r) { return amplitude * inv * bump_kernel_d1(r * inv); };
  p.d2 = [=](double r) { return amplitude * inv * inv * bump_kernel_d2(r * inv); };
  return p;
}

RadialProfile smoothstep_coulomb(double q, double r1, double r2) {
  if (!(0.0 < r1 && r1 < r2))
    throw std::invalid_argument("smoothstep_coulomb: need 0 < r1 < r2");
  const double du = 1.0 / (r2 - r1);
  const double c = q / (4.0 * std::numbers::pi);
  RadialProfile p;
  p.r_lo = r1;
  p.r_hi = std::numeric_limits<double>::infinity();
  p.closed_form = "smoothstep_coulomb";
  p.f = [=](double r) { return c * smoothstep((r - r1) * du) / r; };
  p.d1 = [=](double r) {
    const double u = (r - r1) * du;
    return c * (smoothstep_d1(u) * du / r - smoothstep(u) / (r * r));
  };
  p.d2 = [=](double r) {
    const double u = (r - r1) * du;
    return c * (smoothstep_d2(u) * du * du / r - 2.0 * smoothstep_d1(u) * du / (r * r) +
                2.0 * smoothstep(u) / (r * r * r));
  };
  return p;
}

RadialProfile smoothstep_coulomb_density(double q, double r1, double r2) {
  if (!(0.0 < r1 && r1 < r2))
    throw std::invalid_argument("smoothstep_coulomb_density: need 0 < r1 < r2");
  const double du = 1.0 / (r2 - r1);
  const double c = -q / (4.0 * std::numbers::pi);
  RadialProfile p;
  p.r_lo = r1;
  p.r_hi = r2;
  p.closed_form = "smoothstep_coulomb_density";
  // -Laplacian of the shifted Coulomb potential: the 1/r and angular pieces
  // cancel, leaving only the second derivative of the step.
  p.f = [=](double r) { return c * smoothstep_d2((r - r1) * du) * du * du / r; };
  return p;
}

RadialProfile restrict_profile(const RadialProfile& p, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("restrict_profile: need a < b");
  RadialProfile out = p;
  out.r_lo = std::max(p.r_lo, a);
  out.r_hi = std::min(p.r_hi, b);
  if (!(out.r_lo < out.r_hi))
    throw std::invalid_argument("restrict_profile: empty intersection");
  return out;
}

RadialProfile scale_profile(const RadialProfile& p, double alpha) {
  RadialProfile out = p;
  out.f = [alpha, f = p.f](double r) { return alpha * f(r); };
  if (p.d1) out.d1 = [alpha, d = p.d1](double r) { return alpha * d(r); };
  if (p.d2) out.d2 = [alpha, d = p.d2](double r) { return alpha * d(r); };
  for (double& v : out.sample_v) v *= alpha;
  return out;
}

RadialProfile sum_profiles(const RadialProfile& a, const RadialProfile& b) {
  RadialProfile out;
  out.r_lo = std::min(a.r_lo, b.r_lo);
  out.r_hi = std::max(a.r_hi, b.r_hi);
  out.closed_form = "";
  out.f = [a, b](double r) { return a(r) + b(r); };
  if (a.d1 && b.d1) {
    auto ad = a.d1, bd = b.d1;
    auto alo = a.r_lo, ahi = a.r_hi, blo = b.r_lo, bhi = b.r_hi;
    out.d1 = [=](double r) {
      double s = 0.0;
      if (r >= alo && r <= ahi) s += ad(r);
      if (r >= blo && r <= bhi) s += bd(r);
      return s;
    };
  }
  if (a.d2 && b.d2) {
    auto ad = a.d2, bd = b.d2;
    auto alo = a.r_lo, ahi = a.r_hi, blo = b.r_lo, bhi = b.r_hi;
    out.d2 = [=](double r) {
      double s = 0.0;
      if (r >= alo && r <= ahi) s += ad(r);
      if (r >= blo && r <= bhi) s += bd(r);
      return s;
    };
  }
  return out;
}

namespace {

// Natural cubic spline data shared by the value/derivative evaluators.
struct Spline {
  std::vector<double> x, y, m;  // m: second derivatives at knots

  double value(double r) const {
    const auto [i, h, t] = locate(r);
    const double a = y[i], b = y[i + 1];
    return (1.0 - t) * a + t * b +
           h * h / 6.0 * ((std::pow(1.0 - t, 3) - (1.0 - t)) * m[i] + (t * t * t - t) * m[i + 1]);
  }
  double deriv(double r) const {
    const auto [i, h, t] = locate(r);
    return (y[i + 1] - y[i]) / h +
           h / 6.0 * ((3.0 * t * t - 1.0) * m[i + 1] - (3.0 * std::pow(1.0 - t, 2) - 1.0) * m[i]);
  }
  double deriv2(double r) const {
    const auto [i, h, t] = locate(r);
    (void)h;
    return (1.0 - t) * m[i] + t * m[i + 1];
  }

 private:
  std::tuple<std::size_t, double, double> locate(double r) const {
    auto it = std::upper_bound(x.begin(), x.end(), r);
    std::size_t i = (it == x.begin()) ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    i = std::min(i, x.size() - 2);
    const double h = x[i + 1] - x[i];
    return {i, h, (r - x[i]) / h};
  }
};

}  // namespace

RadialProfile sampled_profile(std::vector<double> r, std::vector<double> v) {
  const std::size_t n = r.size();
  if (n < 4 || v.size() != n)
    throw std::invalid_argument("sampled_profile: need >= 4 matching samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(r[i] > r[i - 1])) throw std::invalid_argument("sampled_profile: r must increase");

  auto sp = std::make_shared<Spline>();
  sp->x = r;
  sp->y = v;
  sp->m.assign(n, 0.0);
  // Tridiagonal solve (Thomas) for natural boundary conditions.
  std::vector<double> diag(n, 2.0), rhs(n, 0.0), sub(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = r[i] - r[i - 1], h1 = r[i + 1] - r[i];
    sub[i] = h0 / (h0 + h1);
    rhs[i] = 6.0 / (h0 + h1) * ((v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0);
  }
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * (1.0 - sub[i - 1]);
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    sp->m[i] = (rhs[i] - (1.0 - sub[i]) * sp->m[i + 1]) / diag[i];
    if (i == 1) break;
  }

  RadialProfile p;
  p.r_lo = r.front();
  p.r_hi = r.back();
  p.sample_r = std::move(r);
  p.sample_v = std::move(v);
  p.f = [sp](double rr) { return sp->value(rr); };
  p.d1 = [sp](double rr) { return sp->deriv(rr); };
  p.d2 = [sp](double rr) { return sp->deriv2(rr); };
  return p;
}

double eval_angular(const AngularFunction& a, double x) {
  if (a.coeff.empty()) return 0.0;
  const int lmax = a.l_max();
  std::vector<double> y(static_cast<std::size_t>(lmax) + 1);
  ylm_axial_all(lmax, x, y.data());
  double s = 0.0;
  for (int l = 0; l <= lmax; ++l) s += a.coeff[static_cast<std::size_t>(l)] * y[static_cast<std::size_t>(l)];
  return s;
}

std::function<double(double)> angular_constant(double value) {
  return [value](double) { return value; };
}

std::function<double(double)> angular_cap(double theta_edge, double theta_inner) {
  if (!(0.0 < theta_edge && theta_edge < theta_inner && theta_inner < std::numbers::pi))
    throw std::invalid_argument("angular_cap: need 0 < theta_edge < theta_inner < pi");
  const double x_edge = std::cos(theta_edge);    // larger
  const double x_inner = std::cos(theta_inner);  // smaller
  const double span = x_edge - x_inner;
  return [=](double x) { return smoothstep((x_edge - x) / span); };
}

}  // namespace ivac
