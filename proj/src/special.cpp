#include "ivac/special.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ivac {

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n starting from the Chebyshev estimate.
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = t;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::fabs(dt) < 1e-15) {
        p0 = 1.0;
        p1 = t;
        for (int l = 2; l <= n; ++l) {
          double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (t * p1 - p0) / (t * t - 1.0);
        break;
      }
    }
    // Chebyshev seeds enumerate roots from +1 down; store ascending.
    r.x[n - 1 - i] = t;
    r.w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

void sph_bessel_all(int lmax, double x, double* out) {
  if (lmax < 0) throw std::invalid_argument("sph_bessel_all: lmax < 0");
  if (x < 0) throw std::invalid_argument("sph_bessel_all: x < 0");
  if (x < 1e-280) {
    out[0] = 1.0;
    for (int l = 1; l <= lmax; ++l) out[l] = 0.0;
    return;
  }
  const double j0 = std::sin(x) / x;
  if (lmax == 0) {
    out[0] = j0;
    return;
  }
  const double j1 = j0 / x - std::cos(x) / x;
  if (x > lmax + 2.0) {
    // Upward recurrence is stable once x exceeds the order.
    out[0] = j0;
    out[1] = j1;
    for (int l = 2; l <= lmax; ++l)
      out[l] = (2 * l - 1) / x * out[l - 1] - out[l - 2];
    return;
  }
  // Downward recurrence from a padded start order, normalised against j0
  // (or j1 when x sits near a zero of sin).
  int lstart = lmax + 16 + static_cast<int>(std::sqrt(40.0 * lmax));
  double jp = 0.0, jc = 1e-280;
  for (int l = lstart; l >= 0; --l) {
    double jm = (2 * l + 3) / x * jc - jp;
    jp = jc;
    jc = jm;
    if (l <= lmax) out[l] = jm;
    if (std::fabs(jc) > 1e260) {
      jc *= 1e-260;
      jp *= 1e-260;
      for (int k = l; k <= lmax; ++k) out[k] *= 1e-260;
    }
  }
  double scale;
  if (std::fabs(out[0]) > 1e-3 * std::fabs(out[1]))
    scale = j0 / out[0];
  else
    scale = j1 / out[1];
  for (int l = 0; l <= lmax; ++l) out[l] *= scale;
}

double sph_bessel_one(int l, double x) {
  std::vector<double> buf(l + 1);
  sph_bessel_all(l, x, buf.data());
  return buf[l];
}

void legendre_all(int lmax, double x, double* out) {
  out[0] = 1.0;
  if (lmax == 0) return;
  out[1] = x;
  for (int l = 2; l <= lmax; ++l)
    out[l] = ((2 * l - 1) * x * out[l - 1] - (l - 1) * out[l - 2]) / l;
}

void ylm_axial_all(int lmax, double x, double* out) {
  legendre_all(lmax, x, out);
  for (int l = 0; l <= lmax; ++l)
    out[l] *= std::sqrt((2 * l + 1) / (4.0 * M_PI));
}

void assoc_legendre_norm_all(int lmax, double x, double* out) {
  const int n = lmax + 1;
  for (int i = 0; i < n * n; ++i) out[i] = 0.0;
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  // Diagonal: bar-P_m^m with the Condon-Shortley phase.
  double pmm = std::sqrt(1.0 / (4.0 * M_PI));
  out[0] = pmm;
  for (int m = 1; m <= lmax; ++m) {
    pmm *= -s * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    out[m * n + m] = pmm;
  }
  for (int m = 0; m < lmax; ++m) {
    double pm1 = out[m * n + m];
    double p = x * std::sqrt(2.0 * m + 3.0) * pm1;
    out[(m + 1) * n + m] = p;
    for (int l = m + 2; l <= lmax; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                           (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      double pnew = a * (x * p - b * pm1);
      pm1 = p;
      p = pnew;
      out[l * n + m] = p;
    }
  }
}

double smoothstep(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double smoothstep_d1(double t) {
  if (t <= 0 || t >= 1) return 0.0;
  double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  double ap = a / (t * t), bp = -b / ((1 - t) * (1 - t));
  double D = a + b;
  return (ap * b - a * bp) / (D * D);
}

double smoothstep_d2(double t) {
  if (t <= 0 || t >= 1) return 0.0;
  double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  double t2 = t * t, u = 1 - t, u2 = u * u;
  double ap = a / t2, bp = -b / u2;
  double app = a * (1.0 / (t2 * t2) - 2.0 / (t2 * t));
  double bpp = b * (1.0 / (u2 * u2) - 2.0 / (u2 * u));
  double D = a + b, Dp = ap + bp;
  double g = ap * b - a * bp, gp = app * b - a * bpp;
  return (gp * D - 2.0 * g * Dp) / (D * D * D);
}

double bump_kernel(double t) {
  if (t <= -1 || t >= 1) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));  // normalized: peak value 1 at t = 0
}

double bump_kernel_d1(double t) {
  if (t <= -1 || t >= 1) return 0.0;
  double v = 1.0 - t * t;
  return bump_kernel(t) * (-2.0 * t / (v * v));
}

double bump_kernel_d2(double t) {
  if (t <= -1 || t >= 1) return 0.0;
  double v = 1.0 - t * t;
  double d = -2.0 * t / (v * v);
  double dd = -2.0 / (v * v) - 8.0 * t * t / (v * v * v);
  return bump_kernel(t) * (d * d + dd);
}

double sph_bessel_over_u_total(int l) {
  if (l < 1) throw std::invalid_argument("sph_bessel_over_u_total: needs l >= 1");
  return 0.25 * std::sqrt(M_PI) *
         std::exp(std::lgamma(0.5 * l) - std::lgamma(0.5 * (l + 3)));
}

double sph_bessel_over_u_tail(int l, double a) {
  if (a < 0) throw std::invalid_argument("sph_bessel_over_u_tail: a < 0");
  double head = 0.0;
  const GaussRule& g = gauss_legendre(16);
  // Panels short enough to resolve the j_l oscillation (period 2pi).
  int npanel = std::max(1, static_cast<int>(std::ceil(a / 1.5)));
  double lo = 0.0, step = a / npanel;
  std::vector<double> jl(l + 1);
  for (int p = 0; p < npanel; ++p) {
    double hi = lo + step;
    for (int i = 0; i < 16; ++i) {
      double u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.x[i];
      if (u <= 0) continue;
      sph_bessel_all(l, u, jl.data());
      head += 0.5 * (hi - lo) * g.w[i] * jl[l] / u;
    }
    lo = hi;
  }
  return sph_bessel_over_u_total(l) - head;
}

}  // namespace ivac
