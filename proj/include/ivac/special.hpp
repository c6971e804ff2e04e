#pragma once

#include <vector>

namespace ivac {

// Gauss-Legendre rule on [-1,1]; results are cached per n.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

// j_0..j_lmax at x >= 0 in one sweep.  Upward recurrence where it is stable
// (x comfortably above lmax), Miller-style downward recurrence otherwise.
void sph_bessel_all(int lmax, double x, double* out);
double sph_bessel_one(int l, double x);

// P_0..P_lmax at x in [-1,1].
void legendre_all(int lmax, double x, double* out);

// Orthonormal spherical harmonic Y_{l0}(theta) evaluated through cos(theta);
// out[l] = sqrt((2l+1)/4pi) P_l(x).
void ylm_axial_all(int lmax, double x, double* out);

// Fully normalised associated Legendre bar-P_l^m(x) for m = 0..lmax, packed
// row-major as out[l*(lmax+1)+m]; entries with m > l are zero.  Together with
// exp(i m phi) these give orthonormal Y_lm.
void assoc_legendre_norm_all(int lmax, double x, double* out);

// C-infinity step: 0 below t=0, 1 above t=1, plus first two derivatives.
double smoothstep(double t);
double smoothstep_d1(double t);
double smoothstep_d2(double t);

// Reference bump profile exp(-1/(1-t^2)) on (-1,1), with derivatives.
double bump_kernel(double t);
double bump_kernel_d1(double t);
double bump_kernel_d2(double t);

// int_0^inf j_l(u)/u du  (finite for l >= 1).
double sph_bessel_over_u_total(int l);

// int_a^inf j_l(u)/u du for a >= 0, accurate over the full argument range.
double sph_bessel_over_u_tail(int l, double a);

}  // namespace ivac
