#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace ivac {

// Real radial factor of a position-space scalar, vanishing outside
// [r_lo, r_hi].  Closed-form profiles carry first and second derivatives so
// the radial Laplacian needs no differencing.  r_hi may be +inf (Coulomb-type
// potentials); such profiles cannot be transformed, only evaluated.
struct RadialProfile {
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::function<double(double)> f;
  std::function<double(double)> d1;  // optional
  std::function<double(double)> d2;  // optional
  std::string closed_form;           // tag, empty for sampled data
  std::vector<double> sample_r;      // populated for sampled profiles
  std::vector<double> sample_v;

  double operator()(double r) const { return (r < r_lo || r > r_hi) ? 0.0 : f(r); }
  bool compact() const;
};

// Smooth bump amp * exp(-1/(1-t^2)), t = (2r - r_lo - r_hi)/(r_hi - r_lo).
RadialProfile bump_profile(double r_lo, double r_hi, double amplitude);

// Smooth profile supported on the ball [0, radius]: amplitude * bump(r / radius).
// Nonzero at the origin, so pairings against it keep a genuine long-distance
// tail instead of saturating once supports separate.
RadialProfile ball_profile(double radius, double amplitude);

// Phi(r) = q * s((r-r1)/(r2-r1)) / (4 pi r): zero below r1, Coulomb above r2.
RadialProfile smoothstep_coulomb(double q, double r1, double r2);

// -Laplacian of the above in closed form: -q s''(u) u'^2 / (4 pi r) on
// [r1, r2].  Integrates to exactly q.
RadialProfile smoothstep_coulomb_density(double q, double r1, double r2);

// Same evaluator, support clipped to [a, b] (used to split compact pieces
// off potentials with Coulomb tails).
RadialProfile restrict_profile(const RadialProfile& p, double a, double b);

RadialProfile scale_profile(const RadialProfile& p, double alpha);
RadialProfile sum_profiles(const RadialProfile& a, const RadialProfile& b);

// Natural cubic interpolation through (r, v); zero outside the data range.
RadialProfile sampled_profile(std::vector<double> r, std::vector<double> v);

// Real axisymmetric angular factor, stored as coefficients against the
// orthonormal Y_{l0}.  aliasing_tail records max |coeff| over the top decile
// of l as an expansion-quality witness.
struct AngularFunction {
  std::vector<double> coeff;
  std::array<double, 3> axis{0.0, 0.0, 1.0};
  double aliasing_tail = 0.0;

  int l_max() const { return static_cast<int>(coeff.size()) - 1; }
};

// Value at polar angle theta = acos(x) about the stored axis.
double eval_angular(const AngularFunction& a, double x);

// Pointwise angular factories (arguments in cos(theta)).
std::function<double(double)> angular_constant(double value);
// Smooth cap around theta = pi: 1 for theta >= theta_inner, 0 for
// theta <= theta_edge, smoothstep transition between.
std::function<double(double)> angular_cap(double theta_edge, double theta_inner);

}  // namespace ivac
