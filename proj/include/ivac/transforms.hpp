#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ivac/modespace.hpp"
#include "ivac/profiles.hpp"

namespace ivac {

// Conventions for a real axisymmetric scalar u(x) = u_r(r) * u_ang(cos th):
//   u-hat_{l,0}(k) = (-i)^l * chi_l * sqrt(2/pi) * Int u_r(r) j_l(kr) r^2 dr,
// all other channels zero.  sbt* return the real radial tables; the (-i)^l
// phase is attached when modes are assembled.

// Table for a single l at the given wavenumbers.
std::vector<double> sbt(const RadialProfile& p, int l, std::span<const double> k);
// All l = 0..l_max at once; row l lives at out[l * k.size() ..].
void sbt_table(const RadialProfile& p, int l_max, std::span<const double> k, double* out);

// Assemble the mode-space image of radial * angular on the grid nodes.
ModeFunction scalar_to_mode(std::shared_ptr<const RadialGrid> grid, AngularTruncation trunc,
                            const RadialProfile& radial, const AngularFunction& angular);

struct ScalarPart {
  RadialProfile radial;
  AngularFunction angular;
};

// One-particle vector of a real test function pair (h, g):
//   f = omega^{-1/2} h-hat + i omega^{+1/2} g-hat.
// The h-part is even under position conjugation, the g-part odd.
struct TestFunction {
  std::vector<ScalarPart> h;
  std::vector<ScalarPart> g;
};

ModeFunction build_test_function(std::shared_ptr<const RadialGrid> grid, AngularTruncation trunc,
                                 const TestFunction& f);

// Unitary dilation (D_lambda u)(k) = lambda^{3/2} u(lambda k).  Exact
// node-gather when the grid is log-uniform and lambda is a power of the
// shell ratio; cubic interpolation in log k otherwise.  The norm^2 fraction
// carried off the grid edge (below the infrared edge for lambda > 1, above
// the ultraviolet cutoff for lambda < 1) is reported through lost_fraction
// and throws above 1e-4; deepen/extend the grid to shrink it.
ModeFunction dilate(const ModeFunction& f, double lambda, double* lost_fraction = nullptr);

// Expand a function of cos(theta) in orthonormal Y_{l0}; node count is
// doubled until the coefficients stabilise.
AngularFunction angular_expand(const std::function<double(double)>& f_of_x, int l_max);

// Square of angular momentum: coeff_l *= l(l+1).
AngularFunction apply_L2(const AngularFunction& a);

// Radial part of -Laplacian: -(p'' + 2 p'/r).  Uses closed-form derivatives
// when present, otherwise a dense spline resample.
RadialProfile laplacian_radial(const RadialProfile& p);

}  // namespace ivac
