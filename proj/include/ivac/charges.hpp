#pragma once

#include <memory>
#include <span>
#include <string>

#include "ivac/modespace.hpp"
#include "ivac/profiles.hpp"
#include "ivac/transforms.hpp"

namespace ivac {

// Charge-carrying morphism data gamma = omega^{-1/2} sigma-hat
// + i omega^{-3/2} rho-hat with real smearing pair (sigma, rho).  rho is the
// charge density; sigma may be absent.  special_form marks the smoothed
// Coulomb family, for which the potential is known in closed form.
struct ChargeAutomorphism {
  RadialProfile rho_r;
  AngularFunction rho_ang;
  RadialProfile sigma_r;
  AngularFunction sigma_ang;
  bool has_sigma = false;
  double q = 0.0;  // integral of rho
  bool special_form = false;
  double r1 = 0.0, r2 = 0.0;
};

// Smoothed Coulomb charge: rho = -Laplacian Phi with
// Phi = q s((r-r1)/(r2-r1)) / (4 pi r); total charge exactly q.
ChargeAutomorphism make_charge(double q, double r1, double r2);

// General rotation-band charge; q is computed from the l = 0 content.
ChargeAutomorphism make_charge_general(RadialProfile rho_r, AngularFunction rho_ang);
ChargeAutomorphism with_sigma(ChargeAutomorphism base, RadialProfile sigma_r,
                              AngularFunction sigma_ang);

// l_gamma(f) evaluated along both routes:
//   momentum: sum_l chi^rho_l chi^h_l Int T[rho]_l T[h]_l dk
//             - sum_l chi^s_l chi^g_l Int T[sigma]_l T[g]_l k^2 dk,
//     with the grid quadrature completed by a small Gauss panel on
//     [0, k_min] where the integrand is smooth;
//   position: sum_l chi^rho_l chi^h_l / (2l+1) *
//             Int rho(a) h(b) r_<^l / r_>^{l+1} a^2 b^2 da db
//             - Int sigma g d^3x.
struct LinearFormReport {
  double value_momentum = 0.0;
  double value_position = 0.0;
  double discrepancy = 0.0;      // |momentum - position|
  double rel_discrepancy = 0.0;  // discrepancy / (|position| + 1e-300)
};

LinearFormReport linear_form(const ChargeAutomorphism& gamma, const TestFunction& f,
                             const RadialGrid& grid);

// kappa_f = (4 pi)^{-1} Int h(x)/|x| d^3x, position route; the momentum
// route chi^h_0/(sqrt(2) pi) Int T[h]_0(k) dk must agree.
double kappa(const TestFunction& f);
double kappa_momentum(const TestFunction& f, const RadialGrid& grid);

// Mode-space vector of gamma_1 - gamma_2.  Requires equal total charge
// (the l = 0 infrared divergences must cancel); throws otherwise with the
// rescaling hint.
ModeFunction materialize_difference(const ChargeAutomorphism& g1, const ChargeAutomorphism& g2,
                                    std::shared_ptr<const RadialGrid> grid,
                                    AngularTruncation trunc);

// Relative Weyl phase exp(i l_gamma(f)) (momentum-route value).
cdouble weyl_phase(const ChargeAutomorphism& gamma, const TestFunction& f, const RadialGrid& grid);

}  // namespace ivac
