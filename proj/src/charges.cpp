#include "ivac/charges.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ivac/quadrature.hpp"
#include "ivac/special.hpp"

namespace ivac {

namespace {

constexpr double kPi = std::numbers::pi;

AngularFunction isotropic_angular() {
  AngularFunction a;
  a.coeff = {std::sqrt(4.0 * kPi)};  // the constant function 1
  return a;
}

double radial_moment(const RadialProfile& p, double power, int npanel = 48) {
  return integrate_panels([&](double r) { return p(r) * std::pow(r, power); }, p.r_lo, p.r_hi,
                          npanel);
}

// Int_l = Int rho(a) h(b) (r_<^l / r_>^{l+1}) a^2 b^2 da db.  The inner
// integral is split exactly at b = a and accumulated incrementally while the
// outer nodes sweep upward, so the cost stays linear in the node count.
double coulomb_pair(const RadialProfile& A, const RadialProfile& B, int l) {
  const GaussRule& gr = gauss_legendre(16);

  auto panel = [&](auto&& f, double a, double b) {
    if (!(b > a)) return 0.0;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t t = 0; t < gr.x.size(); ++t) s += gr.w[t] * f(c + h * gr.x[t]);
    return s * h;
  };
  auto blo = B.r_lo, bhi = B.r_hi;
  auto f_hi = [&](double b) { return B(b) * std::pow(b, l + 2); };
  auto f_lo = [&](double b) { return B(b) * std::pow(b, 1 - l); };
  double g_tot = 0.0;
  {
    const int np = 48;
    for (int i = 0; i < np; ++i)
      g_tot += panel(f_lo, blo + (bhi - blo) * i / np, blo + (bhi - blo) * (i + 1) / np);
  }

  // Outer nodes over supp A, segment edges aligned with supp B boundaries.
  std::vector<double> edges{A.r_lo, A.r_hi};
  if (blo > A.r_lo && blo < A.r_hi) edges.push_back(blo);
  if (bhi > A.r_lo && bhi < A.r_hi) edges.push_back(bhi);
  std::sort(edges.begin(), edges.end());

  double total = 0.0;
  double cursor = blo;  // upper limit reached by the running inner integrals
  double F = 0.0, G = 0.0;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double s0 = edges[e], s1 = edges[e + 1];
    const int np = std::max(12, static_cast<int>(48.0 * (s1 - s0) / (A.r_hi - A.r_lo)));
    for (int ip = 0; ip < np; ++ip) {
      const double p0 = s0 + (s1 - s0) * ip / np, p1 = s0 + (s1 - s0) * (ip + 1) / np;
      const double c = 0.5 * (p0 + p1), hw = 0.5 * (p1 - p0);
      for (std::size_t t = 0; t < gr.x.size(); ++t) {
        const double a = c + hw * gr.x[t];
        const double to = std::clamp(a, blo, bhi);
        if (to > cursor) {
          F += panel(f_hi, cursor, to);
          G += panel(f_lo, cursor, to);
          cursor = to;
        }
        const double inner = std::pow(a, -(l + 1)) * F + std::pow(a, l) * (g_tot - G);
        total += gr.w[t] * hw * A(a) * a * a * inner;
      }
    }
  }
  return total;
}

double overlap_r2(const RadialProfile& A, const RadialProfile& B) {
  const double lo = std::max(A.r_lo, B.r_lo), hi = std::min(A.r_hi, B.r_hi);
  if (!(hi > lo)) return 0.0;
  return integrate_panels([&](double r) { return A(r) * B(r) * r * r; }, lo, hi, 48);
}

double angular_dot(const AngularFunction& a, const AngularFunction& b) {
  const int l = std::min(a.l_max(), b.l_max());
  double s = 0.0;
  for (int i = 0; i <= l; ++i)
    s += a.coeff[static_cast<std::size_t>(i)] * b.coeff[static_cast<std::size_t>(i)];
  return s;
}

// sum_l chiA_l chiB_l Int T[A]_l(k) T[B]_l(k) k^power dk: grid quadrature
// (whose weights carry k^2 dk) plus a Gauss panel on [0, k_min], where both
// transforms are smooth and the grid has no nodes.
double momentum_pair(const RadialProfile& Ar, const AngularFunction& Aa, const RadialProfile& Br,
                     const AngularFunction& Ba, const RadialGrid& grid, int power) {
  const int lmax = std::min(Aa.l_max(), Ba.l_max());
  if (lmax < 0) return 0.0;
  const std::size_t nl = static_cast<std::size_t>(lmax) + 1;
  const std::size_t nn = static_cast<std::size_t>(grid.n_nodes());

  std::vector<double> ta(nl * nn), tb(nl * nn);
  sbt_table(Ar, lmax, std::span<const double>(grid.nodes.data(), nn), ta.data());
  sbt_table(Br, lmax, std::span<const double>(grid.nodes.data(), nn), tb.data());

  const GaussRule& ir = gauss_legendre(8);
  const double kmin = grid.ir_cutoff();
  std::vector<double> kk(ir.x.size());
  for (std::size_t t = 0; t < kk.size(); ++t) kk[t] = 0.5 * kmin * (1.0 + ir.x[t]);
  std::vector<double> ia(nl * kk.size()), ib(nl * kk.size());
  sbt_table(Ar, lmax, kk, ia.data());
  sbt_table(Br, lmax, kk, ib.data());

  double total = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    const double chi = Aa.coeff[static_cast<std::size_t>(l)] * Ba.coeff[static_cast<std::size_t>(l)];
    if (chi == 0.0) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < nn; ++j)
      s += grid.weights[j] * std::pow(grid.nodes[j], power - 2) * ta[static_cast<std::size_t>(l) * nn + j] *
           tb[static_cast<std::size_t>(l) * nn + j];
    for (std::size_t t = 0; t < kk.size(); ++t)
      s += 0.5 * kmin * ir.w[t] * std::pow(kk[t], power) * ia[static_cast<std::size_t>(l) * kk.size() + t] *
           ib[static_cast<std::size_t>(l) * kk.size() + t];
    total += chi * s;
  }
  return total;
}

}  // namespace

ChargeAutomorphism make_charge(double q, double r1, double r2) {
  ChargeAutomorphism c;
  c.rho_r = smoothstep_coulomb_density(q, r1, r2);
  c.rho_ang = isotropic_angular();
  c.q = q;
  c.special_form = true;
  c.r1 = r1;
  c.r2 = r2;
  return c;
}

ChargeAutomorphism make_charge_general(RadialProfile rho_r, AngularFunction rho_ang) {
  if (!rho_r.compact()) throw std::invalid_argument("make_charge_general: density must be compact");
  ChargeAutomorphism c;
  const double mono = radial_moment(rho_r, 2.0);
  c.q = std::sqrt(4.0 * kPi) * rho_ang.coeff.at(0) * mono;
  c.rho_r = std::move(rho_r);
  c.rho_ang = std::move(rho_ang);
  return c;
}

ChargeAutomorphism with_sigma(ChargeAutomorphism base, RadialProfile sigma_r,
                              AngularFunction sigma_ang) {
  if (!sigma_r.compact()) throw std::invalid_argument("with_sigma: smearing must be compact");
  base.sigma_r = std::move(sigma_r);
  base.sigma_ang = std::move(sigma_ang);
  base.has_sigma = true;
  return base;
}

LinearFormReport linear_form(const ChargeAutomorphism& gamma, const TestFunction& f,
                             const RadialGrid& grid) {
  LinearFormReport rep;

  for (const auto& part : f.h) {
    rep.value_momentum += momentum_pair(gamma.rho_r, gamma.rho_ang, part.radial, part.angular, grid, 0);
    // position route: sum_l chi chi /(2l+1) * coulomb pair
    const int lmax = std::min(gamma.rho_ang.l_max(), part.angular.l_max());
    for (int l = 0; l <= lmax; ++l) {
      const double chi = gamma.rho_ang.coeff[static_cast<std::size_t>(l)] *
                         part.angular.coeff[static_cast<std::size_t>(l)];
      if (chi == 0.0) continue;
      rep.value_position += chi / (2.0 * l + 1.0) * coulomb_pair(gamma.rho_r, part.radial, l);
    }
  }
  if (gamma.has_sigma) {
    for (const auto& part : f.g) {
      rep.value_momentum -=
          momentum_pair(gamma.sigma_r, gamma.sigma_ang, part.radial, part.angular, grid, 2);
      rep.value_position -=
          angular_dot(gamma.sigma_ang, part.angular) * overlap_r2(gamma.sigma_r, part.radial);
    }
  }
  rep.discrepancy = std::abs(rep.value_momentum - rep.value_position);
  rep.rel_discrepancy = rep.discrepancy / (std::abs(rep.value_position) + 1e-300);
  return rep;
}

double kappa(const TestFunction& f) {
  double s = 0.0;
  for (const auto& part : f.h)
    s += part.angular.coeff.at(0) / (2.0 * std::sqrt(kPi)) * radial_moment(part.radial, 1.0);
  return s;
}

double kappa_momentum(const TestFunction& f, const RadialGrid& grid) {
  double s = 0.0;
  const std::size_t nn = static_cast<std::size_t>(grid.n_nodes());
  const GaussRule& ir = gauss_legendre(8);
  const double kmin = grid.ir_cutoff();
  for (const auto& part : f.h) {
    std::vector<double> t(nn);
    sbt_table(part.radial, 0, std::span<const double>(grid.nodes.data(), nn), t.data());
    double v = 0.0;
    for (std::size_t j = 0; j < nn; ++j)
      v += grid.weights[j] / (grid.nodes[j] * grid.nodes[j]) * t[j];
    std::vector<double> kk(ir.x.size()), ti(ir.x.size());
    for (std::size_t a = 0; a < kk.size(); ++a) kk[a] = 0.5 * kmin * (1.0 + ir.x[a]);
    sbt_table(part.radial, 0, kk, ti.data());
    for (std::size_t a = 0; a < kk.size(); ++a) v += 0.5 * kmin * ir.w[a] * ti[a];
    s += part.angular.coeff.at(0) / (std::sqrt(2.0) * kPi) * v;
  }
  return s;
}

ModeFunction materialize_difference(const ChargeAutomorphism& g1, const ChargeAutomorphism& g2,
                                    std::shared_ptr<const RadialGrid> grid,
                                    AngularTruncation trunc) {
  const double scale = std::max(std::abs(g1.q), std::abs(g2.q));
  if (std::abs(g1.q - g2.q) > 1e-12 * std::max(scale, 1e-300))
    throw std::invalid_argument(
        "materialize_difference: total charges differ (" + std::to_string(g1.q) + " vs " +
        std::to_string(g2.q) +
        "); the l=0 infrared parts only cancel at equal charge -- rescale one density by the "
        "charge ratio first");

  ModeFunction rho = scalar_to_mode(grid, trunc, g1.rho_r, g1.rho_ang);
  accumulate(rho, scalar_to_mode(grid, trunc, g2.rho_r, g2.rho_ang), {-1.0, 0.0});
  ModeFunction out = apply_radial_power(rho, -1.5);
  for (auto& z : out.coeff) z *= cdouble{0.0, 1.0};

  if (g1.has_sigma || g2.has_sigma) {
    ModeFunction sig = make_mode(grid, trunc);
    if (g1.has_sigma) accumulate(sig, scalar_to_mode(grid, trunc, g1.sigma_r, g1.sigma_ang), {1.0, 0.0});
    if (g2.has_sigma) accumulate(sig, scalar_to_mode(grid, trunc, g2.sigma_r, g2.sigma_ang), {-1.0, 0.0});
    accumulate(out, apply_radial_power(sig, -0.5), {1.0, 0.0});
  }
  return out;
}

cdouble weyl_phase(const ChargeAutomorphism& gamma, const TestFunction& f, const RadialGrid& grid) {
  return std::polar(1.0, linear_form(gamma, f, grid).value_momentum);
}

}  // namespace ivac
