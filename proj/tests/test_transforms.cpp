#include <cmath>
#include <memory>
#include <numbers>

#include <doctest.h>

#include "ivac/grid.hpp"
#include "ivac/modespace.hpp"
#include "ivac/profiles.hpp"
#include "ivac/quadrature.hpp"
#include "ivac/transforms.hpp"

using namespace ivac;

namespace {
constexpr double kPi = std::numbers::pi;

std::shared_ptr<const RadialGrid> small_grid(int n_shells = 12, int m = 16) {
  std::vector<double> b;
  for (int i = 0; i <= n_shells; ++i) b.push_back(std::pow(0.5, i));
  return make_grid(b, m, 64.0);
}

RadialProfile gaussian_times(int l) {
  RadialProfile p;
  p.r_lo = 0.0;
  p.r_hi = 14.0;  // exp(-98) truncation, far below double rounding
  p.f = [l](double r) { return std::pow(r, l) * std::exp(-0.5 * r * r); };
  return p;
}

AngularFunction isotropic() {
  AngularFunction a;
  a.coeff = {std::sqrt(4.0 * kPi)};
  return a;
}
}  // namespace

TEST_SUITE("transforms") {
  TEST_CASE("gaussian transform is self-reciprocal") {
    // sqrt(2/pi) Int r^l e^{-r^2/2} j_l(kr) r^2 dr = k^l e^{-k^2/2}.
    for (int l : {0, 1, 2}) {
      const RadialProfile p = gaussian_times(l);
      for (double k : {0.5, 1.0, 2.0}) {
        const std::vector<double> v = sbt(p, l, std::span<const double>{&k, 1});
        CHECK(v[0] == doctest::Approx(std::pow(k, l) * std::exp(-0.5 * k * k)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("bump profile charge density integrates to its charge") {
    const double q = 1.7;
    const RadialProfile rho = smoothstep_coulomb_density(q, 1.0, 2.0);
    const double total =
        4.0 * kPi * integrate_panels([&](double r) { return rho(r) * r * r; }, 1.0, 2.0, 32);
    CHECK(total == doctest::Approx(q).epsilon(1e-13));
  }

  TEST_CASE("smoothstep potential reproduces its density through the laplacian") {
    const double q = 0.8;
    const RadialProfile phi = smoothstep_coulomb(q, 1.0, 2.0);
    const RadialProfile rho = smoothstep_coulomb_density(q, 1.0, 2.0);
    const RadialProfile lap = laplacian_radial(phi);
    for (double r : {1.1, 1.4, 1.5, 1.8, 1.95})
      CHECK(lap(r) == doctest::Approx(rho(r)).epsilon(1e-9));
    // Outside the transition the density vanishes and the potential is
    // exactly Coulomb / exactly zero.
    CHECK(phi(2.5) == doctest::Approx(q / (4.0 * kPi * 2.5)).epsilon(1e-15));
    CHECK(phi(0.9) == 0.0);
    CHECK(rho(2.5) == 0.0);
  }

  TEST_CASE("angular expansion of simple functions") {
    const AngularFunction c = angular_expand([](double) { return 1.0; }, 8);
    CHECK(c.coeff[0] == doctest::Approx(std::sqrt(4.0 * kPi)).epsilon(1e-13));
    for (int l = 1; l <= 8; ++l) CHECK(std::abs(c.coeff[l]) <= 1e-12);

    const AngularFunction x = angular_expand([](double u) { return u; }, 8);
    CHECK(x.coeff[1] == doctest::Approx(2.0 * std::sqrt(kPi / 3.0)).epsilon(1e-13));
    CHECK(std::abs(x.coeff[0]) <= 1e-13);

    // eval_angular reconstructs the input on the plateau.  The cap is C^1, so
    // its Legendre tail decays like l^-3 and the l_max = 24 truncation leaves
    // a few-times-1e-4 reconstruction residual.
    const AngularFunction cap = angular_expand(angular_cap(kPi / 3.0, 2.0 * kPi / 3.0), 24);
    CHECK(eval_angular(cap, std::cos(0.95 * kPi)) == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(std::abs(eval_angular(cap, std::cos(0.1 * kPi))) <= 1e-3);
  }

  TEST_CASE("mode assembly carries the channel phases") {
    auto g = small_grid();
    const AngularTruncation t{4};
    // Pure l = 1 angular part: the channel value is (-i) chi_1 T[h]_1(k).
    AngularFunction a;
    a.coeff = {0.0, 1.0, 0.0, 0.0, 0.0};
    const ModeFunction u = scalar_to_mode(g, t, gaussian_times(1), a);
    const double k0 = g->nodes[10];
    const std::complex<double> expect =
        std::complex<double>{0.0, -1.0} * (k0 * std::exp(-0.5 * k0 * k0));
    CHECK(std::abs(u.channel(1, 0)[10] - expect) <= 1e-10);
    CHECK(std::abs(u.channel(0, 0)[10]) == 0.0);
    CHECK(std::abs(u.channel(2, 0)[10]) == 0.0);
  }

  TEST_CASE("plancherel: mode norm equals position norm") {
    // The transform of a unit-width bump still oscillates near the cutoff, so
    // the default 16 nodes per octave carry a few-times-1e-4 integration
    // floor there; doubling the density collapses it.
    const RadialProfile h = bump_profile(1.0, 2.0, 1.0);
    const double pos2 =
        4.0 * kPi * integrate_panels([&](double r) { return h(r) * h(r) * r * r; }, 1.0, 2.0, 32);
    const AngularTruncation t{2};
    const ModeFunction u16 = scalar_to_mode(small_grid(), t, h, isotropic());
    CHECK(norm(u16) * norm(u16) == doctest::Approx(pos2).epsilon(2e-3));
    const ModeFunction u32 = scalar_to_mode(small_grid(12, 32), t, h, isotropic());
    CHECK(norm(u32) * norm(u32) == doctest::Approx(pos2).epsilon(1e-4));
  }

  TEST_CASE("test function symplectic pairing matches the canonical form") {
    auto g = small_grid(12, 32);
    const AngularTruncation t{2};
    const RadialProfile h = bump_profile(1.0, 2.0, 1.0);
    const RadialProfile gg = bump_profile(1.2, 2.4, 0.7);
    TestFunction fh, fg;
    fh.h.push_back({h, isotropic()});
    fg.g.push_back({gg, isotropic()});
    const ModeFunction mh = build_test_function(g, t, fh);
    const ModeFunction mg = build_test_function(g, t, fg);
    // sigma(f_h, f_g) = -Re<h-hat, g-hat> = -Int h g d^3x.
    const double overlap =
        4.0 * kPi *
        integrate_panels([&](double r) { return h(r) * gg(r) * r * r; }, 1.2, 2.0, 32);
    CHECK(symplectic_form(mh, mg) == doctest::Approx(-overlap).epsilon(1e-4));
  }

  TEST_CASE("dilation is unitary up to the reported lost fraction") {
    auto g = small_grid();
    const AngularTruncation t{2};
    const ModeFunction u = scalar_to_mode(g, t, gaussian_times(0), isotropic());
    const double n2 = norm(u) * norm(u);

    for (double lam : {2.0, 4.0}) {  // exact node gathers on the octave grid
      double lost = 0.0;
      const ModeFunction d = dilate(u, lam, &lost);
      const double n2d = norm(d) * norm(d);
      CHECK(std::abs(n2d + lost * n2 - n2) <= 1e-12 * n2);
      // Exact gather: the channel equals lambda^{3/2} u(lambda k) where the
      // source is on-grid; the gaussian has a closed transform.
      const int j = g->n_nodes() / 2;
      const double lk = lam * g->nodes[j];
      const double expect =
          std::pow(lam, 1.5) * std::sqrt(4.0 * kPi) * std::exp(-0.5 * lk * lk);
      CHECK(std::abs(d.channel(0, 0)[j] - expect) <= 1e-8 * expect);
    }

    // Interpolating dilation stays near-unitary.
    double lost = 0.0;
    const ModeFunction d = dilate(u, 1.3, &lost);
    CHECK(std::abs(norm(d) * norm(d) + lost * n2 - n2) <= 1e-5 * n2);

    // A dilation that pushes essentially all content off the grid throws.
    CHECK_THROWS(static_cast<void>(dilate(u, 1e9)));
  }

  TEST_CASE("dilation composes multiplicatively on the exact ladder") {
    auto g = small_grid();
    const AngularTruncation t{1};
    const ModeFunction u = scalar_to_mode(g, t, gaussian_times(0), isotropic());
    const ModeFunction d4 = dilate(u, 4.0);
    const ModeFunction d22 = dilate(dilate(u, 2.0), 2.0);
    for (std::size_t i = 0; i < d4.coeff.size(); ++i)
      CHECK(std::abs(d4.coeff[i] - d22.coeff[i]) <= 1e-12 * (std::abs(d4.coeff[i]) + 1e-12));
  }
}
