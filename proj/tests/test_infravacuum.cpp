#include <cmath>
#include <memory>
#include <random>

#include <doctest.h>

#include "ivac/grid.hpp"
#include "ivac/infravacuum.hpp"
#include "ivac/modespace.hpp"

using namespace ivac;
using cdouble = std::complex<double>;

namespace {
std::shared_ptr<const RadialGrid> small_grid(int n_shells = 12, int m = 16) {
  std::vector<double> b;
  for (int i = 0; i <= n_shells; ++i) b.push_back(std::pow(0.5, i));
  return make_grid(b, m, 64.0);
}

ModeFunction random_mode_local(std::shared_ptr<const RadialGrid> g, AngularTruncation t,
                               unsigned seed) {
  ModeFunction u = make_mode(g, t);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  for (auto& c : u.coeff) c = {n(rng), n(rng)};
  return u;
}
}  // namespace

TEST_SUITE("infravacuum") {
  TEST_CASE("admissibility gate") {
    CHECK(kpr_violations(1.0, 0.5, 1.0, 12, 64).empty());
    const auto v = kpr_violations(1.0, 0.5, 0.4, 12, 64);
    REQUIRE(!v.empty());
    bool mentions_alpha = false;
    for (auto& s : v)
      if (s.find("b_alpha") != std::string::npos) mentions_alpha = true;
    CHECK(mentions_alpha);
    CHECK_THROWS(static_cast<void>(make_kpr_config(1.0, 0.5, 0.4, 12)));
    CHECK(!kpr_violations(1.0, 1.5, 1.0, 12, 64).empty());  // ratio outside (0,1)
    CHECK(!kpr_violations(-1.0, 0.5, 1.0, 12, 64).empty());
  }

  TEST_CASE("ladder geometry") {
    const KprConfig cfg = make_kpr_config(1.0, 0.5, 1.0, 12);
    CHECK(cfg.n_shells() == 12);
    CHECK(cfg.eps(1) == 1.0);
    CHECK(cfg.eps(2) == doctest::Approx(0.5).epsilon(1e-15));
    for (int i = 1; i <= 12; ++i) {
      CHECK(cfg.xi_norm2(i) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
      CHECK(cfg.b[static_cast<std::size_t>(i) - 1] ==
            doctest::Approx(0.5 / i).epsilon(1e-15));
      CHECK(cfg.l_band(i) == std::min(i, 64));
      CHECK(cfg.rank(i) == cfg.l_band(i) * (cfg.l_band(i) + 2));
    }
  }

  TEST_CASE("summability of the defining series") {
    const KprConfig cfg = make_kpr_config(1.0, 0.5, 1.0, 12);
    const SummabilityReport s = summability(cfg);
    CHECK(s.energy_summable);
    CHECK(s.increment_summable);
    CHECK(s.increment_exponent == doctest::Approx(2.0).epsilon(0.03));
    CHECK(s.energy_tail_ratio == doctest::Approx(0.5).epsilon(0.05));
    CHECK(s.energy_total > 0.0);
    CHECK(std::isfinite(s.increment_total));
  }

  TEST_CASE("shell projections: idempotent, self-adjoint, orthogonal") {
    auto g = small_grid();
    const AngularTruncation t{8};
    const KprConfig cfg = make_kpr_config(1.0, 0.5, 1.0, 12);
    const ModeFunction u = random_mode_local(g, t, 11), v = random_mode_local(g, t, 12);

    const ModeFunction q3 = apply_Q(cfg, 3, u);
    const ModeFunction q3q3 = apply_Q(cfg, 3, q3);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.coeff.size(); ++i) {
      num = std::max(num, std::abs(q3q3.coeff[i] - q3.coeff[i]));
      den = std::max(den, std::abs(q3.coeff[i]));
    }
    CHECK(num <= 1e-12 * den);

    const cdouble a = inner_product(apply_Q(cfg, 3, u), v);
    const cdouble b = inner_product(u, apply_Q(cfg, 3, v));
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));

    CHECK(norm(apply_Q(cfg, 5, apply_Q(cfg, 3, u))) <= 1e-12 * norm(u));

    // Band exceeding the angular truncation is an error.
    CHECK_THROWS(static_cast<void>(apply_Q(cfg, 9, u)));
  }

  TEST_CASE("T1 T2 = 1 and the fused operator matches the literal one") {
    auto g = small_grid();
    const AngularTruncation t{16};
    const KprConfig cfg = make_kpr_config(1.0, 0.5, 1.0, 12);
    const ModeFunction u = random_mode_local(g, t, 13);

    const ModeFunction rt = apply_T1(cfg, apply_T2(cfg, u));
    double dmax = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < u.coeff.size(); ++i) {
      dmax = std::max(dmax, std::abs(rt.coeff[i] - u.coeff[i]));
      scale = std::max(scale, std::abs(u.coeff[i]));
    }
    CHECK(dmax <= 1e-13 * scale);

    const ModeFunction tf = apply_T(cfg, u);
    const ModeFunction tr = apply_T_reference(cfg, u);
    dmax = 0.0;
    for (std::size_t i = 0; i < u.coeff.size(); ++i)
      dmax = std::max(dmax, std::abs(tf.coeff[i] - tr.coeff[i]));
    CHECK(dmax <= 1e-12 * norm(u));

    const ModeFunction inv = apply_T_inverse(cfg, tf);
    dmax = 0.0;
    for (std::size_t i = 0; i < u.coeff.size(); ++i)
      dmax = std::max(dmax, std::abs(inv.coeff[i] - u.coeff[i]));
    CHECK(dmax <= 1e-12 * scale);
  }

  TEST_CASE("T commutes with its defining involution") {
    auto g = small_grid();
    const AngularTruncation t{8};
    for (auto kind : {Involution::position_conj, Involution::momentum_conj}) {
      const KprConfig cfg = make_kpr_config(1.0, 0.5, 1.0, 12, kind, 8);
      const ModeFunction u = random_mode_local(g, t, 14);
      const ModeFunction a = apply_involution(apply_T(cfg, u), kind);
      const ModeFunction b = apply_T(cfg, apply_involution(u, kind));
      double dmax = 0.0;
      for (std::size_t i = 0; i < u.coeff.size(); ++i)
        dmax = std::max(dmax, std::abs(a.coeff[i] - b.coeff[i]));
      CHECK(dmax <= 1e-12 * norm(u));
    }
  }

  TEST_CASE("symplectic form is preserved") {
    auto g = small_grid();
    const KprConfig cfg = make_kpr_config(1.0, 0.5, 1.0, 12);
    const SymplecticCheckReport r = symplectic_check(cfg, g, AngularTruncation{8}, 16, 0);
    CHECK(r.pairs == 16);
    CHECK(r.max_symplectic_defect <= 1e-10);
    CHECK(r.max_inverse_defect <= 1e-10);
  }

  TEST_CASE("regularized growth bound holds empirically") {
    auto g = small_grid();
    const KprConfig cfg = make_kpr_config(1.0, 0.5, 1.0, 12);
    const T2BoundReport r = t2_regularized_bound(cfg, g, AngularTruncation{13}, 150, 0);
    CHECK(r.empirical_norm <= r.norm_bound * (1.0 + 1e-9));
    CHECK(r.empirical_norm >= 0.9);  // the identity block above eps_1 alone gives ~1
    CHECK(r.norm_bound == doctest::Approx(1.0 + r.majorant).epsilon(1e-12));
  }

  TEST_CASE("restricted norms witness unboundedness") {
    auto g = small_grid();
    const KprConfig cfg = make_kpr_config(1.0, 0.5, 1.0, 12);
    const RestrictedNormReport r = restricted_t2_norms(cfg, g, AngularTruncation{13}, 200, 0);
    REQUIRE(r.exact.size() == 12);
    for (std::size_t n = 0; n < r.exact.size(); ++n) {
      CHECK(r.exact[n] == doctest::Approx(2.0 * (static_cast<double>(n) + 1.0)).epsilon(1e-12));
      CHECK(std::abs(r.empirical[n] - r.exact[n]) <= 2e-2 * r.exact[n]);
      if (n > 0) CHECK(r.empirical[n] >= r.empirical[n - 1] * (1.0 - 1e-9));
    }
  }

  TEST_CASE("state value interpolates between 1 and the vacuum gaussian") {
    auto g = small_grid();
    const AngularTruncation t{8};
    const KprConfig cfg = make_kpr_config(1.0, 0.5, 1.0, 12, Involution::position_conj, 8);
    ModeFunction u = random_mode_local(g, t, 15);
    const double n = norm(u);
    for (auto& c : u.coeff) c /= n;  // unit vector
    const StateValueReport r = state_value(cfg, u);
    CHECK(r.f_norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.vacuum_value == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
    CHECK(r.state_value > 0.0);
    CHECK(r.state_value <= 1.0);
  }
}
