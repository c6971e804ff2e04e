#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include <doctest.h>

#include "ivac/grid.hpp"
#include "ivac/modespace.hpp"

using namespace ivac;
using cdouble = std::complex<double>;

namespace {
std::shared_ptr<const RadialGrid> small_grid() {
  std::vector<double> b;
  for (int i = 0; i <= 12; ++i) b.push_back(std::pow(0.5, i));
  return make_grid(b, 16, 64.0);
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

TEST_SUITE("modespace") {
  TEST_CASE("channel layout") {
    CHECK(channel_index(0, 0) == 0);
    CHECK(channel_index(1, -1) == 1);
    CHECK(channel_index(1, 0) == 2);
    CHECK(channel_index(1, 1) == 3);
    CHECK(channel_index(2, -2) == 4);
    CHECK(channel_index(16, 16) == 17 * 17 - 1);
  }

  TEST_CASE("norm of the log mode is pinned by the grid moments") {
    auto g = small_grid();
    ModeFunction u = make_mode(g, AngularTruncation{2});
    // omega^{-3/2} on one channel: ||u||^2 = Int omega^-3 omega^2 domega
    // = log(uv / ir) exactly, by the second moment identity.
    for (int j = 0; j < g->n_nodes(); ++j)
      u.channel(1, 0)[j] = std::pow(g->nodes[j], -1.5);
    const double n2 = norm(u) * norm(u);
    CHECK(n2 == doctest::Approx(std::log(64.0 / std::pow(0.5, 12))).epsilon(1e-13));
    CHECK(std::log(64.0 / std::pow(0.5, 12)) == doctest::Approx(18.0 * std::log(2.0)));
  }

  TEST_CASE("inner product sesquilinearity and symplectic antisymmetry") {
    auto g = small_grid();
    const AngularTruncation t{3};
    ModeFunction u = random_mode_local(g, t, 1), v = random_mode_local(g, t, 2);
    const cdouble a{0.3, -1.1};
    ModeFunction au = u;
    for (auto& c : au.coeff) c *= a;
    CHECK(std::abs(inner_product(au, v) - std::conj(a) * inner_product(u, v)) <=
          1e-12 * std::abs(inner_product(u, v)));
    CHECK(std::abs(inner_product(u, v) - std::conj(inner_product(v, u))) <=
          1e-12 * std::abs(inner_product(u, v)));
    CHECK(std::abs(symplectic_form(u, v) + symplectic_form(v, u)) <=
          1e-12 * (std::abs(symplectic_form(u, v)) + 1.0));
    CHECK(std::abs(symplectic_form(u, u)) <= 1e-12 * norm(u) * norm(u));
  }

  TEST_CASE("radial powers compose and the regularized power caps at eps1") {
    auto g = small_grid();
    const AngularTruncation t{1};
    ModeFunction u = random_mode_local(g, t, 3);
    ModeFunction w = apply_radial_power(apply_radial_power(u, -0.5), 0.5);
    for (std::size_t i = 0; i < u.coeff.size(); ++i)
      CHECK(std::abs(w.coeff[i] - u.coeff[i]) <= 1e-14 * std::abs(u.coeff[i]));

    ModeFunction r = apply_radial_power(u, 1.0, RadialPower::omega_regularized);
    const int uv = g->uv_node_begin();
    // Above eps1 the regularized weight freezes at eps1 = 1.
    for (int j = uv; j < g->n_nodes(); ++j)
      CHECK(r.channel(1, 0)[j] == u.channel(1, 0)[j]);
    // Below eps1 it is plain omega.
    CHECK(std::abs(r.channel(1, 0)[0] - u.channel(1, 0)[0] * g->nodes[0]) <=
          1e-15 * std::abs(u.channel(1, 0)[0]));
  }

  TEST_CASE("infrared flag trips only on deep omega^{-3/2} content") {
    auto g = small_grid();
    const AngularTruncation t{1};
    ModeFunction u = random_mode_local(g, t, 4);
    CHECK(u.ir_flag == IrFlag::regular);
    ModeFunction s = apply_radial_power(u, -1.5);
    CHECK(s.ir_flag == IrFlag::ir_singular);
    // Content far from the infrared edge stays regular under the same power.
    ModeFunction uv_only = project_above(u, 1.0);
    ModeFunction s2 = apply_radial_power(uv_only, -1.5);
    CHECK(s2.ir_flag == IrFlag::regular);
  }

  TEST_CASE("involution is an antiunitary square root of one") {
    auto g = small_grid();
    const AngularTruncation t{3};
    for (auto kind : {Involution::position_conj, Involution::momentum_conj}) {
      ModeFunction u = random_mode_local(g, t, 5), v = random_mode_local(g, t, 6);
      ModeFunction gu = apply_involution(u, kind);
      ModeFunction ggu = apply_involution(gu, kind);
      for (std::size_t i = 0; i < u.coeff.size(); ++i) CHECK(ggu.coeff[i] == u.coeff[i]);
      const cdouble lhs = inner_product(gu, apply_involution(v, kind));
      CHECK(std::abs(lhs - std::conj(inner_product(u, v))) <=
            1e-12 * std::abs(inner_product(u, v)));
    }
  }

  TEST_CASE("shell projections partition the identity") {
    auto g = small_grid();
    const AngularTruncation t{2};
    ModeFunction u = random_mode_local(g, t, 7);
    ModeFunction sum = make_mode(g, t);
    for (int i = 1; i <= g->n_shells(); ++i) accumulate(sum, project_shell(u, i), 1.0);
    accumulate(sum, project_above(u, 1.0), 1.0);  // uv block
    for (std::size_t i = 0; i < u.coeff.size(); ++i)
      CHECK(std::abs(sum.coeff[i] - u.coeff[i]) <= 1e-15 * (std::abs(u.coeff[i]) + 1e-30));
    // Projections are orthogonal: shell 3 content vanishes under shell 5.
    ModeFunction p3 = project_shell(u, 3);
    CHECK(norm(project_shell(p3, 5)) == 0.0);
  }

  TEST_CASE("incompatible modes are rejected") {
    auto g1 = small_grid();
    std::vector<double> b;
    for (int i = 0; i <= 10; ++i) b.push_back(std::pow(0.5, i));
    auto g2 = make_grid(b, 16, 64.0);
    ModeFunction u = make_mode(g1, AngularTruncation{2});
    ModeFunction v = make_mode(g2, AngularTruncation{2});
    CHECK_THROWS(static_cast<void>(inner_product(u, v)));
    ModeFunction w = make_mode(g1, AngularTruncation{3});
    CHECK_THROWS(static_cast<void>(inner_product(u, w)));
  }
}
