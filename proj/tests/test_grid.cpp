#include <cmath>
#include <memory>
#include <numbers>

#include <doctest.h>

#include "ivac/grid.hpp"
#include "ivac/quadrature.hpp"

using namespace ivac;

namespace {
std::shared_ptr<const RadialGrid> default_grid(int n_shells = 12, int m = 16,
                                               double uv = 64.0) {
  std::vector<double> b;
  for (int i = 0; i <= n_shells; ++i) b.push_back(std::pow(0.5, i));
  return make_grid(b, m, uv);
}
}  // namespace

TEST_SUITE("quadrature-grid") {
  TEST_CASE("panel quadrature on smooth integrands") {
    const double s = integrate_panels([](double x) { return std::sin(x); }, 0.0,
                                      std::numbers::pi, 8);
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
    const double e = integrate_panels([](double x) { return std::exp(-x); }, 0.0, 30.0, 16);
    CHECK(e == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("grid layout: shells below, uv segments above") {
    auto g = default_grid();
    CHECK(g->n_shells() == 12);
    CHECK(g->n_nodes() == (12 + 6) * 16);  // uv range [1, 64] splits into 6 octaves
    CHECK(g->ir_cutoff() == doctest::Approx(std::pow(0.5, 12)).epsilon(1e-15));
    CHECK(g->uv_node_begin() == 12 * 16);
    // Shell 1 is the outermost; its nodes sit just below the uv block.
    auto [b0, b1] = g->shell_node_range(1);
    CHECK(b0 == 11 * 16);
    CHECK(b1 == 12 * 16);
    for (int j = b0; j < b1; ++j) {
      CHECK(g->nodes[j] >= 0.5);
      CHECK(g->nodes[j] <= 1.0);
    }
    // Deepest shell occupies the first node block.
    auto [d0, d1] = g->shell_node_range(12);
    CHECK(d0 == 0);
    CHECK(d1 == 16);
    for (int j = 1; j < g->n_nodes(); ++j) CHECK(g->nodes[j] > g->nodes[j - 1]);
  }

  TEST_CASE("per-segment moment identities are exact") {
    auto g = default_grid();
    for (int i = 1; i <= g->n_shells(); ++i) {
      auto [a, b] = g->shell_node_range(i);
      const double hi = g->shell_boundaries[i - 1], lo = g->shell_boundaries[i];
      double m3 = 0.0, mm3 = 0.0;
      for (int j = a; j < b; ++j) {
        m3 += g->weights[j];
        mm3 += g->weights[j] * std::pow(g->nodes[j], -3.0);
      }
      CHECK(m3 == doctest::Approx((hi * hi * hi - lo * lo * lo) / 3.0).epsilon(1e-13));
      CHECK(mm3 == doctest::Approx(std::log(hi / lo)).epsilon(1e-13));
    }
  }

  TEST_CASE("grid quadrature integrates a smooth momentum profile") {
    auto g = default_grid();
    // Int_kmin^uv e^{-k} k^2 dk, compared against panel quadrature.
    double s = 0.0;
    for (int j = 0; j < g->n_nodes(); ++j) s += g->weights[j] * std::exp(-g->nodes[j]);
    const double ref = integrate_panels([](double k) { return std::exp(-k) * k * k; },
                                        g->ir_cutoff(), 64.0, 64);
    CHECK(s == doctest::Approx(ref).epsilon(1e-10));
  }

  TEST_CASE("boundary index finds shell edges") {
    auto g = default_grid();
    CHECK(g->boundary_index(1.0) == 0);
    CHECK(g->boundary_index(0.5) == 1);
    CHECK(g->boundary_index(std::pow(0.5, 12)) == 12);
    CHECK(g->boundary_index(0.3) == -1);
  }

  TEST_CASE("bad grids are rejected") {
    CHECK_THROWS(static_cast<void>(make_grid({1.0, 0.5, 0.6}, 8, 64.0)));   // not decreasing
    CHECK_THROWS(static_cast<void>(make_grid({1.0, 0.5, 0.25}, 8, 0.5)));   // uv below eps1
    CHECK_THROWS(static_cast<void>(make_grid({1.0}, 8, 64.0)));             // no shells
  }
}
