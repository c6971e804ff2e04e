#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "ivac/kernels.hpp"

using ivac::kern::cdouble;

namespace {
struct Arrays {
  std::vector<cdouble> a, b;
  std::vector<double> w;
};

Arrays random_arrays(long n, unsigned seed) {
  Arrays r;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  r.a.resize(n);
  r.b.resize(n);
  r.w.resize(n);
  for (long i = 0; i < n; ++i) {
    r.a[i] = {g(rng), g(rng)};
    r.b[i] = {g(rng), g(rng)};
    r.w[i] = std::abs(g(rng)) + 1e-3;
  }
  return r;
}
}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("weighted dot: parallel equals serial bitwise across block edges") {
    for (long n : {1L, 7L, 1000L, 1024L, 1025L, 4096L + 7L}) {
      const Arrays r = random_arrays(n, 21);
      const cdouble s = ivac::kern::serial::weighted_dot(r.a.data(), r.b.data(), r.w.data(), n);
      const cdouble p = ivac::kern::weighted_dot(r.a.data(), r.b.data(), r.w.data(), n);
      CHECK(s.real() == p.real());
      CHECK(s.imag() == p.imag());
    }
  }

  TEST_CASE("channel contraction: parallel equals serial bitwise") {
    const long n_nodes = 288, n_channels = 81;
    const Arrays r = random_arrays(n_nodes * n_channels, 22);
    std::vector<double> w(r.w.begin(), r.w.begin() + n_nodes);
    const cdouble s = ivac::kern::serial::weighted_dot_channels(r.a.data(), r.b.data(), w.data(),
                                                                n_nodes, n_channels);
    const cdouble p =
        ivac::kern::weighted_dot_channels(r.a.data(), r.b.data(), w.data(), n_nodes, n_channels);
    CHECK(s.real() == p.real());
    CHECK(s.imag() == p.imag());
  }

  TEST_CASE("transform table: parallel equals serial bitwise and is deterministic") {
    const int lmax = 10;
    const long nk = 96;
    std::vector<double> k(nk);
    for (long j = 0; j < nk; ++j)
      k[j] = 1e-3 * std::pow(64.0 / 1e-3, static_cast<double>(j) / (nk - 1));
    auto f = [](double r) { return (1.0 + r) * std::exp(-r); };
    std::vector<double> t_ser((lmax + 1) * nk), t_par((lmax + 1) * nk), t_again((lmax + 1) * nk);
    ivac::kern::serial::sbt_real_table(f, 0.3, 4.0, lmax, k.data(), nk, t_ser.data());
    ivac::kern::sbt_real_table(f, 0.3, 4.0, lmax, k.data(), nk, t_par.data());
    ivac::kern::sbt_real_table(f, 0.3, 4.0, lmax, k.data(), nk, t_again.data());
    for (std::size_t i = 0; i < t_ser.size(); ++i) {
      CHECK(t_par[i] == t_ser[i]);
      CHECK(t_again[i] == t_par[i]);
    }
  }
}
