// Timing harness for the OpenMP kernels against their serial references.
// The weighted contractions must agree bitwise (fixed-block summation order);
// the fused shell-operator application is compared against the literal
// projector sum and agrees to rounding.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <vector>

#include "ivac/grid.hpp"
#include "ivac/infravacuum.hpp"
#include "ivac/kernels.hpp"
#include "ivac/modespace.hpp"

using ivac::kern::cdouble;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best(F&& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_ms();
    f();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

void row(const char* name, double serial_ms, double parallel_ms, double defect) {
  std::printf("%-28s %10.3f ms %10.3f ms %8.2fx   max defect %.3e\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms, defect);
}

}  // namespace

int main(int argc, char** argv) {
  long n_nodes = 4096;
  long n_channels = 289;
  int reps = 5;
  if (argc > 1) n_nodes = std::atol(argv[1]);
  if (argc > 2) n_channels = std::atol(argv[2]);
  if (argc > 3) reps = std::atoi(argv[3]);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  const long n = n_nodes * n_channels;
  std::vector<cdouble> a(n), b(n);
  std::vector<double> w(n_nodes);
  for (auto& x : a) x = {g(rng), g(rng)};
  for (auto& x : b) x = {g(rng), g(rng)};
  for (auto& x : w) x = std::abs(g(rng)) + 0.01;

  std::printf("nodes %ld, channels %ld, best of %d\n\n", n_nodes, n_channels, reps);

  cdouble d_ser{}, d_par{};
  const double t1s = time_best([&] { d_ser = ivac::kern::serial::weighted_dot(a.data(), b.data(), w.data(), n_nodes); }, reps);
  const double t1p = time_best([&] { d_par = ivac::kern::weighted_dot(a.data(), b.data(), w.data(), n_nodes); }, reps);
  row("weighted_dot", t1s, t1p, std::abs(d_ser - d_par));

  const double t2s = time_best([&] { d_ser = ivac::kern::serial::weighted_dot_channels(a.data(), b.data(), w.data(), n_nodes, n_channels); }, reps);
  const double t2p = time_best([&] { d_par = ivac::kern::weighted_dot_channels(a.data(), b.data(), w.data(), n_nodes, n_channels); }, reps);
  row("weighted_dot_channels", t2s, t2p, std::abs(d_ser - d_par));

  const int lmax = 16;
  const long nk = 256;
  std::vector<double> k(nk), tab_s((lmax + 1) * nk), tab_p((lmax + 1) * nk);
  for (long j = 0; j < nk; ++j) k[j] = 1e-3 * std::pow(64.0 / 1e-3, double(j) / double(nk - 1));
  auto f = [](double r) { return std::exp(-r) * r; };
  const double t3s = time_best([&] { ivac::kern::serial::sbt_real_table(f, 0.5, 3.0, lmax, k.data(), nk, tab_s.data()); }, reps);
  const double t3p = time_best([&] { ivac::kern::sbt_real_table(f, 0.5, 3.0, lmax, k.data(), nk, tab_p.data()); }, reps);
  double dmax = 0.0;
  for (std::size_t i = 0; i < tab_s.size(); ++i) dmax = std::max(dmax, std::abs(tab_s[i] - tab_p[i]));
  row("sbt_real_table", t3s, t3p, dmax);

  // Fused shell operator vs the literal involution/projector composition.
  const ivac::KprConfig cfg = ivac::make_kpr_config(1.0, 0.5, 1.0, 12);
  std::vector<double> bounds;
  for (int i = 0; i <= 12; ++i) bounds.push_back(std::pow(0.5, i));
  auto grid = ivac::make_grid(bounds, 16, 64.0);
  const ivac::AngularTruncation trunc{16};
  ivac::ModeFunction u = ivac::make_mode(grid, trunc);
  for (auto& x : u.coeff) x = {g(rng), g(rng)};

  ivac::ModeFunction out_f = u, out_r = u;
  const double t4r = time_best([&] { out_r = ivac::apply_T_reference(cfg, u); }, reps);
  const double t4f = time_best([&] { out_f = ivac::apply_T(cfg, u); }, reps);
  dmax = 0.0;
  for (std::size_t i = 0; i < out_f.coeff.size(); ++i)
    dmax = std::max(dmax, std::abs(out_f.coeff[i] - out_r.coeff[i]));
  row("apply_T (fused vs literal)", t4r, t4f, dmax);

  return 0;
}
