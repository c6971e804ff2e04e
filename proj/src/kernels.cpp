#include "ivac/kernels.hpp"

#include <cmath>
#include <vector>

#include "ivac/quadrature.hpp"
#include "ivac/special.hpp"

namespace ivac::kern {

cdouble weighted_dot(const cdouble* a, const cdouble* b, const double* w, long n) {
  const long nblk = (n + kDotBlock - 1) / kDotBlock;
  std::vector<cdouble> partial(nblk);
#pragma omp parallel for schedule(static)
  for (long blk = 0; blk < nblk; ++blk) {
    const long lo = blk * kDotBlock, hi = std::min(n, lo + kDotBlock);
    cdouble s = 0.0;
    for (long j = lo; j < hi; ++j) s += std::conj(a[j]) * b[j] * w[j];
    partial[blk] = s;
  }
  cdouble total = 0.0;
  for (long blk = 0; blk < nblk; ++blk) total += partial[blk];
  return total;
}

cdouble weighted_dot_channels(const cdouble* a, const cdouble* b,
                              const double* w, long n_nodes, long n_channels) {
  std::vector<cdouble> partial(n_channels);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < n_channels; ++c) {
    const cdouble* ac = a + c * n_nodes;
    const cdouble* bc = b + c * n_nodes;
    cdouble s = 0.0;
    for (long j = 0; j < n_nodes; ++j) s += std::conj(ac[j]) * bc[j] * w[j];
    partial[c] = s;
  }
  cdouble total = 0.0;
  for (long c = 0; c < n_channels; ++c) total += partial[c];
  return total;
}

void sbt_real_table(const std::function<double(double)>& f, double ra,
                    double rb, int lmax, const double* k, long nk, double* out) {
  const GaussRule& g = gauss_legendre(16);
  const double pref = std::sqrt(2.0 / M_PI);
#pragma omp parallel for schedule(dynamic)
  for (long j = 0; j < nk; ++j) {
    std::vector<double> jl(lmax + 1), acc(lmax + 1, 0.0);
    const int npanel = panels_for_wavenumber(k[j], ra, rb);
    const double step = (rb - ra) / npanel;
    for (int p = 0; p < npanel; ++p) {
      const double lo = ra + p * step;
      const double mid = lo + 0.5 * step, half = 0.5 * step;
      for (int i = 0; i < 16; ++i) {
        const double r = mid + half * g.x[i];
        const double fr2 = f(r) * r * r * g.w[i] * half;
        if (fr2 == 0.0) continue;
        sph_bessel_all(lmax, k[j] * r, jl.data());
        for (int l = 0; l <= lmax; ++l) acc[l] += fr2 * jl[l];
      }
    }
    for (int l = 0; l <= lmax; ++l) out[l * nk + j] = pref * acc[l];
  }
}

}  // namespace ivac::kern
