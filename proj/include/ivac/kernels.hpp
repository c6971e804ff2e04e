#pragma once

#include <complex>
#include <functional>

// Hot loops, OpenMP-parallel with thread-count-independent results: every
// reduction is accumulated over a fixed block layout and the block partials
// are summed in index order.  ivac::kern::serial carries plain-loop reference
// implementations used by the unit tests and the kernel benchmark.

namespace ivac::kern {

using cdouble = std::complex<double>;

inline constexpr long kDotBlock = 1024;

// sum_j conj(a_j) b_j w_j over n entries.
cdouble weighted_dot(const cdouble* a, const cdouble* b, const double* w, long n);

// Same contraction channel by channel with one shared weight vector:
// sum_c sum_j conj(a[c,j]) b[c,j] w_j.
cdouble weighted_dot_channels(const cdouble* a, const cdouble* b,
                              const double* w, long n_nodes, long n_channels);

// out[l*nk + j] = sqrt(2/pi) int_ra^rb f(r) j_l(k_j r) r^2 dr, all l at once;
// the (-i)^l channel phase is left to the caller.  Panel counts track k_j so
// the Bessel oscillation stays resolved.
void sbt_real_table(const std::function<double(double)>& f, double ra,
                    double rb, int lmax, const double* k, long nk, double* out);

namespace serial {
cdouble weighted_dot(const cdouble* a, const cdouble* b, const double* w, long n);
cdouble weighted_dot_channels(const cdouble* a, const cdouble* b,
                              const double* w, long n_nodes, long n_channels);
void sbt_real_table(const std::function<double(double)>& f, double ra,
                    double rb, int lmax, const double* k, long nk, double* out);
}  // namespace serial

}  // namespace ivac::kern
