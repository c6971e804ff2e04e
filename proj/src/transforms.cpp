#include "ivac/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ivac/kernels.hpp"
#include "ivac/special.hpp"

namespace ivac {

namespace {

constexpr cdouble kPhase[4] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};

// (-i)^l
cdouble sbt_phase(int l) { return kPhase[l & 3]; }

void require_axis_z(const AngularFunction& a, const char* who) {
  if (std::abs(a.axis[0]) > 1e-12 || std::abs(a.axis[1]) > 1e-12 || std::abs(a.axis[2] - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(who) + ": only the +z axis is supported");
}

void require_transformable(const RadialProfile& p, const char* who) {
  if (!p.compact()) throw std::invalid_argument(std::string(who) + ": profile support is not compact");
  if (!p.f) throw std::invalid_argument(std::string(who) + ": profile has no evaluator");
}

}  // namespace

std::vector<double> sbt(const RadialProfile& p, int l, std::span<const double> k) {
  require_transformable(p, "sbt");
  if (l < 0) throw std::invalid_argument("sbt: l < 0");
  std::vector<double> all(static_cast<std::size_t>(l + 1) * k.size());
  kern::sbt_real_table(p.f, p.r_lo, p.r_hi, l, k.data(), k.size(), all.data());
  return {all.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(l) * k.size()),
          all.end()};
}

void sbt_table(const RadialProfile& p, int l_max, std::span<const double> k, double* out) {
  require_transformable(p, "sbt_table");
  kern::sbt_real_table(p.f, p.r_lo, p.r_hi, l_max, k.data(), k.size(), out);
}

ModeFunction scalar_to_mode(std::shared_ptr<const RadialGrid> grid, AngularTruncation trunc,
                            const RadialProfile& radial, const AngularFunction& angular) {
  require_axis_z(angular, "scalar_to_mode");
  ModeFunction out = make_mode(grid, trunc);
  const int la = std::min(trunc.l_max, angular.l_max());
  if (la < 0) return out;
  const std::size_t nn = static_cast<std::size_t>(grid->n_nodes());
  std::vector<double> table(static_cast<std::size_t>(la + 1) * nn);
  sbt_table(radial, la, std::span<const double>(grid->nodes.data(), nn), table.data());
  for (int l = 0; l <= la; ++l) {
    const double chi = angular.coeff[static_cast<std::size_t>(l)];
    if (chi == 0.0) continue;
    const cdouble fac = sbt_phase(l) * chi;
    cdouble* ch = out.channel(l, 0);
    const double* row = table.data() + static_cast<std::size_t>(l) * nn;
    for (std::size_t j = 0; j < nn; ++j) ch[j] = fac * row[j];
  }
  return out;
}

ModeFunction build_test_function(std::shared_ptr<const RadialGrid> grid, AngularTruncation trunc,
                                 const TestFunction& f) {
  ModeFunction out = make_mode(grid, trunc);
  for (const auto& part : f.h) {
    ModeFunction m = apply_radial_power(scalar_to_mode(grid, trunc, part.radial, part.angular), -0.5);
    accumulate(out, m, {1.0, 0.0});
  }
  for (const auto& part : f.g) {
    ModeFunction m = apply_radial_power(scalar_to_mode(grid, trunc, part.radial, part.angular), 0.5);
    accumulate(out, m, {0.0, 1.0});
  }
  return out;
}

namespace {

// Integer node shift S with log_nodes[i + S] - log_nodes[i] == log(lambda)
// for every i, or -1 when the grid/lambda pair admits no exact gather.
int exact_shift(const std::vector<double>& ln, double log_lambda) {
  const int n = static_cast<int>(ln.size());
  for (int s = 1; s < n; ++s) {
    if (std::abs(ln[static_cast<std::size_t>(s)] - ln[0] - std::abs(log_lambda)) > 1e-12) continue;
    bool ok = true;
    for (int i = 0; i + s < n; ++i)
      if (std::abs(ln[static_cast<std::size_t>(i + s)] - ln[static_cast<std::size_t>(i)] -
                   std::abs(log_lambda)) > 1e-12) {
        ok = false;
        break;
      }
    if (ok) return s;
  }
  return -1;
}

}  // namespace

ModeFunction dilate(const ModeFunction& f, double lambda, double* lost_fraction) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("dilate: lambda must be positive");
  if (lost_fraction) *lost_fraction = 0.0;
  if (lambda == 1.0) return f;
  const RadialGrid& g = *f.grid;
  const int nn = g.n_nodes();
  const int nch = f.trunc.n_channels();
  const double log_lambda = std::log(lambda);
  const double kmin = g.shell_boundaries.back();
  const double scale = std::pow(lambda, 1.5);

  // Norm fraction the gather would drop off the grid edge: source content
  // below lambda*kmin (lambda > 1) or above lambda*Lambda (lambda < 1).
  double lost2 = 0.0, tot2 = 0.0;
  for (int j = 0; j < nn; ++j) {
    double m2 = 0.0;
    for (int c = 0; c < nch; ++c) m2 += std::norm(f.coeff[static_cast<std::size_t>(c) * nn + j]);
    m2 *= g.weights[static_cast<std::size_t>(j)];
    tot2 += m2;
    const double k = g.nodes[static_cast<std::size_t>(j)];
    if ((lambda > 1.0 && k < lambda * kmin) || (lambda < 1.0 && k > lambda * g.uv_cutoff))
      lost2 += m2;
  }
  const double frac = (tot2 > 0.0) ? lost2 / tot2 : 0.0;
  if (lost_fraction) *lost_fraction = frac;
  if (frac > 1e-4)
    throw std::domain_error(
        "dilate: " + std::to_string(frac) +
        " of the norm^2 leaves the grid; extend the grid (more shells for lambda > 1, larger uv "
        "cutoff for lambda < 1) or reduce lambda");

  ModeFunction out = make_mode(f.grid, f.trunc);
  out.ir_flag = f.ir_flag;

  const int shift = exact_shift(g.log_nodes, log_lambda);
  if (shift > 0) {
    const int s = (lambda > 1.0) ? shift : -shift;
    for (int c = 0; c < nch; ++c) {
      const cdouble* src = f.coeff.data() + static_cast<std::size_t>(c) * nn;
      cdouble* dst = out.coeff.data() + static_cast<std::size_t>(c) * nn;
      for (int i = 0; i < nn; ++i) {
        const int j = i + s;
        if (j >= 0 && j < nn) dst[i] = scale * src[j];
      }
    }
    return out;
  }

  // Cubic Lagrange in log k through the 4 nearest nodes.
  const double lo = g.log_nodes.front(), hi = std::log(g.uv_cutoff);
  for (int i = 0; i < nn; ++i) {
    const double q = g.log_nodes[static_cast<std::size_t>(i)] + log_lambda;
    if (q < lo - 1e-12 || q > hi + 1e-12) continue;
    auto it = std::lower_bound(g.log_nodes.begin(), g.log_nodes.end(), q);
    int j0 = static_cast<int>(it - g.log_nodes.begin()) - 2;
    j0 = std::clamp(j0, 0, nn - 4);
    double basis[4];
    for (int a = 0; a < 4; ++a) {
      double num = 1.0, den = 1.0;
      for (int b = 0; b < 4; ++b) {
        if (b == a) continue;
        num *= q - g.log_nodes[static_cast<std::size_t>(j0 + b)];
        den *= g.log_nodes[static_cast<std::size_t>(j0 + a)] - g.log_nodes[static_cast<std::size_t>(j0 + b)];
      }
      basis[a] = num / den;
    }
    for (int c = 0; c < nch; ++c) {
      const cdouble* src = f.coeff.data() + static_cast<std::size_t>(c) * nn;
      cdouble v{0.0, 0.0};
      for (int a = 0; a < 4; ++a) v += basis[a] * src[j0 + a];
      out.coeff[static_cast<std::size_t>(c) * nn + i] = scale * v;
    }
  }
  return out;
}

AngularFunction angular_expand(const std::function<double(double)>& f_of_x, int l_max) {
  if (l_max < 0) throw std::invalid_argument("angular_expand: l_max < 0");
  const std::size_t nl = static_cast<std::size_t>(l_max) + 1;
  std::vector<double> coeff(nl, 0.0), prev;
  std::vector<double> y(nl);
  int n = std::max(64, 2 * l_max + 2);
  for (int pass = 0; pass < 7; ++pass) {
    const GaussRule& gr = gauss_legendre(n);
    std::fill(coeff.begin(), coeff.end(), 0.0);
    for (int a = 0; a < n; ++a) {
      const double fx = f_of_x(gr.x[static_cast<std::size_t>(a)]);
      if (fx == 0.0) continue;
      ylm_axial_all(l_max, gr.x[static_cast<std::size_t>(a)], y.data());
      const double wf = 2.0 * std::numbers::pi * gr.w[static_cast<std::size_t>(a)] * fx;
      for (std::size_t l = 0; l < nl; ++l) coeff[l] += wf * y[l];
    }
    if (!prev.empty()) {
      double dmax = 0.0, cmax = 0.0;
      for (std::size_t l = 0; l < nl; ++l) {
        dmax = std::max(dmax, std::abs(coeff[l] - prev[l]));
        cmax = std::max(cmax, std::abs(coeff[l]));
      }
      if (dmax <= 1e-13 * (1.0 + cmax)) break;
    }
    prev = coeff;
    n *= 2;
  }
  AngularFunction a;
  a.coeff = std::move(coeff);
  double tail = 0.0;
  for (std::size_t l = (nl * 9) / 10; l < nl; ++l) tail = std::max(tail, std::abs(a.coeff[l]));
  a.aliasing_tail = tail;
  return a;
}

AngularFunction apply_L2(const AngularFunction& a) {
  AngularFunction out = a;
  for (int l = 0; l <= a.l_max(); ++l)
    out.coeff[static_cast<std::size_t>(l)] *= static_cast<double>(l) * (l + 1);
  return out;
}

RadialProfile laplacian_radial(const RadialProfile& p) {
  RadialProfile base = p;
  if (!(p.d1 && p.d2)) {
    if (!p.compact()) throw std::invalid_argument("laplacian_radial: need derivatives or compact support");
    const int n = 1025;
    std::vector<double> r(n), v(n);
    for (int i = 0; i < n; ++i) {
      r[static_cast<std::size_t>(i)] = p.r_lo + (p.r_hi - p.r_lo) * i / (n - 1);
      v[static_cast<std::size_t>(i)] = p(r[static_cast<std::size_t>(i)]);
    }
    base = sampled_profile(std::move(r), std::move(v));
  }
  RadialProfile out;
  out.r_lo = base.r_lo;
  out.r_hi = base.r_hi;
  out.closed_form = "laplacian:" + p.closed_form;
  out.f = [d1 = base.d1, d2 = base.d2](double r) { return -(d2(r) + 2.0 * d1(r) / r); };
  return out;
}

}  // namespace ivac
