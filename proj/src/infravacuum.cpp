#include "ivac/infravacuum.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ivac {

double KprConfig::xi_norm2(int i) const {
  return std::log(shell_boundaries[static_cast<std::size_t>(i) - 1] /
                  shell_boundaries[static_cast<std::size_t>(i)]);
}

std::vector<std::string> kpr_violations(double eps1, double q_ratio, double b_alpha, int n_shells,
                                        int l_cap) {
  std::vector<std::string> v;
  if (!(eps1 > 0.0) || !std::isfinite(eps1)) v.push_back("eps1 must be positive and finite");
  if (!(q_ratio > 0.0 && q_ratio < 1.0)) v.push_back("q_ratio must lie in (0,1)");
  if (n_shells < 1) v.push_back("n_shells must be >= 1");
  if (l_cap < 1) v.push_back("l_cap must be >= 1");
  if (!std::isfinite(b_alpha)) v.push_back("b_alpha must be finite");
  if (std::isfinite(b_alpha)) {
    if (!(2.0 * b_alpha > 1.0)) {
      std::ostringstream os;
      os << "increment series b_i^2 log(eps_i/eps_{i+1}) ~ i^(-" << 2.0 * b_alpha
         << ") is not summable (need exponent > 1, i.e. b_alpha > 1/2)";
      v.push_back(os.str());
    }
    // b_i = 0.5 i^{-alpha} must stay in (0,1) over the requested ladder.
    if (b_alpha < 0.0 && n_shells >= 1) {
      const double b_last = 0.5 * std::pow(static_cast<double>(n_shells), -b_alpha);
      if (b_last >= 1.0) {
        std::ostringstream os;
        os << "b_" << n_shells << " = " << b_last << " leaves (0,1)";
        v.push_back(os.str());
      }
    }
  }
  return v;
}

KprConfig make_kpr_config(double eps1, double q_ratio, double b_alpha, int n_shells,
                          Involution conjugation, int l_cap) {
  auto v = kpr_violations(eps1, q_ratio, b_alpha, n_shells, l_cap);
  if (!v.empty()) {
    std::string msg = "make_kpr_config: ";
    for (std::size_t i = 0; i < v.size(); ++i) msg += (i ? "; " : "") + v[i];
    throw std::invalid_argument(msg);
  }
  KprConfig cfg;
  cfg.l_cap = l_cap;
  cfg.conjugation = conjugation;
  cfg.q_ratio = q_ratio;
  cfg.b_alpha = b_alpha;
  cfg.shell_boundaries.resize(static_cast<std::size_t>(n_shells) + 1);
  for (int i = 0; i <= n_shells; ++i)
    cfg.shell_boundaries[static_cast<std::size_t>(i)] = eps1 * std::pow(q_ratio, i);
  cfg.b.resize(static_cast<std::size_t>(n_shells));
  for (int i = 1; i <= n_shells; ++i)
    cfg.b[static_cast<std::size_t>(i) - 1] = 0.5 * std::pow(static_cast<double>(i), -b_alpha);
  return cfg;
}

SummabilityReport summability(const KprConfig& cfg, int terms) {
  SummabilityReport rep;
  const double eps1 = cfg.shell_boundaries.front();
  const double logq = std::log(1.0 / cfg.q_ratio);
  auto rank_of = [&](int i) {
    const int L = std::min(i, cfg.l_cap);
    return static_cast<double>(L) * (L + 2);
  };
  auto b_of = [&](int i) { return 0.5 * std::pow(static_cast<double>(i), -cfg.b_alpha); };

  double epart = 0.0, ipart = 0.0;
  for (int i = 1; i <= terms; ++i) {
    const double eps_i = eps1 * std::pow(cfg.q_ratio, i - 1);
    const double bi = b_of(i);
    const double et = eps_i * rank_of(i) / (bi * bi);
    const double it = bi * bi * logq;
    epart += et;
    ipart += it;
    rep.energy_terms.push_back(et);
    rep.energy_partials.push_back(epart);
    rep.increment_terms.push_back(it);
    rep.increment_partials.push_back(ipart);
  }

  // Energy series: eventually geometric with ratio q (polynomial factors
  // flatten out), so the ratio test settles it.
  const std::size_t n = rep.energy_terms.size();
  const double r = rep.energy_terms[n - 1] / rep.energy_terms[n - 2];
  rep.energy_tail_ratio = r;
  rep.energy_summable = r < 1.0;
  rep.energy_total = rep.energy_summable ? epart + rep.energy_terms[n - 1] * r / (1.0 - r) : epart;

  // Increment series: fit terms ~ i^{-p} over the top half and compare the
  // exponent against 1 (the ratio test is inconclusive for power laws).
  {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int cnt = 0;
    for (int i = terms / 2; i <= terms; ++i) {
      const double x = std::log(static_cast<double>(i));
      const double y = std::log(rep.increment_terms[static_cast<std::size_t>(i) - 1]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++cnt;
    }
    const double p = -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    rep.increment_exponent = p;
    rep.increment_summable = p > 1.0 + 1e-9;
    if (rep.increment_summable) {
      const double last = rep.increment_terms.back();
      rep.increment_total = ipart + last * terms / (p - 1.0);  // integral tail
    } else {
      rep.increment_total = ipart;
    }
  }

  std::ostringstream os;
  os << "energy series term ratio -> " << rep.energy_tail_ratio << " ("
     << (rep.energy_summable ? "summable" : "divergent") << "); increment series exponent "
     << rep.increment_exponent << " (" << (rep.increment_summable ? "summable" : "not summable")
     << ")";
  rep.detail = os.str();
  return rep;
}

namespace {

// The config ladder must be a prefix of the grid ladder so shell i of the
// config is exactly grid shell i.
void require_prefix(const KprConfig& cfg, const RadialGrid& g) {
  const int nc = cfg.n_shells();
  if (g.n_shells() < nc)
    throw std::invalid_argument("kpr: grid has fewer shells than the operator ladder");
  for (int j = 0; j <= nc; ++j) {
    const double a = cfg.shell_boundaries[static_cast<std::size_t>(j)];
    const double b = g.shell_boundaries[static_cast<std::size_t>(j)];
    if (std::abs(a - b) > 1e-12 * std::max(a, b))
      throw std::invalid_argument("kpr: operator shell ladder is not a prefix of the grid ladder");
  }
}

struct ShellData {
  int first = 0, last = 0;
  std::vector<double> xi;   // omega^{-3/2} at the shell nodes
  std::vector<double> wxi;  // w_j * xi_j  (so <xi, u> = sum wxi_j u_j)
  double inv_norm2 = 0.0;   // 1 / ||xi||^2
};

ShellData shell_data(const KprConfig& cfg, const RadialGrid& g, int i) {
  ShellData sd;
  std::tie(sd.first, sd.last) = g.shell_node_range(i);
  sd.xi.resize(static_cast<std::size_t>(sd.last - sd.first));
  sd.wxi.resize(sd.xi.size());
  for (int j = sd.first; j < sd.last; ++j) {
    const double x = std::pow(g.nodes[static_cast<std::size_t>(j)], -1.5);
    sd.xi[static_cast<std::size_t>(j - sd.first)] = x;
    sd.wxi[static_cast<std::size_t>(j - sd.first)] = g.weights[static_cast<std::size_t>(j)] * x;
  }
  sd.inv_norm2 = 1.0 / cfg.xi_norm2(i);
  return sd;
}

cdouble xi_component(const ShellData& sd, const cdouble* ch) {
  cdouble s{0.0, 0.0};
  for (int j = sd.first; j < sd.last; ++j)
    s += sd.wxi[static_cast<std::size_t>(j - sd.first)] * ch[j];
  return s * sd.inv_norm2;
}

// out_ch += c * <xi, ch> xi on the shell.
void add_projected(const ShellData& sd, const cdouble* ch, cdouble c, cdouble* out_ch) {
  const cdouble p = c * xi_component(sd, ch);
  for (int j = sd.first; j < sd.last; ++j)
    out_ch[j] += p * sd.xi[static_cast<std::size_t>(j - sd.first)];
}

// Generic 1 + sum_i coeff_i Q_i with the angular band clipped to the
// truncation of u.
ModeFunction apply_diagonal(const KprConfig& cfg, const ModeFunction& u,
                            const std::vector<double>& coeff) {
  require_prefix(cfg, *u.grid);
  ModeFunction out = u;
  for (int i = 1; i <= cfg.n_shells(); ++i) {
    if (coeff[static_cast<std::size_t>(i) - 1] == 0.0) continue;
    const ShellData sd = shell_data(cfg, *u.grid, i);
    const int L = std::min(cfg.l_band(i), u.trunc.l_max);
    for (int l = 1; l <= L; ++l)
      for (int m = -l; m <= l; ++m)
        add_projected(sd, u.channel(l, m), coeff[static_cast<std::size_t>(i) - 1],
                      out.channel(l, m));
  }
  return out;
}

int gamma_sign(Involution kind, int l, int m) {
  const int e = (kind == Involution::position_conj) ? l + m : m;
  return (e & 1) ? -1 : 1;
}

// Fused T / T^{-1}: for each channel a = (l,m) with partner b = (l,-m),
//   out_a += [ (avg_i - 1) p_a + dsign * diff_i * s_a * conj(p_b) ] xi_i
// over shells, where p = <xi_i, u>/||xi_i||^2, avg = (b_i + 1/b_i)/2,
// diff = (1/b_i - b_i)/2 and s_a is the conjugation sign.  dsign = +1 gives
// T, -1 gives T^{-1}.
ModeFunction apply_T_fused(const KprConfig& cfg, const ModeFunction& u, double dsign) {
  require_prefix(cfg, *u.grid);
  const int ns = cfg.n_shells();
  std::vector<ShellData> shells;
  shells.reserve(static_cast<std::size_t>(ns));
  for (int i = 1; i <= ns; ++i) shells.push_back(shell_data(cfg, *u.grid, i));

  ModeFunction out = u;
  const int lmax = u.trunc.l_max;
  const int nch = u.trunc.n_channels();

#pragma omp parallel for schedule(static)
  for (int c = (lmax >= 1 ? 1 : nch); c < nch; ++c) {
    int l = static_cast<int>(std::sqrt(static_cast<double>(c)));
    while ((l + 1) * (l + 1) <= c) ++l;
    while (l * l > c) --l;
    const int m = c - l * l - l;
    const cdouble* ua = u.coeff.data() + static_cast<std::size_t>(c) * u.grid->n_nodes();
    const cdouble* ub =
        u.coeff.data() + static_cast<std::size_t>(channel_index(l, -m)) * u.grid->n_nodes();
    cdouble* oa = out.coeff.data() + static_cast<std::size_t>(c) * u.grid->n_nodes();
    const double sa = gamma_sign(cfg.conjugation, l, m);
    for (int i = 1; i <= ns; ++i) {
      if (l > std::min(cfg.l_band(i), lmax)) continue;
      const ShellData& sd = shells[static_cast<std::size_t>(i) - 1];
      const double bi = cfg.b[static_cast<std::size_t>(i) - 1];
      const double avg = 0.5 * (bi + 1.0 / bi);
      const double diff = 0.5 * (1.0 / bi - bi);
      const cdouble pa = xi_component(sd, ua);
      const cdouble pb = xi_component(sd, ub);
      const cdouble amp = (avg - 1.0) * pa + dsign * diff * sa * std::conj(pb);
      for (int j = sd.first; j < sd.last; ++j)
        oa[j] += amp * sd.xi[static_cast<std::size_t>(j - sd.first)];
    }
  }
  return out;
}

ModeFunction random_mode(std::shared_ptr<const RadialGrid> grid, AngularTruncation trunc,
                         std::mt19937_64& rng) {
  ModeFunction m = make_mode(grid, trunc);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (auto& z : m.coeff) z = {nd(rng), nd(rng)};
  return m;
}

}  // namespace

ModeFunction apply_Q(const KprConfig& cfg, int i, const ModeFunction& u) {
  if (i < 1 || i > cfg.n_shells()) throw std::invalid_argument("apply_Q: shell index out of range");
  require_prefix(cfg, *u.grid);
  const int L = cfg.l_band(i);
  if (L > u.trunc.l_max)
    throw std::invalid_argument("apply_Q: angular band min(i, l_cap) exceeds the mode truncation");
  const ShellData sd = shell_data(cfg, *u.grid, i);
  ModeFunction out = make_mode(u.grid, u.trunc);
  for (int l = 1; l <= L; ++l)
    for (int m = -l; m <= l; ++m) add_projected(sd, u.channel(l, m), {1.0, 0.0}, out.channel(l, m));
  return out;
}

ModeFunction apply_T1(const KprConfig& cfg, const ModeFunction& u) {
  std::vector<double> c(cfg.b.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = cfg.b[i] - 1.0;
  return apply_diagonal(cfg, u, c);
}

ModeFunction apply_T2(const KprConfig& cfg, const ModeFunction& u) {
  std::vector<double> c(cfg.b.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 1.0 / cfg.b[i] - 1.0;
  return apply_diagonal(cfg, u, c);
}

ModeFunction apply_T(const KprConfig& cfg, const ModeFunction& u) {
  return apply_T_fused(cfg, u, +1.0);
}

ModeFunction apply_T_inverse(const KprConfig& cfg, const ModeFunction& u) {
  return apply_T_fused(cfg, u, -1.0);
}

ModeFunction apply_T_reference(const KprConfig& cfg, const ModeFunction& u) {
  const ModeFunction gu = apply_involution(u, cfg.conjugation);
  ModeFunction plus = u, minus = u;
  accumulate(plus, gu, {0.5, 0.0});
  accumulate(plus, u, {-0.5, 0.0});   // plus = (u + Gu)/2
  accumulate(minus, gu, {-0.5, 0.0});
  accumulate(minus, u, {-0.5, 0.0});  // minus = (u - Gu)/2
  ModeFunction out = apply_T2(cfg, plus);
  accumulate(out, apply_T1(cfg, minus), {1.0, 0.0});
  return out;
}

T2BoundReport t2_regularized_bound(const KprConfig& cfg, std::shared_ptr<const RadialGrid> grid,
                                   AngularTruncation trunc, int power_iters, std::uint64_t seed) {
  T2BoundReport rep;
  double s = 0.0;
  for (int i = 1; i <= cfg.n_shells(); ++i) {
    const double c = 1.0 / cfg.b[static_cast<std::size_t>(i) - 1] - 1.0;
    s += c * c * cfg.eps(i);
  }
  rep.majorant = std::sqrt(s);
  rep.norm_bound = std::sqrt(cfg.shell_boundaries.front()) + rep.majorant;

  std::mt19937_64 rng(seed);
  ModeFunction x = random_mode(grid, trunc, rng);
  double nx = norm(x);
  for (auto& z : x.coeff) z /= nx;
  double lambda = 0.0;
  int it = 0;
  for (; it < power_iters; ++it) {
    ModeFunction y = apply_T2(cfg, x);
    y = apply_radial_power(y, 1.0, RadialPower::omega_regularized);
    y = apply_T2(cfg, y);
    const double next = inner_product(x, y).real();
    const double ny = norm(y);
    if (ny == 0.0) break;
    for (auto& z : y.coeff) z /= ny;
    x = std::move(y);
    if (it > 4 && std::abs(next - lambda) <= 1e-13 * std::abs(next)) {
      lambda = next;
      ++it;
      break;
    }
    lambda = next;
  }
  rep.iterations = it;
  rep.empirical_norm = std::sqrt(std::max(lambda, 0.0));
  return rep;
}

RestrictedNormReport restricted_t2_norms(const KprConfig& cfg,
                                         std::shared_ptr<const RadialGrid> grid,
                                         AngularTruncation trunc, int power_iters,
                                         std::uint64_t seed) {
  RestrictedNormReport rep;
  std::mt19937_64 rng(seed);
  for (int n = 1; n <= cfg.n_shells(); ++n) {
    double ex = 1.0;
    for (int i = 1; i <= n; ++i) ex = std::max(ex, 1.0 / cfg.b[static_cast<std::size_t>(i) - 1]);
    rep.exact.push_back(ex);

    // Content above eps_{n+1} is preserved by T2, so the restriction is a
    // genuine invariant-subspace norm.
    ModeFunction x = project_above(random_mode(grid, trunc, rng),
                                   cfg.shell_boundaries[static_cast<std::size_t>(n)]);
    double nx = norm(x);
    for (auto& z : x.coeff) z /= nx;
    double est = 1.0;
    for (int it = 0; it < power_iters; ++it) {
      ModeFunction y = apply_T2(cfg, x);
      const double ny = norm(y);
      if (ny == 0.0) break;
      for (auto& z : y.coeff) z /= ny;
      x = std::move(y);
      if (it > 4 && std::abs(ny - est) <= 1e-13 * ny) {
        est = ny;
        break;
      }
      est = ny;
    }
    rep.empirical.push_back(est);
  }
  return rep;
}

SymplecticCheckReport symplectic_check(const KprConfig& cfg,
                                       std::shared_ptr<const RadialGrid> grid,
                                       AngularTruncation trunc, int n_pairs, std::uint64_t seed) {
  SymplecticCheckReport rep;
  rep.pairs = n_pairs;
  std::mt19937_64 rng(seed);
  for (int p = 0; p < n_pairs; ++p) {
    ModeFunction f = random_mode(grid, trunc, rng);
    ModeFunction g = random_mode(grid, trunc, rng);
    const double nf = norm(f), ng = norm(g);
    for (auto& z : f.coeff) z /= nf;
    for (auto& z : g.coeff) z /= ng;
    const ModeFunction tf = apply_T(cfg, f), tg = apply_T(cfg, g);
    const double s1 = symplectic_form(f, g), s2 = symplectic_form(tf, tg);
    rep.max_symplectic_defect =
        std::max(rep.max_symplectic_defect, std::abs(s2 - s1) / (1.0 + std::abs(s1)));
    ModeFunction back = apply_T_inverse(cfg, tf);
    accumulate(back, f, {-1.0, 0.0});
    rep.max_inverse_defect = std::max(rep.max_inverse_defect, norm(back));
  }
  return rep;
}

StateValueReport state_value(const KprConfig& cfg, const ModeFunction& f) {
  StateValueReport rep;
  rep.f_norm = norm(f);
  rep.tf_norm = norm(apply_T(cfg, f));
  rep.state_value = std::exp(-0.25 * rep.tf_norm * rep.tf_norm);
  rep.vacuum_value = std::exp(-0.25 * rep.f_norm * rep.f_norm);
  return rep;
}

}  // namespace ivac
