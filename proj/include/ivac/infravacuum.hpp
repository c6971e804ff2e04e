#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ivac/modespace.hpp"

namespace ivac {

// Shell-ladder configuration of the infravacuum operator family.  Shell i
// (1-based) covers [eps_{i+1}, eps_i); the block Q_i acts there as
// |xi_i><xi_i| / ||xi_i||^2 tensored with the angular span 0 < l <= min(i,
// l_cap), with xi = omega^{-3/2} so ||xi_i||^2 = log(eps_i / eps_{i+1}).
struct KprConfig {
  std::vector<double> shell_boundaries;  // eps_1 > ... > eps_{N+1} > 0
  std::vector<double> b;                 // b_1..b_N, each in (0,1)
  int l_cap = 64;
  Involution conjugation = Involution::position_conj;
  double q_ratio = 0.5;  // eps_{i+1}/eps_i
  double b_alpha = 1.0;  // b_i = 0.5 * i^{-b_alpha}

  int n_shells() const { return static_cast<int>(b.size()); }
  double eps(int i) const { return shell_boundaries[static_cast<std::size_t>(i) - 1]; }
  // ||xi_i||^2, exact on the grid by the weight moment identity.
  double xi_norm2(int i) const;
  // Angular band of Q_i.
  int l_band(int i) const { return i < l_cap ? i : l_cap; }
  // dim of the angular span: L(L+2) with L = l_band(i); no l = 0 content.
  int rank(int i) const {
    const int L = l_band(i);
    return L * (L + 2);
  }
};

// Empty when admissible; otherwise one message per violated condition.
std::vector<std::string> kpr_violations(double eps1, double q_ratio, double b_alpha, int n_shells,
                                        int l_cap);

// Builds eps_i = eps1 * q^{i-1} and b_i = 0.5 * i^{-b_alpha}; throws
// std::invalid_argument listing every violated admissibility condition.
KprConfig make_kpr_config(double eps1, double q_ratio, double b_alpha, int n_shells,
                          Involution conjugation = Involution::position_conj, int l_cap = 64);

// Convergence diagnostics for the two series that gate admissibility:
//   energy_terms[i]    = eps_i * rank(Q_i) / b_i^2   (mean-energy bound)
//   increment_terms[i] = b_i^2 * log(eps_i/eps_{i+1}) (intertwiner increments)
// The energy series is geometric (ratio test); the increment series is a
// power law, so its exponent is fitted and compared against 1.
struct SummabilityReport {
  std::vector<double> energy_terms, energy_partials;
  std::vector<double> increment_terms, increment_partials;
  double energy_total = 0.0;          // partial + geometric tail estimate
  double energy_tail_ratio = 0.0;     // limiting term ratio
  double increment_total = 0.0;       // partial + integral tail estimate
  double increment_exponent = 0.0;    // fitted p in terms ~ i^-p
  bool energy_summable = false;
  bool increment_summable = false;
  std::string detail;
};

SummabilityReport summability(const KprConfig& cfg, int terms = 400);

// Projection Q_i u.  Throws if the angular band min(i, l_cap) exceeds the
// truncation of u, or if the config ladder is not a prefix of the grid's.
ModeFunction apply_Q(const KprConfig& cfg, int i, const ModeFunction& u);

// T1 = 1 + sum (b_i - 1) Q_i,  T2 = 1 + sum (1/b_i - 1) Q_i.  The angular
// band is silently clipped to the truncation of u (exact for band-limited u).
ModeFunction apply_T1(const KprConfig& cfg, const ModeFunction& u);
ModeFunction apply_T2(const KprConfig& cfg, const ModeFunction& u);

// T = T2 (1+G)/2 + T1 (1-G)/2 with G the configured conjugation: fused
// per-channel-pair kernel.  apply_T_inverse applies T1 (1+G)/2 + T2 (1-G)/2.
ModeFunction apply_T(const KprConfig& cfg, const ModeFunction& u);
ModeFunction apply_T_inverse(const KprConfig& cfg, const ModeFunction& u);

// Literal composition T2 P+ + T1 P- through the public pieces; serial.  The
// fused kernel must reproduce it to rounding.
ModeFunction apply_T_reference(const KprConfig& cfg, const ModeFunction& u);

// ||omega_r^{1/2} (T2 - 1)|| <= sqrt(sum (1/b_i - 1)^2 eps_i) = majorant, so
// ||omega_r^{1/2} T2|| <= sqrt(eps_1) + majorant.  empirical_norm estimates
// the left side by power iteration on the self-adjoint square.
struct T2BoundReport {
  double majorant = 0.0;        // bound on ||omega_r^{1/2} (T2-1)||
  double norm_bound = 0.0;      // sqrt(eps_1) + majorant
  double empirical_norm = 0.0;  // power-iteration estimate of ||omega_r^{1/2} T2||
  int iterations = 0;
};

T2BoundReport t2_regularized_bound(const KprConfig& cfg, std::shared_ptr<const RadialGrid> grid,
                                   AngularTruncation trunc, int power_iters = 150,
                                   std::uint64_t seed = 0);

// ||T2|| restricted to content above eps_{n+1}, for n = 1..n_shells: exact
// value max(1/b_i, i <= n) alongside the power-iteration estimate.
struct RestrictedNormReport {
  std::vector<double> exact, empirical;
};
RestrictedNormReport restricted_t2_norms(const KprConfig& cfg,
                                         std::shared_ptr<const RadialGrid> grid,
                                         AngularTruncation trunc, int power_iters = 80,
                                         std::uint64_t seed = 0);

// sigma(Tf, Tg) = sigma(f, g) and T_inv(T f) = f on random band-limited
// pairs; reports the worst relative defects.
struct SymplecticCheckReport {
  double max_symplectic_defect = 0.0;
  double max_inverse_defect = 0.0;
  int pairs = 0;
};
SymplecticCheckReport symplectic_check(const KprConfig& cfg,
                                       std::shared_ptr<const RadialGrid> grid,
                                       AngularTruncation trunc, int n_pairs = 16,
                                       std::uint64_t seed = 0);

// Quasi-free expectation value exp(-||Tf||^2 / 4) against the vacuum value
// exp(-||f||^2 / 4).
struct StateValueReport {
  double f_norm = 0.0, tf_norm = 0.0;
  double state_value = 0.0, vacuum_value = 0.0;
};
StateValueReport state_value(const KprConfig& cfg, const ModeFunction& f);

}  // namespace ivac
