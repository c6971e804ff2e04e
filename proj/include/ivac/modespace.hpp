#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "ivac/grid.hpp"

namespace ivac {

using cdouble = std::complex<double>;

struct AngularTruncation {
  int l_max = 8;
  int n_channels() const { return (l_max + 1) * (l_max + 1); }
};

// Channel layout for coefficients c_{l,m}: l*l + l + m.
inline int channel_index(int l, int m) { return l * l + l + m; }

enum class Involution { position_conj, momentum_conj };
enum class RadialPower { omega, omega_regularized };

// ir_singular marks constructions whose continuum norm diverges as the
// infrared cutoff is removed (an omega^{-3/2} scaling reaching the deepest
// shell); the grid value is still finite.
enum class IrFlag { regular, ir_singular };

// One-particle vector in the (l,m) x radial-node basis.  The grid measure
// already contains omega^2, so ||u||^2 = sum |c|^2 w_j.
struct ModeFunction {
  std::shared_ptr<const RadialGrid> grid;
  AngularTruncation trunc;
  std::vector<cdouble> coeff;  // [channel * n_nodes + node]
  IrFlag ir_flag = IrFlag::regular;

  cdouble* channel(int l, int m) {
    return coeff.data() + static_cast<size_t>(channel_index(l, m)) * grid->n_nodes();
  }
  const cdouble* channel(int l, int m) const {
    return coeff.data() + static_cast<size_t>(channel_index(l, m)) * grid->n_nodes();
  }
};

ModeFunction make_mode(std::shared_ptr<const RadialGrid> grid,
                       AngularTruncation trunc);

cdouble inner_product(const ModeFunction& u, const ModeFunction& v);
double norm(const ModeFunction& u);

// sigma(f1,f2) = -Im <f1,f2>.
double symplectic_form(const ModeFunction& f1, const ModeFunction& f2);

// Multiplies by omega^s, or by the regularised omega_r^s which follows
// omega^s below eps_1 and freezes at eps_1^s above it.
ModeFunction apply_radial_power(const ModeFunction& u, double s,
                                RadialPower kind = RadialPower::omega);

// position_conj: (Gu)_{l,m} = (-1)^{l+m} conj(u_{l,-m});
// momentum_conj: (Gu)_{l,m} = (-1)^m conj(u_{l,-m}).
ModeFunction apply_involution(const ModeFunction& u, Involution kind);

// P_eps: zeroes all nodes with omega < eps; eps must be a shell boundary.
ModeFunction project_above(const ModeFunction& u, double eps);
// P_i = P_{eps_{i+1}} - P_{eps_i}: restriction to shell i.
ModeFunction project_shell(const ModeFunction& u, int i);

// Pointwise synthesis sum_lm c_{l,m}(omega_j) Y_lm(theta,phi) at node j.
cdouble eval_at_node(const ModeFunction& u, int node, double theta, double phi);

void require_compatible(const ModeFunction& u, const ModeFunction& v);

// acc += scale * src over all coefficients.
void accumulate(ModeFunction& acc, const ModeFunction& src, cdouble scale);

}  // namespace ivac
