#pragma once

#include <memory>
#include <vector>

namespace ivac {

// Radial momentum grid over [eps_{N+1}, Lambda].  Shell i = [eps_{i+1}, eps_i)
// with shells indexed 1..N from the outermost boundary eps_1 downward; the
// segment [eps_1, Lambda] covers the region above the shell stack.  Nodes are
// Gauss-Legendre in log(omega) per segment; weights carry the measure
// omega^2 d(omega) and are moment-corrected so that per segment both
//   sum w_j           = (hi^3 - lo^3)/3        (exact mass of omega^2)
//   sum w_j omega^-3  = log(hi/lo)             (exact mass of omega^-1)
// hold to rounding.  The second identity is what pins ||xi_i||^2 on shells.
struct RadialGrid {
  std::vector<double> shell_boundaries;  // eps_1 > ... > eps_{N+1} > 0
  int nodes_per_shell = 0;
  double uv_cutoff = 0.0;  // Lambda > eps_1

  std::vector<double> nodes;      // strictly increasing
  std::vector<double> log_nodes;  // log(nodes)
  std::vector<double> weights;

  int n_shells() const { return static_cast<int>(shell_boundaries.size()) - 1; }
  int n_nodes() const { return static_cast<int>(nodes.size()); }
  double ir_cutoff() const { return shell_boundaries.back(); }

  // Half-open node index range [first, last) of shell i (1-based).
  std::pair<int, int> shell_node_range(int i) const;
  // First node index at or above omega = eps_1.
  int uv_node_begin() const;
  // Index into shell_boundaries of a boundary equal to eps, or -1.
  int boundary_index(double eps) const;
};

// Builds the grid.  The segment [eps_1, Lambda] is split into equal-log
// sub-segments no wider than the first shell, each carrying nodes_per_shell
// nodes, so UV resolution matches the shell stack.
std::shared_ptr<const RadialGrid> make_grid(std::vector<double> shell_boundaries,
                                            int nodes_per_shell,
                                            double uv_cutoff);

bool same_grid(const RadialGrid& a, const RadialGrid& b);

}  // namespace ivac
