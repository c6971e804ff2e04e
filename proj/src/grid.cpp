#include "ivac/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "ivac/special.hpp"

namespace ivac {

namespace {

// Appends one segment [lo, hi] of m log-GL nodes, then nudges the weights by
// the least-norm correction that makes both segment moments exact.
void append_segment(double lo, double hi, int m, std::vector<double>& nodes,
                    std::vector<double>& logs, std::vector<double>& weights) {
  const GaussRule& g = gauss_legendre(m);
  const double ta = std::log(lo), tb = std::log(hi);
  const double mid = 0.5 * (ta + tb), half = 0.5 * (tb - ta);
  const size_t base = nodes.size();
  for (int i = 0; i < m; ++i) {
    double t = mid + half * g.x[i];
    double w3 = std::exp(3.0 * t);
    nodes.push_back(std::exp(t));
    logs.push_back(t);
    weights.push_back(g.w[i] * half * w3);
  }
  // Moment residuals against the closed forms.
  double s0 = 0, s1 = 0, a00 = 0, a01 = 0, a11 = 0;
  for (size_t j = base; j < nodes.size(); ++j) {
    double inv3 = 1.0 / (nodes[j] * nodes[j] * nodes[j]);
    s0 += weights[j];
    s1 += weights[j] * inv3;
    a00 += 1.0;
    a01 += inv3;
    a11 += inv3 * inv3;
  }
  const double r0 = (hi * hi * hi - lo * lo * lo) / 3.0 - s0;
  const double r1 = std::log(hi / lo) - s1;
  const double det = a00 * a11 - a01 * a01;
  const double mu0 = (a11 * r0 - a01 * r1) / det;
  const double mu1 = (a00 * r1 - a01 * r0) / det;
  for (size_t j = base; j < nodes.size(); ++j) {
    double inv3 = 1.0 / (nodes[j] * nodes[j] * nodes[j]);
    weights[j] += mu0 + mu1 * inv3;
  }
}

}  // namespace

std::pair<int, int> RadialGrid::shell_node_range(int i) const {
  const int n = n_shells();
  if (i < 1 || i > n) throw std::out_of_range("shell_node_range: shell index");
  int first = (n - i) * nodes_per_shell;
  return {first, first + nodes_per_shell};
}

int RadialGrid::uv_node_begin() const { return n_shells() * nodes_per_shell; }

int RadialGrid::boundary_index(double eps) const {
  for (size_t k = 0; k < shell_boundaries.size(); ++k) {
    double b = shell_boundaries[k];
    if (std::fabs(eps - b) <= 1e-12 * b) return static_cast<int>(k);
  }
  return -1;
}

std::shared_ptr<const RadialGrid> make_grid(std::vector<double> shell_boundaries,
                                            int nodes_per_shell,
                                            double uv_cutoff) {
  if (shell_boundaries.size() < 2)
    throw std::invalid_argument("make_grid: need at least one shell");
  for (size_t k = 0; k + 1 < shell_boundaries.size(); ++k)
    if (!(shell_boundaries[k] > shell_boundaries[k + 1]))
      throw std::invalid_argument("make_grid: boundaries must decrease strictly");
  if (!(shell_boundaries.back() > 0))
    throw std::invalid_argument("make_grid: boundaries must be positive");
  if (nodes_per_shell < 2)
    throw std::invalid_argument("make_grid: nodes_per_shell must be >= 2");
  if (!(uv_cutoff > shell_boundaries.front()))
    throw std::invalid_argument("make_grid: uv_cutoff must exceed eps_1");

  auto grid = std::make_shared<RadialGrid>();
  grid->shell_boundaries = std::move(shell_boundaries);
  grid->nodes_per_shell = nodes_per_shell;
  grid->uv_cutoff = uv_cutoff;

  const int n = grid->n_shells();
  for (int i = n; i >= 1; --i)
    append_segment(grid->shell_boundaries[i], grid->shell_boundaries[i - 1],
                   nodes_per_shell, grid->nodes, grid->log_nodes, grid->weights);

  const double eps1 = grid->shell_boundaries.front();
  const double w_ref =
      std::log(grid->shell_boundaries[0] / grid->shell_boundaries[1]);
  const double w_top = std::log(uv_cutoff / eps1);
  const int nsub = std::max(1, static_cast<int>(std::ceil(w_top / w_ref - 1e-9)));
  for (int s = 0; s < nsub; ++s)
    append_segment(eps1 * std::exp(w_top * s / nsub),
                   eps1 * std::exp(w_top * (s + 1) / nsub), nodes_per_shell,
                   grid->nodes, grid->log_nodes, grid->weights);
  return grid;
}

bool same_grid(const RadialGrid& a, const RadialGrid& b) {
  if (&a == &b) return true;
  return a.shell_boundaries == b.shell_boundaries &&
         a.nodes_per_shell == b.nodes_per_shell && a.uv_cutoff == b.uv_cutoff;
}

}  // namespace ivac
