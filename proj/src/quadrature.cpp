#include "ivac/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "ivac/special.hpp"

namespace ivac {

double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, int npanel, int order) {
  if (npanel < 1) throw std::invalid_argument("integrate_panels: npanel < 1");
  const GaussRule& g = gauss_legendre(order);
  const double step = (b - a) / npanel;
  double total = 0.0;
  for (int p = 0; p < npanel; ++p) {
    double lo = a + p * step, hi = lo + step;
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += g.w[i] * f(mid + half * g.x[i]);
    total += half * s;
  }
  return total;
}

int panels_for_wavenumber(double k, double a, double b, int min_panels) {
  double cycles = std::fabs(k) * (b - a) / (2.0 * M_PI);
  return std::max(min_panels, static_cast<int>(std::ceil(2.0 * cycles)) + 1);
}

}  // namespace ivac
