#pragma once

#include <functional>

namespace ivac {

// Composite Gauss-Legendre integral of f over [a,b] with npanel equal panels.
double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, int npanel, int order = 16);

// Panel count sized for an integrand carrying oscillations of wavenumber k
// over [a,b]; at least min_panels either way.
int panels_for_wavenumber(double k, double a, double b, int min_panels = 4);

}  // namespace ivac
