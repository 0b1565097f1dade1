#ifndef SOLENOID_QUADRATURE_HPP
#define SOLENOID_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace sol {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule of order q on [-1,1]. Rules are computed once per
/// order and cached; the returned reference stays valid for the program's
/// lifetime.
const QuadratureRule& gauss_legendre(int q);

/// Gauss-Legendre mapped onto [a,b].
QuadratureRule gauss_legendre(int q, double a, double b);

/// Composite Gauss-Legendre: `panels` equal panels of [a,b], order q each.
QuadratureRule composite_gauss_legendre(int q, int panels, double a, double b);

/// Equal-weight rule for periodic integrands over the full period [a,b).
QuadratureRule periodic_trapezoid(int q, double a, double b);

double integrate(const QuadratureRule& rule, const std::function<double(double)>& f);

} // namespace sol

#endif
