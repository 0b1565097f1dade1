#include "solenoid/quadrature.hpp"

#include "solenoid/core.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace sol {

namespace {

// Newton iteration on P_q started from the Chebyshev-like guess
// cos(pi (i + 3/4) / (q + 1/2)); weights 2 / ((1 - x^2) P_q'(x)^2).
QuadratureRule compute_gauss_legendre(int q)
{
  QuadratureRule r;
  r.nodes.resize(static_cast<std::size_t>(q));
  r.weights.resize(static_cast<std::size_t>(q));
  const int half = (q + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= q; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double pq = q == 1 ? x : p1;
      const double pqm1 = q == 1 ? 1.0 : p0;
      dp = q * (x * pq - pqm1) / (x * x - 1.0);
      const double dx = pq / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= q; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = q == 1 ? 1.0 : q * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(q - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(q - 1 - i)] = w;
  }
  if (q % 2 == 1)
    r.nodes[static_cast<std::size_t>(q / 2)] = 0.0;
  return r;
}

} // namespace

const QuadratureRule& gauss_legendre(int q)
{
  if (q < 1)
    throw InputError("quadrature order must be positive");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[q];
  if (!slot)
    slot = std::make_unique<QuadratureRule>(compute_gauss_legendre(q));
  return *slot;
}

QuadratureRule gauss_legendre(int q, double a, double b)
{
  const QuadratureRule& ref = gauss_legendre(q);
  QuadratureRule r;
  r.nodes.reserve(ref.size());
  r.weights.reserve(ref.size());
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    r.nodes.push_back(mid + half * ref.nodes[i]);
    r.weights.push_back(half * ref.weights[i]);
  }
  return r;
}

QuadratureRule composite_gauss_legendre(int q, int panels, double a, double b)
{
  QuadratureRule r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const QuadratureRule piece = gauss_legendre(q, a + p * h, p + 1 == panels ? b : a + (p + 1) * h);
    r.nodes.insert(r.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    r.weights.insert(r.weights.end(), piece.weights.begin(), piece.weights.end());
  }
  return r;
}

QuadratureRule periodic_trapezoid(int q, double a, double b)
{
  if (q < 1)
    throw InputError("quadrature order must be positive");
  QuadratureRule r;
  const double h = (b - a) / q;
  for (int i = 0; i < q; ++i) {
    r.nodes.push_back(a + i * h);
    r.weights.push_back(h);
  }
  return r;
}

double integrate(const QuadratureRule& rule, const std::function<double(double)>& f)
{
  std::vector<double> terms(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i)
    terms[i] = rule.weights[i] * f(rule.nodes[i]);
  return pairwise_sum(terms);
}

} // namespace sol
