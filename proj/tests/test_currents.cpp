#include "oracles.hpp"

#include "solenoid/core.hpp"
#include "solenoid/currents.hpp"

#include <doctest.h>

#include <random>

using namespace sol;

namespace {

CantorTransversal middle(double ratio, int depth, double p = 0.5)
{
  CantorSpec s;
  s.ratio = ratio;
  s.depth = depth;
  s.p = p;
  return CantorTransversal::build(s);
}

std::vector<SolenoidModel> fleet()
{
  const auto k = middle(1.0 / 3.0, 8);
  return {SolenoidModel::kronecker(std::sqrt(2.0) - 1, 8),
          SolenoidModel(Ambient{}, CantorSuspension{ReturnMap::odometer(), 0.5}, k),
          SolenoidModel(Ambient{}, GraphSolenoid{Profile::cosine_well(0.1), 0, 1}, k),
          SolenoidModel::horizontal_circles(k)};
}

DifferentialForm trig_function(std::mt19937_64& rng, int max_freq = 3)
{
  std::uniform_int_distribution<int> f(-max_freq, max_freq);
  std::normal_distribution<double> g;
  TrigPoly c(2);
  for (int t = 0; t < 4; ++t)
    c.add_term({f(rng), f(rng)}, g(rng), g(rng));
  return DifferentialForm::function(c);
}

DifferentialForm dx(int i)
{
  return DifferentialForm::constant(2, index_from_list({i}), 1.0);
}

} // namespace

TEST_CASE("horizontal circles carry the class (1, 0)")
{
  const auto m = SolenoidModel::horizontal_circles(middle(1.0 / 3.0, 6));
  CHECK(evaluate_current(m, dx(0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(evaluate_current(m, dx(1)) == 0.0);
  const auto c = rs_class(m);
  CHECK(c.coeffs[0] == doctest::Approx(1.0));
  CHECK(c.coeffs[1] == 0.0);
}

TEST_CASE("Kronecker class is the unit direction")
{
  for (double a : {std::sqrt(2.0) - 1, std::sqrt(3.0) - 1, 0.1}) {
    const auto c = rs_class(SolenoidModel::kronecker(a, 8));
    const double s = std::sqrt(1 + a * a);
    CHECK(c.coeffs[0] == doctest::Approx(1 / s).epsilon(1e-12));
    CHECK(c.coeffs[1] == doctest::Approx(a / s).epsilon(1e-12));
  }
}

TEST_CASE("Kronecker current matches the Lebesgue integral of a trig 1-form")
{
  // <S, f dx1 + g dx2> = integral over T^2 of (f u1 + g u2); only the zero
  // frequency survives.
  const double a = std::sqrt(2.0) - 1;
  const double s = std::sqrt(1 + a * a);
  TrigPoly f(2), g(2);
  f.add_term({0, 0}, 0.7, 0.0);
  f.add_term({1, 2}, 0.3, -0.4);
  g.add_term({0, 0}, -1.1, 0.0);
  g.add_term({0, 1}, 0.5, 0.5);
  DifferentialForm w(2, 1);
  w.add(index_from_list({0}), f);
  w.add(index_from_list({1}), g);
  const double expect = (0.7 - 1.1 * a) / s;
  CHECK(evaluate_current(SolenoidModel::kronecker(a, 8), w) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("class scales linearly with the measure")
{
  for (const auto& m : fleet()) {
    const auto c = rs_class(m);
    const auto c3 = rs_class(m.with_mass_scale(3.0));
    for (int i = 0; i < 2; ++i)
      CHECK(c3.coeffs[i] == doctest::Approx(3.0 * c.coeffs[i]).epsilon(1e-14));
  }
}

TEST_CASE("current is linear in the form")
{
  std::mt19937_64 rng(9);
  for (const auto& m : fleet()) {
    const auto w = exterior_derivative(trig_function(rng)) + dx(0).scaled(0.3);
    const auto e = exterior_derivative(trig_function(rng)) + dx(1).scaled(-0.2);
    const double lhs = evaluate_current(m, w.scaled(2.0) + e.scaled(-0.5));
    const double rhs = 2.0 * evaluate_current(m, w) - 0.5 * evaluate_current(m, e);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("Poincare pairing on T^2")
{
  HomologyClass a{2, 1, Eigen::Vector2d(1, 0)}, b{2, 1, Eigen::Vector2d(0, 1)};
  CHECK(poincare_dual_pairing(a, b) == 1.0);
  const double alpha = 0.4, beta = -0.9;
  HomologyClass u{2, 1, Eigen::Vector2d(1, alpha)}, v{2, 1, Eigen::Vector2d(1, beta)};
  CHECK(poincare_dual_pairing(u, v) == doctest::Approx(beta - alpha));
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    HomologyClass x{2, 1, Eigen::Vector2d(g(rng), g(rng))}, y{2, 1, Eigen::Vector2d(g(rng), g(rng))};
    CHECK(poincare_dual_pairing(x, y) == -poincare_dual_pairing(y, x));
  }
}

TEST_CASE("Stokes residuals")
{
  TrigPoly s(2);
  s.add_term({1, 0}, 0.0, 1.0);
  const auto sin_x1 = DifferentialForm::function(s);
  const auto one = DifferentialForm::function(TrigPoly::constant(2, 1.0));
  std::mt19937_64 rng(11);
  for (const auto& m : fleet()) {
    CHECK(stokes_residual(m, sin_x1) < 1e-8);
    CHECK(stokes_residual(m, one) == 0.0);
    for (int i = 0; i < 10; ++i)
      CHECK(stokes_residual(m, trig_function(rng)) < 1e-6);
  }
}

TEST_CASE("homotopy drift")
{
  const auto circles = SolenoidModel::horizontal_circles(middle(1.0 / 3.0, 6));
  const auto wave = PerturbationTerm::wave_term(Eigen::Vector2d(0, 0.05), Eigen::Vector2d(1, 0));
  CHECK(homotopy_drift(circles, {wave}) < 1e-6);
  for (const auto& m : fleet()) {
    CHECK(homotopy_drift(m, {}) == 0.0);
    CHECK(homotopy_drift(m, {PerturbationTerm::translation(Eigen::Vector2d(0.13, -0.31))}) < 1e-6);
    CHECK(homotopy_drift(m, {PerturbationTerm::bump(Eigen::Vector2d(0.05, 0.03), Eigen::Vector2d(0.4, 0.6), 0.25)}) <
          1e-6);
    CHECK(homotopy_drift(m, {PerturbationTerm::shear(Eigen::Vector2d(0.02, 0), Eigen::Vector2d(0, 1))}) < 1e-6);
  }
}

TEST_CASE("homotopies that break the immersion are reported")
{
  const auto circles = SolenoidModel::horizontal_circles(middle(1.0 / 3.0, 4));
  // x1 -> x1 - sin(2 pi x1 - pi/4) / (2 pi) stalls at x1 = 1/8, a sample point
  const auto fold = PerturbationTerm::wave_term(Eigen::Vector2d(-1.0 / two_pi, 0), Eigen::Vector2d(1, 0),
                                                -std::numbers::pi / 4);
  CHECK_THROWS_AS(check_immersion(circles.with_perturbation({fold})), ImmersionError);
  CHECK_THROWS_AS(homotopy_drift(circles, {fold}), ImmersionError);
}

TEST_CASE("partition independence under a shifted fundamental domain")
{
  std::mt19937_64 rng(12);
  for (const auto& m : fleet()) {
    const auto w = exterior_derivative(trig_function(rng)) + dx(0).scaled(0.7) + dx(1).scaled(0.2);
    QuadratureSpec a, b;
    b.chart_offset = 0.37;
    CHECK(std::abs(evaluate_current(m, w, a) - evaluate_current(m, w, b)) < 1e-8);
  }
}

TEST_CASE("refinement differences shrink with depth")
{
  const auto m = SolenoidModel::horizontal_circles(middle(1.0 / 3.0, 12));
  TrigPoly c(2);
  c.add_term({0, 1}, 1.0, 0.5);
  const auto w = DifferentialForm::monomial(2, index_from_list({0}), c);
  auto at = [&](int d) {
    QuadratureSpec q;
    q.depth = d;
    return evaluate_current(m, w, q);
  };
  double prev = 1e300;
  for (int d = 1; d <= 8; ++d) {
    const double diff = std::abs(at(d) - at(d + 2));
    CHECK(diff < prev);
    // bounded by Lipschitz constant times the depth-d cylinder diameter
    CHECK(diff <= two_pi * std::sqrt(1.25) * std::pow(1.0 / 3.0, d) + 1e-15);
    prev = diff;
  }
}

TEST_CASE("quadrature spec validation")
{
  QuadratureSpec q;
  q.order = 0;
  CHECK_THROWS_AS(q.check(), InputError);
}
