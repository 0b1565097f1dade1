#include "oracles.hpp"

#include "solenoid/core.hpp"
#include "solenoid/forms.hpp"
#include "solenoid/quadrature.hpp"

#include <doctest.h>

#include <random>

using namespace sol;

namespace {

// Integer coefficients keep every product and sum exact, so identities can be
// compared with ==.
DifferentialForm random_form(std::mt19937_64& rng, int n, int k, int terms = 3, int max_freq = 2)
{
  std::uniform_int_distribution<int> coeff(-5, 5), freq(-max_freq, max_freq);
  DifferentialForm w(n, k);
  const auto subsets = lex_subsets(n, k);
  for (IndexSet idx : subsets) {
    TrigPoly c(n);
    for (int t = 0; t < terms; ++t) {
      std::vector<int> f(static_cast<std::size_t>(n));
      for (int& x : f)
        x = freq(rng);
      c.add_term(f, coeff(rng), coeff(rng));
    }
    w.add(idx, c);
  }
  return w;
}

Eigen::VectorXd random_point(std::mt19937_64& rng, int n)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i)
    p[i] = u(rng);
  return p;
}

// Value of the 1-form w on the vector v at p.
double one_form(const DifferentialForm& w, const Eigen::VectorXd& p, const Eigen::VectorXd& v)
{
  double s = 0.0;
  for (const auto& [idx, c] : w.terms())
    s += c.value(p) * v[index_list(idx)[0]];
  return s;
}

} // namespace

TEST_CASE("index helpers")
{
  CHECK(index_list(index_from_list({0, 2, 3})) == std::vector<int>{0, 2, 3});
  CHECK(lex_subsets(4, 2).size() == 6);
  CHECK(index_list(lex_subsets(4, 2)[0]) == std::vector<int>{0, 1});
  CHECK(index_list(lex_subsets(4, 2)[5]) == std::vector<int>{2, 3});
  for (IndexSet i = 0; i < 16; ++i)
    for (IndexSet j = 0; j < 16; ++j)
      CHECK(shuffle_sign(i, j) == oracle::concat_sign(index_list(i), index_list(j)));
}

TEST_CASE("exterior derivative of sin(2 pi x1) dx2")
{
  TrigPoly s(2);
  s.add_term({1, 0}, 0.0, 1.0);
  const auto w = DifferentialForm::monomial(2, index_from_list({1}), s);
  const auto dw = exterior_derivative(w);
  CHECK(dw.degree() == 2);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto p = random_point(rng, 2);
    const double expect = two_pi * std::cos(two_pi * p[0]);
    CHECK(dw.evaluate(p, Eigen::Matrix2d::Identity()) == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(exterior_derivative(DifferentialForm::constant(2, index_from_list({0}), 3.0)).is_zero());
}

TEST_CASE("d of d vanishes exactly")
{
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const int n = i % 2 ? 4 : 3;
    const int k = i % 3 == 0 ? 0 : 1;
    CHECK(exterior_derivative(exterior_derivative(random_form(rng, n, k))).is_zero());
  }
}

TEST_CASE("wedge is graded anticommutative")
{
  const auto dx1 = DifferentialForm::constant(2, index_from_list({0}), 1.0);
  const auto dx2 = DifferentialForm::constant(2, index_from_list({1}), 1.0);
  CHECK(wedge(dx1, dx2) == wedge(dx2, dx1).scaled(-1.0));
  CHECK(wedge(dx1.scaled(2.0), dx1.scaled(-3.0)).is_zero());

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const int ka = i % 3, kb = 1 + i % 2;
    const auto a = random_form(rng, 4, ka, 2), b = random_form(rng, 4, kb, 2);
    const double sign = (ka * kb) % 2 ? -1.0 : 1.0;
    CHECK(wedge(a, b) == wedge(b, a).scaled(sign));
  }
}

TEST_CASE("Leibniz rule")
{
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const int ka = i % 2, kb = 1;
    const auto a = random_form(rng, 4, ka, 2), b = random_form(rng, 4, kb, 2);
    const double sign = ka % 2 ? -1.0 : 1.0;
    const auto lhs = exterior_derivative(wedge(a, b));
    const auto rhs = wedge(exterior_derivative(a), b) + wedge(a, exterior_derivative(b)).scaled(sign);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("wedge of 1-forms on T^4 agrees with the pointwise alternation")
{
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> freq(-2, 2);
  auto unit_scale = [&] {
    DifferentialForm w(4, 1);
    for (int i = 0; i < 4; ++i) {
      TrigPoly c(4);
      c.add_term({freq(rng), freq(rng), freq(rng), freq(rng)}, 0.5 * g(rng), 0.5 * g(rng));
      w.add(index_from_list({i}), c);
    }
    return w;
  };
  const auto a = unit_scale(), b = unit_scale();
  const auto ab = wedge(a, b);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto p = random_point(rng, 4);
    Eigen::MatrixXd frame(4, 2);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 2; ++c)
        frame(r, c) = g(rng);
    frame.colwise().normalize();
    const Eigen::VectorXd v = frame.col(0), w = frame.col(1);
    const double expect = one_form(a, p, v) * one_form(b, p, w) - one_form(a, p, w) * one_form(b, p, v);
    worst = std::max(worst, std::abs(ab.evaluate(p, frame) - expect));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("evaluation on frames")
{
  const double alpha = 0.3, beta = -1.7;
  Eigen::MatrixXd f1(2, 1);
  f1 << 1, alpha;
  const Eigen::Vector2d p(0.1, 0.2);
  CHECK(DifferentialForm::constant(2, index_from_list({0}), 1.0).evaluate(p, f1) == 1.0);
  CHECK(DifferentialForm::constant(2, index_from_list({1}), 1.0).evaluate(p, f1) == alpha);
  Eigen::MatrixXd f2(2, 2);
  f2 << 1, 1, alpha, beta;
  CHECK(DifferentialForm::constant(2, index_from_list({0, 1}), 1.0).evaluate(p, f2) ==
        doctest::Approx(beta - alpha));
  CHECK_THROWS_AS(DifferentialForm::constant(2, index_from_list({0, 1}), 1.0).evaluate(p, f1), DegreeError);
}

TEST_CASE("harmonic basis sizes")
{
  CHECK(harmonic_basis(2, 1).size() == 2);
  CHECK(harmonic_basis(4, 2).size() == 6);
  const auto zero = harmonic_basis(2, 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].evaluate(Eigen::Vector2d(0.3, 0.4), Eigen::MatrixXd(2, 0)) == 1.0);
}

TEST_CASE("Thom forms")
{
  const Subtorus n{2, {0}, {0.0}};
  for (double rho : {0.2, 0.125, 1.0 / 64, 1.0 / 1024}) {
    const auto tau = thom_form(n, rho);
    const auto f = [&](double x) {
      return tau.form.evaluate(Eigen::Vector2d(x, 0.37), Eigen::Matrix2d::Identity().col(0));
    };
    CHECK(oracle::simpson(f, -rho, rho, 20000) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(f(rho * 1.01) == 0.0);
    CHECK(f(0.5) == 0.0);
    CHECK(exterior_derivative(tau.form).is_zero());
  }
  CHECK_THROWS_AS(thom_form(n, 0.3), InputError);
  CHECK_THROWS_AS(thom_form(Subtorus{2, {0, 0}, {0.0, 0.0}}, 0.1), InputError);
}

TEST_CASE("Thom forms on T^4 integrate to one over normal slices")
{
  const Subtorus n{4, {0, 2}, {0.25, 0.5}};
  const auto tau = thom_form(n, 0.1);
  Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(4, 2);
  frame(0, 0) = 1;
  frame(2, 1) = 1;
  const auto inner = [&](double x0) {
    return oracle::simpson(
        [&](double x2) { return tau.form.evaluate((Eigen::VectorXd(4) << x0, 0.3, x2, 0.9).finished(), frame); },
        0.4, 0.6, 2000);
  };
  CHECK(oracle::simpson(inner, 0.15, 0.35, 2000) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("quadrature rules")
{
  for (int q : {2, 5, 16, 64}) {
    const auto& r = gauss_legendre(q);
    // exact through degree 2q - 1
    for (int deg = 0; deg < 2 * q; deg += 3) {
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(integrate(r, [&](double x) { return std::pow(x, deg); }) == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  const auto t = periodic_trapezoid(16, 0.0, 1.0);
  CHECK(integrate(t, [](double x) { return std::cos(two_pi * 5 * x); }) == doctest::Approx(0.0).scale(1.0));
  CHECK(integrate(t, [](double x) { return 1.0 + std::sin(two_pi * 3 * x); }) == doctest::Approx(1.0));
  const auto c = composite_gauss_legendre(4, 10, 0.0, 2.0);
  CHECK(integrate(c, [](double x) { return std::exp(x); }) == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
}
