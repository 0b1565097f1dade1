#include "solenoid/core.hpp"
#include "solenoid/tangency.hpp"

#include <doctest.h>

#include <random>

using namespace sol;

namespace {

CantorTransversal middle(double ratio, int depth)
{
  CantorSpec s;
  s.ratio = ratio;
  s.depth = depth;
  return CantorTransversal::build(s);
}

CantorTransversal fat(double base, int depth)
{
  CantorSpec s = CantorSpec::fat(base, 0.4, depth);
  s.measure = MeasureKind::lebesgue;
  return CantorTransversal::build(s);
}

std::pair<SolenoidModel, SolenoidModel> thin_pair(int depth)
{
  const auto k = middle(0.6, depth);
  return {SolenoidModel::horizontal_circles(k),
          SolenoidModel(Ambient{}, GraphSolenoid{Profile::cosine_well(0.05 * std::sqrt(2.0), 0.6), 0, 1}, k)};
}

std::pair<SolenoidModel, SolenoidModel> fat_pair(int depth)
{
  const Ambient plane{AmbientKind::plane, 2};
  Eigen::MatrixXd v(2, 1);
  v << 1, 0;
  return {SolenoidModel::linear(plane, v, Eigen::Vector2d(0, 1), Eigen::Vector2d(-0.5, 0), fat(4, depth), {1.0}),
          SolenoidModel(plane, GraphSolenoid{Profile::polynomial({0, 0, 1}), -0.5, 0.5}, fat(3, depth))};
}

} // namespace

TEST_CASE("transverse linear foliations have no tangencies")
{
  const auto t = detect_tangencies(SolenoidModel::kronecker(0.3, 6), SolenoidModel::kronecker(-0.8, 6), 6);
  CHECK(t.empty());
  CHECK(t.excluded.empty());
  for (double b : t.mass_bound)
    CHECK(b == 0.0);
}

TEST_CASE("thin Cantor tangencies: bound halves with depth")
{
  const auto [m1, m2] = thin_pair(12);
  const auto t = detect_tangencies(m1, m2, 8, tangency_threshold, 12);
  REQUIRE(t.mass_bound.size() == 13);
  CHECK(t.interval_bound);
  CHECK_FALSE(t.inclusion_exclusion_bound.has_value());
  for (int d = 1; d <= 12; ++d) {
    CHECK(t.mass_bound[d] <= t.mass_bound[d - 1] + 1e-12);
    CHECK(t.mass_bound[d] == doctest::Approx(std::ldexp(1.0, -d)).epsilon(1e-9));
  }
  CHECK(t.mass_bound[12] < 1e-3);
  CHECK_FALSE(t.excluded.empty());
  for (const auto& r : t.flagged)
    CHECK(std::abs(wrap_centered(r.point[0])) < 1e-6);
}

TEST_CASE("ae pairing on the thin configuration matches the cup product")
{
  const auto [m1, m2] = thin_pair(12);
  const auto ae = ae_pairing(m1, m2, 8, 1e-3, 12);
  const double cup = pairing_via_cup(m1, m2);
  CHECK(std::abs(ae.value - cup) <= 1e-4 + ae.error_bound);
  CHECK(ae.excluded_pairs > 0);
  CHECK_THROWS_AS(ae_pairing(m1, m2, 8, 1e-3, 6), RefusalError);
}

TEST_CASE("ae pairing equals pairing_exact when nothing is tangent")
{
  const auto m1 = SolenoidModel::kronecker(std::sqrt(2.0) - 1, 6), m2 = SolenoidModel::kronecker(std::sqrt(3.0) - 1, 6);
  const auto ae = ae_pairing(m1, m2, 6);
  CHECK(ae.value == pairing_exact(m1, m2, 6));
  CHECK(ae.error_bound == 0.0);
  CHECK(ae.excluded_pairs == 0);
}

TEST_CASE("a tangent leaf of positive mass is refused")
{
  const auto k = middle(1.0 / 3.0, 0);
  const auto h = SolenoidModel::horizontal_circles(k);
  const SolenoidModel g(Ambient{}, GraphSolenoid{Profile::cosine_well(0.05), 0, 1}, k);
  CHECK_THROWS_AS(ae_pairing(h, g, 0), RefusalError);
}

TEST_CASE("fat Cantor pair: the bound never drops below inclusion-exclusion")
{
  const auto [m1, m2] = fat_pair(10);
  const auto t = detect_tangencies(m1, m2, 6, tangency_threshold, 10);
  REQUIRE(t.inclusion_exclusion_bound.has_value());
  CHECK(*t.inclusion_exclusion_bound == doctest::Approx(0.2).epsilon(1e-12));
  for (double b : t.mass_bound)
    CHECK(b >= 0.2);
  try {
    ae_pairing(m1, m2, 6, 1e-3, 10);
    FAIL("expected a refusal");
  } catch (const RefusalError& e) {
    CHECK(std::string(e.what()).find("fat Cantor") != std::string::npos);
  }
}

TEST_CASE("interval arithmetic encloses point evaluations")
{
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-10.0, 10.0), t(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    double a0 = u(rng), a1 = u(rng), b0 = u(rng), b1 = u(rng);
    if (a0 > a1)
      std::swap(a0, a1);
    if (b0 > b1)
      std::swap(b0, b1);
    const Interval a(a0, a1), b(b0, b1);
    const double x = a0 + t(rng) * (a1 - a0), y = b0 + t(rng) * (b1 - b0);
    CHECK((a + b).contains(x + y));
    CHECK((a - b).contains(x - y));
    CHECK((a * b).contains(x * y));
    CHECK(sqr(a).contains(x * x));
    CHECK(sin(a).contains(std::sin(x)));
    CHECK(sqr(a).lo >= 0.0);
    CHECK(hull(a, b).contains(x));
    CHECK(hull(a, b).contains(y));
  }
  const auto s = sin(Interval(1.0, 2.0));
  CHECK(s.hi >= 1.0);
  CHECK(sin(Interval(0.0, 10.0)).lo <= -1.0);
}

TEST_CASE("wave sums respect their sup-norm and are enclosed")
{
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = WaveSum::random(seed, 0.01);
    CHECK(g.sup_norm_bound() <= 0.01 + 1e-15);
    for (int i = 0; i < 50; ++i) {
      const double x0 = u(rng) - 0.5, z0 = u(rng);
      const Interval xi(x0, x0 + 0.01), zi(z0, z0 + 0.01);
      const double x = x0 + 0.01 * u(rng), z = z0 + 0.01 * u(rng);
      double v = 0.0;
      for (const auto& term : g.terms)
        v += term.a * std::sin(two_pi * (term.b * x + term.c * z) + term.phase);
      CHECK(g.eval(xi, zi).contains(v));
      CHECK(std::abs(v) <= 0.01 + 1e-15);
    }
  }
  CHECK(WaveSum::random(5, 0.01).terms.size() == 3);
}

TEST_CASE("remark certificates for small perturbations")
{
  const auto k1 = fat(4, 10), k2 = fat(3, 10);
  for (std::uint64_t seed = 3; seed < 23; ++seed) {
    const auto c = remark_certificate(k1, k2, WaveSum::random(seed, 0.01), 8);
    CHECK(c.certified);
    CHECK(c.convex);
    CHECK(c.slack > 0.0);
    CHECK(c.overlap_pairs > 0);
    CHECK(c.leb1 == doctest::Approx(0.6));
    CHECK(c.leb2 == doctest::Approx(0.6));
  }
}

TEST_CASE("remark certificate fails without enough measure")
{
  CantorSpec s = CantorSpec::fat(4, 0.7, 10);
  s.measure = MeasureKind::lebesgue;
  const auto thin = CantorTransversal::build(s);
  const auto c = remark_certificate(thin, thin, WaveSum::random(1, 0.01), 8);
  CHECK_FALSE(c.certified);
}
