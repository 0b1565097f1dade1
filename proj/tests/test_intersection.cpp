#include "oracles.hpp"

#include "solenoid/core.hpp"
#include "solenoid/intersection.hpp"

#include <doctest.h>

#include <random>

using namespace sol;

namespace {

const double alpha = std::sqrt(2.0) - 1;
const double beta = std::sqrt(3.0) - 1;

CantorTransversal middle(double ratio, int depth)
{
  CantorSpec s;
  s.ratio = ratio;
  s.depth = depth;
  return CantorTransversal::build(s);
}

CantorTransversal full(int depth)
{
  CantorSpec s;
  s.construction = Construction::interval;
  s.depth = depth;
  return CantorTransversal::build(s);
}

std::array<double, 2> unit(double slope)
{
  const double s = std::sqrt(1 + slope * slope);
  return {1 / s, slope / s};
}

// Transverse pairs of 1-solenoids on T^2.
std::vector<std::pair<SolenoidModel, SolenoidModel>> fleet_pairs()
{
  const auto k = middle(1.0 / 3.0, 6);
  return {
      {SolenoidModel::kronecker(alpha, 6), SolenoidModel::kronecker(beta, 6)},
      {SolenoidModel::horizontal_circles(k), SolenoidModel::vertical_circle(1.0 / 3.0)},
      {SolenoidModel::kronecker(alpha, 6), SolenoidModel::vertical_circle(0.2)},
      {SolenoidModel::horizontal_circles(k), SolenoidModel::kronecker(beta, 6)},
  };
}

} // namespace

TEST_CASE("horizontal against vertical: one positive crossing of margin 1")
{
  const auto h = SolenoidModel::horizontal_circles(middle(1.0 / 3.0, 0));
  const auto v = SolenoidModel::vertical_circle(0.25);
  const auto recs = intersection_points(h, v, 0);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].index == 1);
  CHECK(recs[0].transversal);
  CHECK(recs[0].margin == doctest::Approx(1.0));
  CHECK(recs[0].point[0] == doctest::Approx(0.25));
  CHECK(recs[0].point[1] == doctest::Approx(0.5));
}

TEST_CASE("records solve f1(p1) = f2(p2)")
{
  const auto m1 = SolenoidModel::kronecker(alpha, 3), m2 = SolenoidModel::kronecker(beta, 3, 0.17);
  for (const auto& r : intersection_points(m1, m2, 3)) {
    const auto a = m1.leaf_point(r.leaf1, r.t1), b = m2.leaf_point(r.leaf2, r.t2);
    CHECK(m1.ambient().distance(a, b) < 1e-10);
    CHECK(m1.ambient().distance(a, r.point) < 1e-10);
  }
}

TEST_CASE("windowed Kronecker counts agree with lattice enumeration")
{
  const auto m1 = SolenoidModel::kronecker(alpha, 0), m2 = SolenoidModel::kronecker(beta, 0, 0.137);
  const auto u1 = unit(alpha), u2 = unit(beta);
  const double det = std::abs(oracle::kronecker_det(alpha, beta));
  for (auto [l1, l2] : {std::pair{10.0, 17.5}, std::pair{55.0, 40.0}, std::pair{200.0, 150.0}}) {
    IntersectionOptions o;
    o.window1 = LeafWindow{{0.0}, {l1}};
    o.window2 = LeafWindow{{0.0}, {l2}};
    long signed_count = 0;
    for (const auto& r : intersection_points(m1, m2, 0, o))
      signed_count += r.index;
    const long expect = oracle::lattice_count({0.0, 0.5}, u1, l1, {0.137, 0.5}, u2, l2);
    CHECK(signed_count == expect);
    CHECK(std::abs(std::abs(static_cast<double>(expect)) - l1 * l2 * det) <= 2.0 * (l1 + l2));
  }
}

TEST_CASE("tangent horizontal leaf and graph leaf give one flagged record")
{
  const auto k = middle(1.0 / 3.0, 1);
  const auto h = SolenoidModel::horizontal_circles(k);
  const SolenoidModel g(Ambient{}, GraphSolenoid{Profile::cosine_well(0.05), 0, 1}, k);
  IntersectionOptions o;
  const auto recs = intersection_points(h, g, 1, o);
  std::size_t flagged = 0;
  for (const auto& r : recs)
    if (r.leaf1.addr == r.leaf2.addr) {
      CHECK_FALSE(r.transversal);
      CHECK(r.margin < 1e-6);
      CHECK(wrap_centered(r.point[0]) == doctest::Approx(0.0).scale(1.0));
      ++flagged;
    }
  CHECK(flagged == 2);
  CHECK_THROWS_AS(pairing_exact(h, g, 1), RefusalError);
}

TEST_CASE("pairing_exact oracles")
{
  CHECK(pairing_exact(SolenoidModel::horizontal_circles(middle(1.0 / 3.0, 8)), SolenoidModel::vertical_circle(1.0 / 3.0),
                      8) == doctest::Approx(1.0).epsilon(1e-14));
  const double d = oracle::kronecker_det(alpha, beta);
  CHECK(std::abs(pairing_exact(SolenoidModel::kronecker(alpha, 8), SolenoidModel::kronecker(beta, 8), 8) - d) < 1e-4);
  CHECK(pairing_exact(SolenoidModel::kronecker(alpha, 6), SolenoidModel::kronecker(alpha, 6, 0.3), 6) == 0.0);
}

TEST_CASE("pairing_via_cup oracles")
{
  CHECK(pairing_via_cup(SolenoidModel::horizontal_circles(middle(1.0 / 3.0, 8)),
                        SolenoidModel::vertical_circle(0.5)) == doctest::Approx(1.0).epsilon(1e-12));
  const double d = oracle::kronecker_det(alpha, beta);
  CHECK(std::abs(pairing_via_cup(SolenoidModel::kronecker(alpha, 8), SolenoidModel::kronecker(beta, 8)) - d) < 1e-6);
  const auto k = SolenoidModel::kronecker(alpha, 8);
  CHECK(std::abs(pairing_via_cup(k, k)) < 1e-6);
}

TEST_CASE("antisymmetry, product masses and three-way consistency on the fleet")
{
  for (const auto& [m1, m2] : fleet_pairs()) {
    const double a = pairing_exact(m1, m2, 6), b = pairing_exact(m2, m1, 6);
    CHECK(a == -b);
    for (const auto& r : intersection_points(m1, m2, 6))
      CHECK(r.mass == m1.transversal().mass(r.leaf1.addr) * m2.transversal().mass(r.leaf2.addr));
    CHECK(std::abs(a - pairing_via_cup(m1, m2)) <= 1e-4);
  }
}

TEST_CASE("intersection index is invariant under positive recombination of frame columns")
{
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    Eigen::MatrixXd f1(4, 2), f2(4, 2);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 2; ++c) {
        f1(r, c) = g(rng);
        f2(r, c) = g(rng);
      }
    Eigen::Matrix2d a;
    a << g(rng), g(rng), g(rng), g(rng);
    if (a.determinant() < 0)
      a.col(0) *= -1.0;
    const auto base = intersection_index(f1, f2);
    if (base.sign == 0)
      continue;
    std::vector<std::vector<double>> m(4, std::vector<double>(4));
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 2; ++c) {
        m[r][c] = f1(r, c);
        m[r][c + 2] = f2(r, c);
      }
    CHECK(base.sign == (oracle::det(m) > 0 ? 1 : -1));
    const Eigen::MatrixXd f1a = f1 * a, f2a = f2 * a;
    CHECK(intersection_index(f1a, f2).sign == base.sign);
    CHECK(intersection_index(f1, f2a).sign == base.sign);
  }
}

TEST_CASE("exhaustion converges to the determinant")
{
  const auto m1 = SolenoidModel::kronecker(alpha, 8), m2 = SolenoidModel::kronecker(beta, 8);
  const double d = oracle::kronecker_det(alpha, beta);
  std::vector<double> radii;
  for (int n = 0; n < 6; ++n)
    radii.push_back(100.0 * std::ldexp(1.0, n));
  const auto a = exhaustion_estimate(m1, m2, LeafRef{Address{}, 0.1}, LeafRef{Address{}, 0.3}, radii);
  const auto b = exhaustion_estimate(m1, m2, LeafRef{Address{}, 0.71}, LeafRef{Address{}, 0.05}, radii);
  REQUIRE(a.size() == radii.size());
  for (const auto& s : a)
    CHECK(std::abs(s.estimate - d) <= 4.0 * (2 * s.radius) / (s.radius * s.radius));
  CHECK(std::abs(a.back().estimate - b.back().estimate) < 1e-2);

  const auto h = SolenoidModel::horizontal_circles(middle(1.0 / 3.0, 4));
  const auto v = SolenoidModel::vertical_circle(0.4);
  for (const auto& s : exhaustion_estimate(h, v, h.leaf(Address::parse("0110")), v.leaf(Address{}), radii))
    CHECK(s.estimate == doctest::Approx(1.0));
}

TEST_CASE("exhaustion refuses non-uniquely-ergodic models")
{
  CantorSpec s;
  s.depth = 4;
  s.p = 0.3;
  const SolenoidModel biased(Ambient{}, CantorSuspension{ReturnMap::odometer(), 0.5}, CantorTransversal::build(s));
  CHECK_THROWS_AS(check_uniquely_ergodic(biased), RefusalError);
  CHECK_THROWS_AS(exhaustion_estimate(biased, SolenoidModel::vertical_circle(0.4), biased.leaf(Address::parse("0000")),
                                      LeafRef{}, {10.0}),
                  RefusalError);
}

TEST_CASE("intersections with subtori")
{
  SUBCASE("horizontal circles meet a vertical circle in the transversal")
  {
    const auto k = middle(1.0 / 3.0, 5);
    const auto induced = intersect_submanifold(SolenoidModel::horizontal_circles(k), Subtorus{2, {0}, {0.3}});
    REQUIRE(induced.points);
    CHECK(induced.points->atoms.size() == 32);
    CHECK(induced.points->total_mass() == doctest::Approx(1.0));
    for (const auto& a : induced.points->atoms)
      CHECK(a.mass == k.mass(a.addr));
  }
  SUBCASE("Kronecker crossing density")
  {
    const auto induced = intersect_submanifold(SolenoidModel::kronecker(alpha, 8), Subtorus{2, {0}, {0.3}});
    REQUIRE(induced.points);
    CHECK(std::abs(induced.points->signed_mass() - unit(alpha)[0]) < 1e-4);
  }
  SUBCASE("2-dimensional foliation of T^4 cut by x1 = 0")
  {
    const double a = 0.3, b = -0.7;
    const double s1 = std::sqrt(1 + a * a), s2 = std::sqrt(1 + b * b);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 2);
    v(0, 0) = 1 / s1;
    v(1, 0) = a / s1;
    v(2, 1) = 1 / s2;
    v(3, 1) = b / s2;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(4), off = Eigen::VectorXd::Zero(4);
    w[1] = 1;
    const auto m = SolenoidModel::linear(Ambient{AmbientKind::torus, 4}, v, w, off, full(4), {s1, s2});
    const auto induced = intersect_submanifold(m, Subtorus{4, {0}, {0.0}});
    REQUIRE(induced.model);
    CHECK(induced.model->leaf_dim() == 1);
    // kernel of the x1 row inside the leaf, with x1 dropped
    const Eigen::Vector3d expect(0, 1 / s2, b / s2);
    const auto& lin = std::get<LinearFoliation>(induced.model->family());
    CHECK(std::abs(std::abs(lin.directions.col(0).dot(expect)) - 1.0) < 1e-12);

    const auto lhs = rs_class(*induced.model);
    const auto rhs = restrict_dual(rs_class(m), Subtorus{4, {0}, {0.0}});
    REQUIRE(lhs.coeffs.size() == rhs.coeffs.size());
    for (Eigen::Index i = 0; i < lhs.coeffs.size(); ++i)
      CHECK(std::abs(lhs.coeffs[i] - rhs.coeffs[i]) < 1e-4);
  }
}

TEST_CASE("restriction of the dual agrees with the induced class for Kronecker lines")
{
  for (double x : {0.0, 0.3, 0.77}) {
    const auto m = SolenoidModel::kronecker(beta, 8);
    const Subtorus n{2, {0}, {x}};
    const auto induced = intersect_submanifold(m, n);
    const auto c = restrict_dual(rs_class(m), n);
    REQUIRE(c.coeffs.size() == 1);
    CHECK(std::abs(induced.points->signed_mass() - c.coeffs[0]) < 1e-4);
  }
}

TEST_CASE("Thom pairing terms")
{
  const auto h = SolenoidModel::horizontal_circles(middle(1.0 / 3.0, 8));
  std::vector<double> rho;
  for (int j = 0; j < 5; ++j)
    rho.push_back(std::ldexp(1.0, -j) / 8);
  for (const auto& t : pairing_via_thom(h, Subtorus{2, {0}, {0.3}}, rho))
    CHECK(std::abs(t.value - 1.0) < 1e-6);

  const auto k = SolenoidModel::kronecker(alpha, 8);
  const auto terms = pairing_via_thom(k, Subtorus{2, {0}, {0.3}}, rho);
  const double limit = unit(alpha)[0];
  double prev = 1e300;
  for (const auto& t : terms) {
    const double e = std::abs(t.value - limit);
    CHECK(e <= prev + 1e-12);
    prev = e;
  }
  CHECK(prev < 1e-4);
}
