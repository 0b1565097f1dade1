#include "solenoid/core.hpp"
#include "solenoid/perturb.hpp"
#include "solenoid/tangency.hpp"

#include <doctest.h>

using namespace sol;

namespace {

SolenoidModel designed()
{
  CantorSpec s;
  s.ratio = 0.6;
  s.depth = 8;
  return SolenoidModel(Ambient{}, GraphSolenoid{Profile::cosine_well(0.05), 0, 1}, CantorTransversal::build(s));
}

const Subtorus level{2, {1}, {0.19226752}};

} // namespace

TEST_CASE("designed tangency is detected before perturbation")
{
  const auto t = detect_tangencies(designed(), subtorus_model(level), 8);
  CHECK_FALSE(t.flagged.empty());
}

TEST_CASE("perturbation reaches the margin for each budget")
{
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    PerturbOptions o;
    o.epsilon = eps;
    o.seed = 1;
    const auto r = perturb_to_transversality(designed(), level, o);
    CAPTURE(eps);
    CHECK_FALSE(r.unchanged);
    CHECK(r.delta == doctest::Approx(eps / 10));
    CHECK(r.min_margin >= eps / 10);
    CHECK(r.initial_min_margin < tangency_threshold);
    CHECK(r.class_drift <= 1e-6);
    CHECK(r.homotopy_drift <= 1e-6);
    double used = 0.0;
    for (std::size_t i = 0; i < r.boxes.size(); ++i) {
      CHECK(r.boxes[i].v.norm() <= r.boxes[i].budget);
      CHECK(r.boxes[i].budget <= eps * std::ldexp(1.0, -static_cast<int>(i) - 1) + 1e-18);
      CHECK(r.boxes[i].attempts <= o.retries);
      used += r.boxes[i].v.norm();
    }
    CHECK(used < eps);
    CHECK(detect_tangencies(r.model, subtorus_model(level), 8).empty());
  }
}

TEST_CASE("already transverse models are returned unchanged")
{
  const auto k = SolenoidModel::kronecker(0.3, 6);
  const auto r = perturb_to_transversality(k, Subtorus{2, {0}, {0.2}});
  CHECK(r.unchanged);
  CHECK(r.boxes.empty());
  CHECK(r.class_drift == 0.0);
  CHECK(r.model.perturbation().empty());
}

TEST_CASE("parameter errors")
{
  PerturbOptions o;
  o.epsilon = 0.01;
  o.delta = 0.02;
  CHECK_THROWS_AS(perturb_to_transversality(designed(), level, o), InputError);
  CHECK_THROWS_AS(perturb_to_transversality(designed(), Subtorus{2, {0, 1}, {0.1, 0.2}}), InputError);
  const auto moved = designed().with_perturbation({PerturbationTerm::translation(Eigen::Vector2d(0.01, 0))});
  CHECK_THROWS_AS(perturb_to_transversality(moved, level), InputError);
}

TEST_CASE("an exhausted retry budget names the box")
{
  PerturbOptions o;
  o.epsilon = 0.1;
  o.delta = 0.099;
  o.retries = 1;
  o.seed = 1;
  try {
    perturb_to_transversality(designed(), level, o);
    FAIL("expected a refusal");
  } catch (const RefusalError& e) {
    CHECK(std::string(e.what()).find("box") != std::string::npos);
  }
}

TEST_CASE("perturbation is deterministic in the seed")
{
  PerturbOptions o;
  o.epsilon = 0.01;
  o.seed = 9;
  const auto a = perturb_to_transversality(designed(), level, o);
  const auto b = perturb_to_transversality(designed(), level, o);
  REQUIRE(a.boxes.size() == b.boxes.size());
  for (std::size_t i = 0; i < a.boxes.size(); ++i)
    CHECK(a.boxes[i].v == b.boxes[i].v);
  CHECK(a.min_margin == b.min_margin);
}
