#ifndef SOLENOID_INTERSECTION_HPP
#define SOLENOID_INTERSECTION_HPP

#include "solenoid/currents.hpp"
#include "solenoid/forms.hpp"
#include "solenoid/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace sol {

/// Smallest singular value of the stacked unit frame below which an
/// intersection counts as tangential.
inline constexpr double tangency_threshold = 1e-6;

struct IntersectionIndex {
  int sign = 0; // 0 when tangential
  double margin = 0.0;
};

/// sign det[frame1 | frame2] and the transversality margin of the stacked
/// unit-column matrix.
IntersectionIndex intersection_index(const Eigen::MatrixXd& frame1, const Eigen::MatrixXd& frame2,
                                     double threshold = tangency_threshold);

struct IntersectionRecord {
  Eigen::VectorXd point;
  LeafRef leaf1;
  Eigen::VectorXd t1;
  LeafRef leaf2;
  Eigen::VectorXd t2;
  int index = 0;
  double margin = 0.0;
  bool transversal = false;
  /// mass1(C1) * mass2(C2) of the cylinder pair.
  double mass = 0.0;
};

/// Leaf-parameter box; absent means one fundamental domain.
struct LeafWindow {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct IntersectionOptions {
  std::optional<LeafWindow> window1;
  std::optional<LeafWindow> window2;
  double threshold = tangency_threshold;
  /// Grid resolution per unit leaf length for bracketing.
  int grid = 1024;
};

/// All solutions of f1(p1) = f2(p2) for every pair of depth-d cylinder
/// representatives (k1 + k2 = n).  Throws RefusalError when a tangency is not
/// leafwise isolated.
std::vector<IntersectionRecord> intersection_points(const SolenoidModel& m1, const SolenoidModel& m2, int depth,
                                                    const IntersectionOptions& opts = {});

/// Signed count weighted by the product measure.  Refuses when tangential
/// records are present.
double pairing_exact(const SolenoidModel& m1, const SolenoidModel& m2, int depth);

double pairing_via_cup(const SolenoidModel& m1, const SolenoidModel& m2, const QuadratureSpec& quad = {});

/// Throws RefusalError unless the model is uniquely ergodic in one of the
/// implemented senses (or has closed leaves).
void check_uniquely_ergodic(const SolenoidModel& m);

struct ExhaustionStep {
  double radius = 0.0;
  double count = 0.0;
  double volume = 0.0;
  double estimate = 0.0;
};

/// Normalized signed counts between the leaf segments of parameter length
/// R_n through the two chosen leaves.  Closed leaves are capped at one period.
std::vector<ExhaustionStep> exhaustion_estimate(const SolenoidModel& m1, const SolenoidModel& m2,
                                                const LeafRef& leaf1, const LeafRef& leaf2,
                                                const std::vector<double>& radii);

/// The linear model of the subtorus N, oriented so that
/// det[F | frame_N] = det(F restricted to the rows of Q).
SolenoidModel subtorus_model(const Subtorus& n);

struct PointAtom {
  Eigen::VectorXd point;
  Address addr;
  Eigen::VectorXd param;
  int sign = 1;
  double mass = 0.0;
};

/// A 0-solenoid: finitely many atoms with signs and masses.
struct PointSolenoid {
  int n = 2;
  std::vector<PointAtom> atoms;

  double total_mass() const;
  double signed_mass() const;
};

struct InducedSolenoid {
  std::optional<SolenoidModel> model; // in the coordinates of N
  std::optional<PointSolenoid> points;
};

/// S' = f^{-1}(N) with the inherited transversal measure.
InducedSolenoid intersect_submanifold(const SolenoidModel& m, const Subtorus& n, int depth = -1);

/// Restriction of the dual class to N, as a class of N: c'[J] = sign(Q, J) c[Q u J].
HomologyClass restrict_dual(const HomologyClass& c, const Subtorus& n);

std::vector<CurrentResult> pairing_via_thom(const SolenoidModel& m, const Subtorus& n,
                                            const std::vector<double>& widths, const QuadratureSpec& quad = {});

} // namespace sol

#endif
