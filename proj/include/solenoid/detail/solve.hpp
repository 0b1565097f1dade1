#ifndef SOLENOID_DETAIL_SOLVE_HPP
#define SOLENOID_DETAIL_SOLVE_HPP

// Internal helpers shared by the intersection sources.

#include "solenoid/intersection.hpp"

#include <functional>

namespace sol::detail {

LeafWindow default_window(const SolenoidModel& m);

/// Unperturbed linear model whose leaves are coordinate subtori
/// {x_axis = const}; returns the fixed axis or -1.
int fixed_axis(const SolenoidModel& m);

Eigen::VectorXd linear_base(const SolenoidModel& m, const LeafRef& leaf);

/// Solutions (t1, t2) of two unperturbed linear leaves within the windows.
/// `fn` receives s = (t1, t2) stacked.  Returns false if the leaves are
/// parallel.
bool linear_pair(const SolenoidModel& m1, const LeafRef& leaf1, const LeafWindow& w1, const SolenoidModel& m2,
                 const LeafRef& leaf2, const LeafWindow& w2, const std::function<void(const Eigen::VectorXd&)>& fn);

/// Number of lattice solutions of two unperturbed linear 1-leaves in T^2
/// (or the plane) within the windows, without materializing them.
double linear_pair_count(const SolenoidModel& m1, const LeafRef& leaf1, const LeafWindow& w1,
                         const SolenoidModel& m2, const LeafRef& leaf2, const LeafWindow& w2);

/// Samples x_axis(t) along a 1-dimensional leaf and finds the parameters
/// where it crosses a level set (mod 1 on tori).
class AxisPath {
public:
  AxisPath(const SolenoidModel& m, const LeafRef& leaf, double lo, double hi, int axis, int grid);

  struct Root {
    double t = 0.0;
    bool double_root = false;
  };
  std::vector<Root> roots(double level) const;
  /// Derivative of x_axis is nonzero at samples on both sides of t.
  bool isolated(double t) const;

private:
  double value(double t) const;
  double slope(double t) const;
  double refine_root(double a, double b, double level) const;

  const SolenoidModel* m_;
  LeafRef leaf_;
  int axis_;
  double step_;
  bool torus_;
  struct Node {
    double t, v;
    bool extremum;
  };
  std::vector<Node> nodes_;
  std::vector<std::pair<std::size_t, std::size_t>> runs_;
};

/// Parameters on an axis-linear leaf through the lifted point p, inside the window.
std::vector<Eigen::VectorXd> axis_leaf_params(const SolenoidModel& m, const LeafRef& leaf, const Eigen::VectorXd& p,
                                              const LeafWindow& w);

IntersectionRecord make_record(const SolenoidModel& m1, const LeafRef& leaf1, const Eigen::VectorXd& t1,
                               const SolenoidModel& m2, const LeafRef& leaf2, const Eigen::VectorXd& t2,
                               double threshold);

/// Intersections of one leaf pair.
std::vector<IntersectionRecord> solve_leaf_pair(const SolenoidModel& m1, const LeafRef& leaf1, const LeafWindow& w1,
                                                const SolenoidModel& m2, const LeafRef& leaf2, const LeafWindow& w2,
                                                const IntersectionOptions& opts);

} // namespace sol::detail

#endif
