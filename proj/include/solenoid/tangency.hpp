#ifndef SOLENOID_TANGENCY_HPP
#define SOLENOID_TANGENCY_HPP

#include "solenoid/intersection.hpp"

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace sol {

using CylinderPair = std::pair<Address, Address>;

struct TangencySet {
  std::vector<IntersectionRecord> flagged;
  /// mass_bound[d]: max over the two factors of the mass of depth-d cylinders
  /// whose leaves meet F.  Non-increasing in d.
  std::vector<double> mass_bound;
  /// Cylinder pairs at the working depth whose leaves may meet F.
  std::set<CylinderPair> excluded;
  /// True when the bound came from interval tests on graph-like families
  /// (otherwise it is read off the flagged records).
  bool interval_bound = false;
  /// Leb(K1) + Leb(K2) - 1 when both transversals carry restricted Lebesgue
  /// measure; positive values force F to have positive measure.
  std::optional<double> inclusion_exclusion_bound;

  bool empty() const { return flagged.empty() && (mass_bound.empty() || mass_bound.back() == 0.0); }
};

/// Flagged records at `depth` plus the mass bound for depths 0..bound_depth
/// (bound_depth defaults to `depth`).
TangencySet detect_tangencies(const SolenoidModel& m1, const SolenoidModel& m2, int depth,
                              double threshold = tangency_threshold, int bound_depth = -1);

struct AePairing {
  double value = 0.0;
  /// Residual mass bound at the working depth.
  double error_bound = 0.0;
  int depth = 0;
  int null_depth = 0;
  std::size_t excluded_pairs = 0;
  TangencySet tangencies;
};

/// Pairing over cylinder pairs whose leaves avoid F.  Refuses unless the mass
/// bound at `null_depth` is at most `tolerance`.
AePairing ae_pairing(const SolenoidModel& m1, const SolenoidModel& m2, int depth, double tolerance = 1e-3,
                     int null_depth = -1);

/// Closed interval with outward-rounded arithmetic.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double x) : lo(x), hi(x) {}
  Interval(double a, double b) : lo(a), hi(b) {}

  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval sin(const Interval& a);
Interval sqr(const Interval& a);
Interval hull(const Interval& a, const Interval& b);

/// g(x, z) = sum a_i sin(2 pi (b_i x + c_i z) + phase_i).
struct WaveSum {
  struct Term {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double phase = 0.0;
  };
  std::vector<Term> terms;

  double sup_norm_bound() const;
  Interval eval(const Interval& x, const Interval& z) const;
  /// Random sum with sum |a_i| = sup_bound, integer frequencies in [-2, 2].
  static WaveSum random(std::uint64_t seed, double sup_bound, int terms = 3);
};

/// Certificate that the lines {x2 = y, y in K1} meet a tangent leaf of the
/// perturbed parabolas {x2 = x^2 + z + g(x, z), z in K2}: the tangent
/// heights r(z) = phi(z)^2 + z + g(phi(z), z) sweep a set r(K2) of measure at
/// least (1 - Gz) Leb(K2), which must meet K1 once the measures exceed the
/// length of the enclosing hull.
struct RemarkCertificate {
  bool certified = false;
  bool convex = false;
  double leb1 = 0.0;
  double leb2 = 0.0;
  double gx = 0.0; // bound on |g_x|
  double gz = 0.0; // bound on |g_z|
  Interval r0, r1;
  Interval hull_box;
  double slack = 0.0;
  /// Depth-D cylinder pairs (C1, C2) with I1 meeting the enclosure of r(I2).
  std::size_t overlap_pairs = 0;
};

RemarkCertificate remark_certificate(const CantorTransversal& k1, const CantorTransversal& k2, const WaveSum& g,
                                     int depth);

} // namespace sol

#endif
