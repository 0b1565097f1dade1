#ifndef SOLENOID_PERTURB_HPP
#define SOLENOID_PERTURB_HPP

#include "solenoid/currents.hpp"
#include "solenoid/intersection.hpp"

#include <cstdint>
#include <vector>

namespace sol {

struct PerturbOptions {
  double epsilon = 1e-2;
  /// Required margin; 0 means epsilon / 10.
  double delta = 0.0;
  int retries = 100;
  std::uint64_t seed = 0;
  int piece_depth = 6;
  /// Leaf boxes are centred at multiples of 1/box_count.
  int box_count = 8;
  /// Depth of the representative leaves that are checked; -1 uses the transversal depth.
  int check_depth = -1;
  QuadratureSpec quad;
};

struct PerturbBox {
  Address piece;
  double center = 0.0;
  double budget = 0.0;
  Eigen::VectorXd v;
  int attempts = 0;
};

struct PerturbResult {
  SolenoidModel model;
  std::vector<PerturbBox> boxes;
  double delta = 0.0;
  /// Smallest margin of the final model against N (infinite when nothing crosses).
  double min_margin = 0.0;
  double initial_min_margin = 0.0;
  /// Max-norm change of rs_class between the input and the output.
  double class_drift = 0.0;
  /// Drift along the homotopy from the input to the output.
  double homotopy_drift = 0.0;
  bool unchanged = false;
};

/// Pushes the leaves of m off their tangencies with N by plateau bumps
/// f + rho(t) v, one cylinder piece and leaf box at a time, with budgets
/// epsilon / 2^i, i >= 1.  Throws RefusalError naming the box when no sample within
/// the retry budget reaches the margin.
PerturbResult perturb_to_transversality(const SolenoidModel& m, const Subtorus& N, const PerturbOptions& opts = {});

} // namespace sol

#endif
