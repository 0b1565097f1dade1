#ifndef SOLENOID_CURRENTS_HPP
#define SOLENOID_CURRENTS_HPP

#include "solenoid/forms.hpp"
#include "solenoid/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace sol {

struct QuadratureSpec {
  /// Leaf nodes per dimension (Gauss-Legendre order or trapezoid count).
  int order = 64;
  /// Cylinder depth; defaults to the transversal's depth.
  std::optional<int> depth;
  /// Start of the fundamental leaf domain.
  double chart_offset = 0.0;
  /// Gauss-Legendre nodes per cylinder on full-interval transversals.
  int transversal_order = 4;

  void check() const;
};

struct CurrentResult {
  double value = 0.0;
  std::vector<std::string> warnings;
};

/// <(f, S_mu), omega>: sum over cylinders of mass times the leaf integral of
/// the pulled-back form over one fundamental domain.
CurrentResult evaluate_current_report(const SolenoidModel& m, const DifferentialForm& omega,
                                      const QuadratureSpec& quad = {});
double evaluate_current(const SolenoidModel& m, const DifferentialForm& omega, const QuadratureSpec& quad = {});

struct HomologyClass {
  int n = 2;
  int k = 1;
  /// Indexed by harmonic_basis(n, k).
  Eigen::VectorXd coeffs;

  double operator[](IndexSet idx) const;
};

HomologyClass rs_class(const SolenoidModel& m, const QuadratureSpec& quad = {});

/// Intersection form of the torus on complementary degrees.
double poincare_dual_pairing(const HomologyClass& a, const HomologyClass& b);

/// |<S, d beta>|.
double stokes_residual(const SolenoidModel& m, const DifferentialForm& beta, const QuadratureSpec& quad = {});

/// Max-norm class difference between m and m moved by `terms` at time 1.
/// The immersion is sampled at `time_samples` equally spaced times.
double homotopy_drift(const SolenoidModel& m, const std::vector<PerturbationTerm>& terms,
                      const QuadratureSpec& quad = {}, int time_samples = 5);

/// Throws ImmersionError if the leafwise differential degenerates at any of
/// `samples` points per cylinder of depth min(depth, 8).
void check_immersion(const SolenoidModel& m, int samples = 4);

} // namespace sol

#endif
