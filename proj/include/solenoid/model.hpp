#ifndef SOLENOID_MODEL_HPP
#define SOLENOID_MODEL_HPP

#include "solenoid/cantor.hpp"

#include <Eigen/Dense>

#include <optional>
#include <tuple>
#include <variant>
#include <vector>

namespace sol {

enum class AmbientKind { torus, plane };

struct Ambient {
  AmbientKind kind = AmbientKind::torus;
  int n = 2;

  bool torus() const { return kind == AmbientKind::torus; }
  /// Reduce a lifted point into the fundamental cell [0,1)^n on tori.
  Eigen::VectorXd reduce(Eigen::VectorXd p) const;
  /// Torus (or Euclidean) distance.
  double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
};

/// Leaf profile psi for graph solenoids: a 1-periodic trigonometric
/// polynomial sum a cos(2 pi k x) + b sin(2 pi k x), or a polynomial.
struct Profile {
  enum class Kind { trig, polynomial };
  Kind kind = Kind::trig;
  std::vector<std::tuple<int, double, double>> trig;
  std::vector<double> poly;

  static Profile cosine_well(double amplitude, double base = 0.0); // base + a (1 - cos 2 pi x)
  static Profile polynomial(std::vector<double> coeffs);

  bool periodic() const { return kind == Kind::trig; }
  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
};

struct LinearFoliation {
  Eigen::MatrixXd directions;     // n x k, orthonormal columns
  Eigen::VectorXd transversal_dir; // embedding direction of the transversal
  Eigen::VectorXd offset;
  std::vector<double> periods;     // leaf-domain side lengths
};

/// Horizontal leaves t -> (t, height) in T^2 glued at t = 1 by the return map;
/// the height moves from phi(a) to phi(h(a)) over [transition_start, 1) along a
/// degree-7 smoothstep.
struct CantorSuspension {
  ReturnMap return_map = ReturnMap::identity();
  double transition_start = 0.5;
};

/// Leaves x -> (x, psi(x) + phi(a)).
struct GraphSolenoid {
  Profile profile;
  double x_min = 0.0;
  double x_max = 1.0;
};

struct PerturbationTerm {
  enum class Kind { translation, wave, bump, leaf_bump };
  Kind kind = Kind::translation;
  Eigen::VectorXd vec;
  // wave: vec * sin(2 pi m.p + phase)
  Eigen::VectorXd wave;
  double phase = 0.0;
  // bump: vec * exp(1 - 1/(1 - r^2)), r = |p - center| / radius
  Eigen::VectorXd center;
  double radius = 0.25;
  // leaf_bump: vec * plateau(t - leaf_center) on leaves of `cylinder`
  Address cylinder;
  double leaf_center = 0.0;
  double half_width = 0.0625;
  double ramp = 0.0625;

  static PerturbationTerm translation(Eigen::VectorXd v);
  static PerturbationTerm wave_term(Eigen::VectorXd v, Eigen::VectorXd m, double phase = 0.0);
  /// Volume-preserving shear: a wave whose displacement is orthogonal to m.
  static PerturbationTerm shear(Eigen::VectorXd v, Eigen::VectorXd m);
  static PerturbationTerm bump(Eigen::VectorXd v, Eigen::VectorXd center, double radius);
  static PerturbationTerm leaf_bump(Eigen::VectorXd v, Address cylinder, double center, double half_width,
                                    double ramp);
};

/// Smooth plateau: 1 on |u| <= w, 0 on |u| >= w + r.
double plateau(double u, double w, double r);
double plateau_derivative(double u, double w, double r);

/// A leaf is picked by its cylinder address and transversal coordinate.
struct LeafRef {
  Address addr;
  double y = 0.0;
};

/// Box of leaf parameters over which one leaf is integrated once.
struct LeafDomain {
  std::vector<double> lo;
  std::vector<double> hi;
  bool periodic = false;
  /// Interior kinks of the parametrization (1-dimensional leaves only).
  std::vector<double> breakpoints;
};

class SolenoidModel {
public:
  using Family = std::variant<LinearFoliation, CantorSuspension, GraphSolenoid>;

  SolenoidModel(Ambient ambient, Family family, CantorTransversal transversal, int orientation = 1);

  /// Leaves along V with transversal direction w.  Periods default to the
  /// first return to the section when k = 1 and n = 2.
  static SolenoidModel linear(Ambient ambient, Eigen::MatrixXd directions, Eigen::VectorXd transversal_dir,
                              Eigen::VectorXd offset, CantorTransversal k, std::vector<double> periods = {});
  /// Lines of slope alpha on T^2 over the full-interval transversal at
  /// x1 = 0, masses normalized so the product measure is Lebesgue.
  static SolenoidModel kronecker(double slope, int depth, double x_offset = 0.0);
  /// Circles x2 = y, y in K.
  static SolenoidModel horizontal_circles(CantorTransversal k);
  /// The single circle x1 = c, oriented along +e2.
  static SolenoidModel vertical_circle(double c);

  const Ambient& ambient() const { return ambient_; }
  const Family& family() const { return family_; }
  const CantorTransversal& transversal() const { return transversal_; }
  int orientation() const { return orientation_; }
  int leaf_dim() const;
  const std::vector<PerturbationTerm>& perturbation() const { return perturbation_; }
  double perturbation_scale() const { return perturbation_scale_; }
  bool is_linear() const { return std::holds_alternative<LinearFoliation>(family_) && perturbation_.empty(); }

  SolenoidModel with_perturbation(std::vector<PerturbationTerm> terms, double scale = 1.0) const;
  SolenoidModel with_scale(double scale) const;
  SolenoidModel with_transversal(CantorTransversal k) const;
  SolenoidModel with_orientation(int o) const;
  SolenoidModel with_mass_scale(double lambda) const;

  LeafRef leaf(const Address& a) const { return {a, transversal_.midpoint(a)}; }

  /// Point of the leaf in R^n before reduction mod 1.
  Eigen::VectorXd lift(const LeafRef& leaf, const Eigen::VectorXd& t) const;
  Eigen::VectorXd leaf_point(const LeafRef& leaf, const Eigen::VectorXd& t) const;
  /// Leafwise differential, n x k, first column multiplied by the orientation.
  Eigen::MatrixXd leaf_jacobian(const LeafRef& leaf, const Eigen::VectorXd& t) const;
  /// Jacobian with unit columns; throws ImmersionError on rank deficiency.
  Eigen::MatrixXd leaf_frame(const LeafRef& leaf, const Eigen::VectorXd& t) const;

  LeafDomain fundamental_domain(double chart_offset = 0.0) const;
  bool closed_leaves() const;

private:
  Eigen::VectorXd base_point(const LeafRef& leaf, const Eigen::VectorXd& t) const;
  Eigen::MatrixXd base_jacobian(const LeafRef& leaf, const Eigen::VectorXd& t) const;

  Ambient ambient_;
  Family family_;
  CantorTransversal transversal_;
  int orientation_ = 1;
  std::vector<PerturbationTerm> perturbation_;
  double perturbation_scale_ = 1.0;
};

inline Eigen::VectorXd vec1(double t)
{
  Eigen::VectorXd v(1);
  v[0] = t;
  return v;
}

} // namespace sol

#endif
