#ifndef SOLENOID_CANTOR_HPP
#define SOLENOID_CANTOR_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sol {

inline constexpr int max_depth = 32;

/// A cylinder of the binary tree: the first `depth` digits of an itinerary.
/// Digit i (0-based level) is stored in bit i, so the first digit is the
/// least significant one, which is also the odometer's convention.
struct Address {
  std::uint64_t bits = 0;
  int depth = 0;

  static Address parse(std::string_view digits);
  static Address from_index(std::uint64_t index, int depth) { return {index, depth}; }

  std::string str() const;
  int digit(int level) const { return static_cast<int>((bits >> level) & 1u); }
  Address child(int d) const { return {bits | (std::uint64_t(d & 1) << depth), depth + 1}; }
  Address prefix(int d) const;
  bool has_prefix(const Address& p) const;

  auto operator<=>(const Address&) const = default;
};

struct ClosedInterval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

enum class Construction { interval, middle_ratio, fat_gaps };
enum class MeasureKind { bernoulli, lebesgue, explicit_masses };

struct CantorSpec {
  Construction construction = Construction::middle_ratio;
  /// Removed middle fraction for middle_ratio.
  double ratio = 1.0 / 3.0;
  /// Gap at level d is gap_scale * gap_base^{-d}, d >= 1, for fat_gaps.
  double gap_base = 4.0;
  double gap_scale = 0.8;
  int depth = 8;
  MeasureKind measure = MeasureKind::bernoulli;
  double p = 0.5;
  double total_mass = 1.0;
  std::map<std::string, double> masses;

  /// Gap schedule whose removed total is `removed`, i.e. scale = removed * (base - 2).
  static CantorSpec fat(double base, double removed, int depth);
};

/// Finite-depth binary cylinder tree over [0,1] with a measure on cylinders.
/// Intervals and generated masses are computed on demand from the
/// construction; only explicit masses are stored.
class CantorTransversal {
public:
  static CantorTransversal build(const CantorSpec& spec);

  const CantorSpec& spec() const { return spec_; }
  int depth() const { return spec_.depth; }
  /// True when the measure is absolutely continuous inside each cylinder
  /// (full interval with its Lebesgue measure).
  bool continuous() const;

  ClosedInterval interval(const Address& a) const;
  double midpoint(const Address& a) const { return interval(a).mid(); }
  double mass(const Address& a) const;
  double total_mass() const { return mass(Address{}); }

  /// Total length of the 2^d intervals at depth d.
  double level_length(int d) const;
  /// Lebesgue measure of the limit set (0 for middle_ratio constructions).
  double limit_lebesgue() const;
  double gap(int level) const;

  /// First node (in breadth-first order) where mass(node) differs from the
  /// sum of its children's masses by more than `tol`.
  std::optional<Address> additivity_violation(double tol = 1e-12) const;

private:
  explicit CantorTransversal(CantorSpec s) : spec_(std::move(s)) {}
  double remaining_lebesgue(int d) const;

  CantorSpec spec_;
};

/// Holonomy return map acting on cylinders of a given depth.
class ReturnMap {
public:
  enum class Kind { identity, odometer, permutation };

  static ReturnMap identity() { return ReturnMap(Kind::identity, 0, {}); }
  static ReturnMap odometer() { return ReturnMap(Kind::odometer, 0, {}); }
  /// Permutation of the depth-`depth` cylinders, given by index.
  static ReturnMap permutation(int depth, std::vector<std::uint32_t> perm);

  Kind kind() const { return kind_; }
  int permutation_depth() const { return perm_depth_; }

  Address apply(const Address& a) const;
  Address inverse(const Address& a) const;

private:
  ReturnMap(Kind k, int d, std::vector<std::uint32_t> p)
      : kind_(k), perm_depth_(d), perm_(std::move(p))
  {
  }

  Kind kind_;
  int perm_depth_;
  std::vector<std::uint32_t> perm_;
  std::vector<std::uint32_t> inv_;
};

double holonomy_invariance_deviation(const CantorTransversal& k, const ReturnMap& h, int depth);

} // namespace sol

#endif
