#include "solenoid/cantor.hpp"

#include "solenoid/core.hpp"

#include <cmath>
#include <deque>

namespace sol {

Address Address::parse(std::string_view digits)
{
  if (digits.size() > static_cast<std::size_t>(max_depth))
    throw AddressError("address deeper than " + std::to_string(max_depth) + ": " + std::string(digits));
  Address a;
  for (char c : digits) {
    if (c != '0' && c != '1')
      throw AddressError("address digits must be 0 or 1: '" + std::string(digits) + "'");
    a = a.child(c - '0');
  }
  return a;
}

std::string Address::str() const
{
  std::string s(static_cast<std::size_t>(depth), '0');
  for (int i = 0; i < depth; ++i)
    s[static_cast<std::size_t>(i)] = digit(i) ? '1' : '0';
  return s;
}

Address Address::prefix(int d) const
{
  if (d >= depth)
    return *this;
  const std::uint64_t mask = d == 0 ? 0 : (~std::uint64_t{0} >> (64 - d));
  return {bits & mask, d};
}

bool Address::has_prefix(const Address& p) const
{
  return p.depth <= depth && prefix(p.depth) == p;
}

CantorSpec CantorSpec::fat(double base, double removed, int depth)
{
  CantorSpec s;
  s.construction = Construction::fat_gaps;
  s.gap_base = base;
  s.gap_scale = removed * (base - 2.0);
  s.depth = depth;
  return s;
}

CantorTransversal CantorTransversal::build(const CantorSpec& spec)
{
  if (spec.depth < 0 || spec.depth > max_depth)
    throw ConstructionError("depth must lie in [0, " + std::to_string(max_depth) + "]");
  switch (spec.construction) {
  case Construction::interval:
    break;
  case Construction::middle_ratio:
    if (!(spec.ratio > 0.0 && spec.ratio < 1.0))
      throw ConstructionError("middle ratio must lie in (0,1)");
    if (spec.measure == MeasureKind::lebesgue)
      throw ConstructionError("lebesgue-restricted measure needs a limit set of positive length; "
                              "middle-ratio Cantor sets are Lebesgue-null");
    break;
  case Construction::fat_gaps: {
    if (!(spec.gap_base > 2.0) || !(spec.gap_scale > 0.0))
      throw ConstructionError("fat Cantor gap schedule needs base > 2 and a positive scale");
    const double removed = spec.gap_scale / (spec.gap_base - 2.0);
    if (!(removed < 1.0))
      throw ConstructionError("fat Cantor gap schedule removes total length " + std::to_string(removed) +
                              " >= 1");
    double len = 1.0;
    for (int j = 1; j <= 64; ++j) {
      const double g = spec.gap_scale * std::pow(spec.gap_base, -j);
      if (!(g < len))
        throw ConstructionError("gap at level " + std::to_string(j) + " exceeds the interval it splits");
      len = 0.5 * (len - g);
    }
    break;
  }
  }
  if (spec.measure == MeasureKind::bernoulli && !(spec.p >= 0.0 && spec.p <= 1.0))
    throw ConstructionError("bernoulli parameter must lie in [0,1]");
  if (spec.measure != MeasureKind::explicit_masses && !(spec.total_mass > 0.0))
    throw ConstructionError("total mass must be positive");
  if (spec.measure == MeasureKind::explicit_masses) {
    if (!spec.masses.count(""))
      throw ConstructionError("explicit masses must include the root \"\"");
    for (const auto& [k, v] : spec.masses) {
      const Address a = Address::parse(k);
      if (a.depth > spec.depth)
        throw ConstructionError("explicit mass given below the tree depth at '" + k + "'");
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConstructionError("negative or non-finite mass at '" + k + "'");
    }
  }
  return CantorTransversal(spec);
}

bool CantorTransversal::continuous() const
{
  return spec_.construction == Construction::interval &&
         (spec_.measure == MeasureKind::lebesgue || (spec_.measure == MeasureKind::bernoulli && spec_.p == 0.5));
}

double CantorTransversal::gap(int level) const
{
  if (level < 1)
    return 0.0;
  switch (spec_.construction) {
  case Construction::interval:
    return 0.0;
  case Construction::middle_ratio:
    return spec_.ratio * level_length(level - 1) / std::ldexp(1.0, level - 1);
  case Construction::fat_gaps:
    return spec_.gap_scale * std::pow(spec_.gap_base, -level);
  }
  return 0.0;
}

ClosedInterval CantorTransversal::interval(const Address& a) const
{
  if (a.depth > max_depth)
    throw AddressError("address too deep");
  ClosedInterval iv{0.0, 1.0};
  for (int level = 0; level < a.depth; ++level) {
    const double len = iv.length();
    double child = 0.0;
    switch (spec_.construction) {
    case Construction::interval:
      child = 0.5 * len;
      break;
    case Construction::middle_ratio:
      child = 0.5 * len * (1.0 - spec_.ratio);
      break;
    case Construction::fat_gaps:
      child = 0.5 * (len - gap(level + 1));
      break;
    }
    if (a.digit(level) == 0)
      iv.hi = iv.lo + child;
    else
      iv.lo = iv.hi - child;
  }
  return iv;
}

double CantorTransversal::level_length(int d) const
{
  double len = 1.0;
  for (int level = 1; level <= d; ++level) {
    switch (spec_.construction) {
    case Construction::interval:
      len *= 0.5;
      break;
    case Construction::middle_ratio:
      len *= 0.5 * (1.0 - spec_.ratio);
      break;
    case Construction::fat_gaps:
      len = 0.5 * (len - spec_.gap_scale * std::pow(spec_.gap_base, -level));
      break;
    }
  }
  return std::ldexp(len, d);
}

// Lebesgue measure of (limit set) inside one depth-d interval.
double CantorTransversal::remaining_lebesgue(int d) const
{
  const double piece = level_length(d) / std::ldexp(1.0, d);
  if (spec_.construction != Construction::fat_gaps)
    return spec_.construction == Construction::interval ? piece : 0.0;
  const double tail = spec_.gap_scale * std::pow(spec_.gap_base, -d) / (spec_.gap_base - 2.0);
  return piece - tail;
}

double CantorTransversal::limit_lebesgue() const
{
  return remaining_lebesgue(0);
}

double CantorTransversal::mass(const Address& a) const
{
  if (a.depth > spec_.depth)
    throw AddressError("address '" + a.str() + "' is deeper than the transversal depth " +
                       std::to_string(spec_.depth));
  switch (spec_.measure) {
  case MeasureKind::bernoulli: {
    double m = spec_.total_mass;
    for (int level = 0; level < a.depth; ++level)
      m *= a.digit(level) == 0 ? spec_.p : 1.0 - spec_.p;
    return m;
  }
  case MeasureKind::lebesgue:
    return spec_.total_mass * remaining_lebesgue(a.depth) / remaining_lebesgue(0);
  case MeasureKind::explicit_masses: {
    auto it = spec_.masses.find(a.str());
    if (it == spec_.masses.end())
      throw AddressError("no mass stored for address '" + a.str() + "'");
    return it->second;
  }
  }
  return 0.0;
}

std::optional<Address> CantorTransversal::additivity_violation(double tol) const
{
  const int limit = std::min(spec_.depth, 20);
  std::deque<Address> queue{Address{}};
  while (!queue.empty()) {
    const Address a = queue.front();
    queue.pop_front();
    if (a.depth >= limit)
      continue;
    const Address l = a.child(0), r = a.child(1);
    if (spec_.measure == MeasureKind::explicit_masses) {
      const bool has_l = spec_.masses.count(l.str()) != 0;
      const bool has_r = spec_.masses.count(r.str()) != 0;
      if (!has_l && !has_r)
        continue;
      if (has_l != has_r)
        return a;
    }
    const double parent = mass(a);
    const double kids = mass(l) + mass(r);
    if (std::abs(parent - kids) > tol * std::max(1.0, std::abs(parent)))
      return a;
    queue.push_back(l);
    queue.push_back(r);
  }
  return std::nullopt;
}

ReturnMap ReturnMap::permutation(int depth, std::vector<std::uint32_t> perm)
{
  if (depth < 0 || depth > 24)
    throw ConstructionError("permutation depth must lie in [0, 24]");
  const std::size_t n = std::size_t{1} << depth;
  if (perm.size() != n)
    throw ConstructionError("permutation of depth " + std::to_string(depth) + " needs " +
                            std::to_string(n) + " entries");
  std::vector<std::uint32_t> inv(n, UINT32_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    if (perm[i] >= n || inv[perm[i]] != UINT32_MAX)
      throw ConstructionError("return map is not a bijection of depth-" + std::to_string(depth) +
                              " cylinders");
    inv[perm[i]] = static_cast<std::uint32_t>(i);
  }
  ReturnMap r(Kind::permutation, depth, std::move(perm));
  r.inv_ = std::move(inv);
  return r;
}

namespace {

std::uint64_t low_mask(int d)
{
  return d == 0 ? 0 : (~std::uint64_t{0} >> (64 - d));
}

} // namespace

Address ReturnMap::apply(const Address& a) const
{
  switch (kind_) {
  case Kind::identity:
    return a;
  case Kind::odometer:
    return {(a.bits + 1) & low_mask(a.depth), a.depth};
  case Kind::permutation: {
    if (a.depth < perm_depth_)
      throw AddressError("permutation return map acts on depth >= " + std::to_string(perm_depth_));
    const std::uint64_t m = low_mask(perm_depth_);
    return {perm_[a.bits & m] | (a.bits & ~m), a.depth};
  }
  }
  return a;
}

Address ReturnMap::inverse(const Address& a) const
{
  switch (kind_) {
  case Kind::identity:
    return a;
  case Kind::odometer:
    return {(a.bits - 1) & low_mask(a.depth), a.depth};
  case Kind::permutation: {
    if (a.depth < perm_depth_)
      throw AddressError("permutation return map acts on depth >= " + std::to_string(perm_depth_));
    const std::uint64_t m = low_mask(perm_depth_);
    return {inv_[a.bits & m] | (a.bits & ~m), a.depth};
  }
  }
  return a;
}

double holonomy_invariance_deviation(const CantorTransversal& k, const ReturnMap& h, int depth)
{
  if (depth > k.depth())
    throw AddressError("deviation depth exceeds the transversal depth");
  const std::uint64_t n = std::uint64_t{1} << depth;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const Address c = Address::from_index(i, depth);
    worst = std::max(worst, std::abs(k.mass(h.apply(c)) - k.mass(c)));
  }
  return worst;
}

} // namespace sol
