#include "solenoid/tangency.hpp"

#include "solenoid/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace sol {

namespace {

// Leaves x -> (x, psi(x) + shift + y) over [xa, xb].
struct GraphLike {
  std::function<double(double)> psi;
  std::function<double(double)> dpsi;
  double shift = 0.0;
  double xa = 0.0;
  double xb = 1.0;
};

std::optional<GraphLike> graph_like(const SolenoidModel& m)
{
  if (m.ambient().n != 2 || !m.perturbation().empty())
    return std::nullopt;
  if (const auto* lin = std::get_if<LinearFoliation>(&m.family())) {
    const Eigen::VectorXd u = lin->directions.col(0);
    if (lin->directions.cols() != 1 || u[1] != 0.0 || std::abs(u[0]) != 1.0 || lin->transversal_dir[0] != 0.0 ||
        lin->transversal_dir[1] != 1.0)
      return std::nullopt;
    const LeafDomain d = m.fundamental_domain();
    GraphLike g;
    g.psi = [](double) { return 0.0; };
    g.dpsi = [](double) { return 0.0; };
    g.shift = lin->offset[1];
    const double a = lin->offset[0] + u[0] * d.lo[0], b = lin->offset[0] + u[0] * d.hi[0];
    g.xa = std::min(a, b);
    g.xb = std::max(a, b);
    return g;
  }
  if (const auto* gs = std::get_if<GraphSolenoid>(&m.family())) {
    GraphLike g;
    const Profile prof = gs->profile;
    g.psi = [prof](double x) { return prof.value(x); };
    g.dpsi = [prof](double x) { return prof.derivative(x); };
    g.xa = gs->x_min;
    g.xb = gs->x_max;
    return g;
  }
  return std::nullopt;
}

// Values of Delta = (psi2 + s2) - (psi1 + s1) at its critical points.
std::vector<double> critical_values(const GraphLike& g1, const GraphLike& g2, bool torus)
{
  const double xa = torus ? 0.0 : std::max(g1.xa, g2.xa);
  const double xb = torus ? 1.0 : std::min(g1.xb, g2.xb);
  std::vector<double> out;
  if (!(xb > xa))
    return out;
  auto delta = [&](double x) { return g2.psi(x) + g2.shift - g1.psi(x) - g1.shift; };
  auto slope = [&](double x) { return g2.dpsi(x) - g1.dpsi(x); };
  const int cells = 4096;
  const double h = (xb - xa) / cells;
  std::vector<double> d(cells + 1);
  bool flat = true;
  for (int i = 0; i <= cells; ++i) {
    d[static_cast<std::size_t>(i)] = slope(xa + i * h);
    flat = flat && std::abs(d[static_cast<std::size_t>(i)]) < 1e-14;
  }
  if (flat)
    throw RefusalError("leaves of the two models are parallel: tangencies are not isolated");
  for (int i = 0; i < cells; ++i) {
    const double da = d[static_cast<std::size_t>(i)], db = d[static_cast<std::size_t>(i + 1)];
    if (da == 0.0 && (i > 0 || !torus))
      out.push_back(delta(xa + i * h));
    if (da * db < 0.0) {
      double a = xa + i * h, b = xa + (i + 1) * h;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double mid = 0.5 * (a + b);
        ((slope(mid) > 0.0) == (da > 0.0) ? a : b) = mid;
      }
      out.push_back(delta(0.5 * (a + b)));
    }
  }
  if (!torus && d[cells] == 0.0)
    out.push_back(delta(xb));
  if (torus && d[0] == 0.0)
    out.push_back(delta(xa));
  return out;
}

bool pair_meets(const ClosedInterval& i1, const ClosedInterval& i2, const std::vector<double>& crit, bool torus)
{
  // y1 - y2 in [lo, hi] must hit a critical value (mod 1 on tori).
  const double slack = 1e-12;
  const double lo = i1.lo - i2.hi - slack, hi = i1.hi - i2.lo + slack;
  for (double c : crit) {
    if (torus) {
      const double k = std::ceil(lo - c);
      if (c + k <= hi)
        return true;
    } else if (c >= lo && c <= hi) {
      return true;
    }
  }
  return false;
}

std::vector<Address> refine(const Address& a, int max_depth)
{
  if (a.depth >= max_depth)
    return {a};
  return {a.child(0), a.child(1)};
}

double union_mass(const CantorTransversal& k, std::set<Address> cyl)
{
  std::vector<double> m;
  for (const auto& a : cyl)
    m.push_back(k.mass(a));
  return pairwise_sum(m);
}

} // namespace

TangencySet detect_tangencies(const SolenoidModel& m1, const SolenoidModel& m2, int depth, double threshold,
                              int bound_depth)
{
  if (bound_depth < depth)
    bound_depth = depth;
  TangencySet ts;
  IntersectionOptions opts;
  opts.threshold = threshold;
  for (auto& r : intersection_points(m1, m2, depth, opts))
    if (!r.transversal)
      ts.flagged.push_back(std::move(r));

  const auto& k1 = m1.transversal();
  const auto& k2 = m2.transversal();
  const auto g1 = graph_like(m1), g2 = graph_like(m2);
  if (g1 && g2) {
    ts.interval_bound = true;
    const bool torus = m1.ambient().torus();
    const auto crit = critical_values(*g1, *g2, torus);
    std::vector<CylinderPair> active;
    if (!crit.empty() && pair_meets(k1.interval({}), k2.interval({}), crit, torus))
      active.push_back({Address{}, Address{}});
    for (int d = 0; d <= bound_depth; ++d) {
      if (d > 0) {
        std::vector<CylinderPair> next;
        for (const auto& [a1, a2] : active)
          for (const Address& c1 : refine(a1, std::min(d, k1.depth())))
            for (const Address& c2 : refine(a2, std::min(d, k2.depth())))
              if (k1.mass(c1) > 0.0 && k2.mass(c2) > 0.0 && pair_meets(k1.interval(c1), k2.interval(c2), crit, torus))
                next.push_back({c1, c2});
        active = std::move(next);
      }
      std::set<Address> s1, s2;
      for (const auto& [a1, a2] : active) {
        s1.insert(a1);
        s2.insert(a2);
      }
      ts.mass_bound.push_back(std::max(union_mass(k1, s1), union_mass(k2, s2)));
      if (d == depth)
        ts.excluded.insert(active.begin(), active.end());
    }
  } else {
    for (const auto& r : ts.flagged)
      ts.excluded.insert({r.leaf1.addr, r.leaf2.addr});
    for (int d = 0; d <= bound_depth; ++d) {
      std::set<Address> s1, s2;
      for (const auto& r : ts.flagged) {
        s1.insert(r.leaf1.addr.prefix(std::min(d, r.leaf1.addr.depth)));
        s2.insert(r.leaf2.addr.prefix(std::min(d, r.leaf2.addr.depth)));
      }
      ts.mass_bound.push_back(std::max(union_mass(k1, s1), union_mass(k2, s2)));
    }
  }
  if (k1.spec().measure == MeasureKind::lebesgue && k2.spec().measure == MeasureKind::lebesgue)
    ts.inclusion_exclusion_bound = k1.limit_lebesgue() + k2.limit_lebesgue() - 1.0;
  return ts;
}

AePairing ae_pairing(const SolenoidModel& m1, const SolenoidModel& m2, int depth, double tolerance, int null_depth)
{
  if (null_depth < depth)
    null_depth = depth;
  AePairing out;
  out.depth = depth;
  out.null_depth = null_depth;
  out.tangencies = detect_tangencies(m1, m2, depth, tangency_threshold, null_depth);
  const double residual = out.tangencies.mass_bound[static_cast<std::size_t>(null_depth)];
  if (residual > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "tangency set F is not null-transverse: mass bound " << residual << " at depth " << null_depth
       << " exceeds tolerance " << tolerance;
    if (out.tangencies.inclusion_exclusion_bound && *out.tangencies.inclusion_exclusion_bound > 0.0)
      os << "; Leb(K1) + Leb(K2) - 1 = " << *out.tangencies.inclusion_exclusion_bound
         << " > 0 bounds the mass of F from below (fat Cantor obstruction)";
    throw RefusalError(os.str());
  }
  out.error_bound = out.tangencies.mass_bound[static_cast<std::size_t>(depth)];
  out.excluded_pairs = out.tangencies.excluded.size();
  if (out.tangencies.flagged.empty() && out.tangencies.excluded.empty()) {
    out.value = pairing_exact(m1, m2, depth);
    return out;
  }
  std::vector<double> terms;
  for (const auto& r : intersection_points(m1, m2, depth)) {
    if (!r.transversal || out.tangencies.excluded.count({r.leaf1.addr, r.leaf2.addr}))
      continue;
    terms.push_back(r.index * r.mass);
  }
  out.value = pairwise_sum(terms);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double down(double x)
{
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

double up(double x)
{
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

const Interval two_pi_iv{down(two_pi), up(two_pi)};

} // namespace

Interval operator+(const Interval& a, const Interval& b)
{
  return {down(a.lo + b.lo), up(a.hi + b.hi)};
}

Interval operator-(const Interval& a, const Interval& b)
{
  return {down(a.lo - b.hi), up(a.hi - b.lo)};
}

Interval operator*(const Interval& a, const Interval& b)
{
  const double p[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {down(*std::min_element(p, p + 4)), up(*std::max_element(p, p + 4))};
}

Interval sqr(const Interval& a)
{
  if (a.lo >= 0.0)
    return {down(a.lo * a.lo), up(a.hi * a.hi)};
  if (a.hi <= 0.0)
    return {down(a.hi * a.hi), up(a.lo * a.lo)};
  return {0.0, up(std::max(a.lo * a.lo, a.hi * a.hi))};
}

Interval sin(const Interval& a)
{
  if (a.width() >= two_pi)
    return {-1.0, 1.0};
  double lo = std::min(std::sin(a.lo), std::sin(a.hi));
  double hi = std::max(std::sin(a.lo), std::sin(a.hi));
  // Interior extrema at pi/2 + 2 pi k (max) and -pi/2 + 2 pi k (min).
  const double half_pi = 0.5 * std::numbers::pi;
  if (half_pi + two_pi * std::ceil((a.lo - half_pi) / two_pi) <= a.hi)
    hi = 1.0;
  if (-half_pi + two_pi * std::ceil((a.lo + half_pi) / two_pi) <= a.hi)
    lo = -1.0;
  return {std::max(-1.0, lo - 1e-15), std::min(1.0, hi + 1e-15)};
}

Interval hull(const Interval& a, const Interval& b)
{
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

double WaveSum::sup_norm_bound() const
{
  double s = 0.0;
  for (const auto& t : terms)
    s += std::abs(t.a);
  return s;
}

Interval WaveSum::eval(const Interval& x, const Interval& z) const
{
  Interval s(0.0);
  for (const auto& t : terms)
    s = s + Interval(t.a) * sin(two_pi_iv * (Interval(t.b) * x + Interval(t.c) * z) + Interval(t.phase));
  return s;
}

WaveSum WaveSum::random(std::uint64_t seed, double sup_bound, int terms)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> freq(-2, 2);
  WaveSum g;
  std::vector<double> w;
  for (int i = 0; i < terms; ++i)
    w.push_back(unit(rng) + 1e-3);
  double total = 0.0;
  for (double x : w)
    total += x;
  for (int i = 0; i < terms; ++i) {
    WaveSum::Term t;
    t.a = sup_bound * w[static_cast<std::size_t>(i)] / total * (unit(rng) < 0.5 ? -1.0 : 1.0);
    t.b = freq(rng);
    t.c = freq(rng);
    t.phase = two_pi * unit(rng);
    g.terms.push_back(t);
  }
  return g;
}

RemarkCertificate remark_certificate(const CantorTransversal& k1, const CantorTransversal& k2, const WaveSum& g,
                                     int depth)
{
  RemarkCertificate c;
  double curvature = 0.0;
  for (const auto& t : g.terms) {
    c.gx += std::abs(t.a) * two_pi * std::abs(t.b);
    c.gz += std::abs(t.a) * two_pi * std::abs(t.c);
    curvature += std::abs(t.a) * two_pi * two_pi * t.b * t.b;
  }
  c.gx = up(up(c.gx) * (1.0 + 1e-15));
  c.gz = up(up(c.gz) * (1.0 + 1e-15));
  // x^2 + g(x, z) is strictly convex in x, so the tangent point phi(z) is unique.
  c.convex = 2.0 - up(curvature * (1.0 + 1e-15)) > 0.0;
  // 2 phi + g_x(phi, z) = 0 puts phi in [-gx/2, gx/2].
  const Interval phi(-0.5 * c.gx, 0.5 * c.gx);
  auto r = [&](const Interval& z) { return sqr(phi) + z + g.eval(phi, z); };
  const ClosedInterval root2 = k2.interval({});
  c.r0 = r(Interval(root2.lo));
  c.r1 = r(Interval(root2.hi));
  const ClosedInterval root1 = k1.interval({});
  c.hull_box = hull(Interval(root1.lo, root1.hi), Interval(c.r0.lo, c.r1.hi));
  c.leb1 = k1.limit_lebesgue();
  c.leb2 = k2.limit_lebesgue();
  // r is increasing with r' >= 1 - gz, so Leb(r(K2)) >= (1 - gz) Leb(K2).
  const double swept = down(c.leb2 * down(1.0 - c.gz));
  c.slack = down(down(down(c.leb1 - 1e-12) + down(swept - 1e-12)) - up(c.hull_box.width()));
  c.certified = c.convex && c.gz < 1.0 && c.slack > 0.0;

  const std::uint64_t n1 = std::uint64_t{1} << std::min(depth, k1.depth());
  const std::uint64_t n2 = std::uint64_t{1} << std::min(depth, k2.depth());
  std::vector<Interval> images;
  for (std::uint64_t j = 0; j < n2; ++j) {
    const ClosedInterval iv = k2.interval(Address::from_index(j, std::min(depth, k2.depth())));
    images.push_back({r(Interval(iv.lo)).lo, r(Interval(iv.hi)).hi});
  }
  for (std::uint64_t i = 0; i < n1; ++i) {
    const ClosedInterval iv = k1.interval(Address::from_index(i, std::min(depth, k1.depth())));
    const Interval i1(iv.lo, iv.hi);
    for (const auto& im : images)
      c.overlap_pairs += i1.intersects(im) ? 1 : 0;
  }
  return c;
}

} // namespace sol
