#include "solenoid/intersection.hpp"

#include "solenoid/core.hpp"
#include "solenoid/detail/solve.hpp"

#include <cmath>
#include <numeric>

namespace sol {

namespace {

using Point2 = Eigen::Vector2d;

double polygon_area(const std::vector<Point2>& p)
{
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point2& u = p[i];
    const Point2& v = p[(i + 1) % p.size()];
    a += u.x() * v.y() - v.x() * u.y();
  }
  return 0.5 * std::abs(a);
}

// Sutherland-Hodgman against the half-plane grad . y + c >= 0.
std::vector<Point2> clip(const std::vector<Point2>& poly, const Point2& grad, double c)
{
  std::vector<Point2> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % poly.size()];
    const double da = grad.dot(a) + c, db = grad.dot(b) + c;
    if (da >= 0.0)
      out.push_back(a);
    if ((da >= 0.0) != (db >= 0.0))
      out.push_back(a + (b - a) * (da / (da - db)));
  }
  return out;
}

// Fraction of the (y1, y2) box whose image s = sm + y2 g2 - y1 g1 lies in
// [lo, hi).  Degenerate boxes (a fixed leaf on one side) reduce to segments
// or points.
double clipped_fraction(const ClosedInterval& y1, const ClosedInterval& y2, const Point2& sm, const Point2& g1,
                        const Point2& g2, const Point2& lo, const Point2& hi)
{
  const bool s1 = y1.length() > 0.0, s2 = y2.length() > 0.0;
  if (!s1 && !s2) {
    const Point2 x = sm + y2.lo * g2 - y1.lo * g1;
    return x.x() >= lo.x() && x.x() < hi.x() && x.y() >= lo.y() && x.y() < hi.y() ? 1.0 : 0.0;
  }
  if (!s1 || !s2) {
    // Free variable v in [a, b]: s = base + v d.
    const ClosedInterval& iv = s1 ? y1 : y2;
    const Point2 d = s1 ? Point2(-g1) : g2;
    const Point2 base = s1 ? Point2(sm + y2.lo * g2) : Point2(sm - y1.lo * g1);
    double a = iv.lo, b = iv.hi;
    for (int ax = 0; ax < 2; ++ax) {
      if (d[ax] == 0.0) {
        if (!(base[ax] >= lo[ax] && base[ax] < hi[ax]))
          return 0.0;
        continue;
      }
      double u = (lo[ax] - base[ax]) / d[ax], v = (hi[ax] - base[ax]) / d[ax];
      if (u > v)
        std::swap(u, v);
      a = std::max(a, u);
      b = std::min(b, v);
    }
    return std::max(0.0, b - a) / iv.length();
  }
  std::vector<Point2> p = {{y1.lo, y2.lo}, {y1.hi, y2.lo}, {y1.hi, y2.hi}, {y1.lo, y2.hi}};
  const double full = polygon_area(p);
  for (int ax = 0; ax < 2 && !p.empty(); ++ax) {
    // sm + y2 g2 - y1 g1 >= lo  and  <= hi, as half-planes in (y1, y2).
    const Point2 grad(-g1[ax], g2[ax]);
    p = clip(p, grad, sm[ax] - lo[ax]);
    if (!p.empty())
      p = clip(p, -grad, hi[ax] - sm[ax]);
  }
  return p.size() < 3 ? 0.0 : polygon_area(p) / full;
}

// Exact average number of crossings of two linear 1-leaves in T^2 over the
// cylinder boxes, weighted by the product measure.  Transversals that are
// full intervals carry the uniform density inside each cylinder.
double averaged_linear_pairing(const SolenoidModel& m1, const SolenoidModel& m2, int depth)
{
  const auto& l1 = std::get<LinearFoliation>(m1.family());
  const auto& l2 = std::get<LinearFoliation>(m2.family());
  Eigen::Matrix2d a;
  a << l1.directions, -l2.directions;
  if (std::abs(a.determinant()) < 1e-12)
    return 0.0;
  const Eigen::Matrix2d inv = a.inverse();
  const LeafWindow w1 = detail::default_window(m1), w2 = detail::default_window(m2);
  const Point2 lo(w1.lo[0], w2.lo[0]), hi(w1.hi[0], w2.hi[0]);
  const Eigen::Vector2d base = l2.offset - l1.offset;
  const Point2 g1 = inv * l1.transversal_dir, g2 = inv * l2.transversal_dir;
  const int eps = intersection_index(l1.directions * m1.orientation(), l2.directions * m2.orientation()).sign;

  const auto& k1 = m1.transversal();
  const auto& k2 = m2.transversal();
  const bool spread1 = k1.continuous(), spread2 = k2.continuous();
  // Each model is refined to the working depth or to its full depth, whichever is smaller.
  const int d1 = std::min(depth, k1.depth()), d2 = std::min(depth, k2.depth());
  const std::uint64_t n1 = std::uint64_t{1} << d1, n2 = std::uint64_t{1} << d2;

  auto rows = parallel_map(static_cast<std::size_t>(n1), [&](std::size_t i) {
    const Address c1 = Address::from_index(i, d1);
    const double mass1 = k1.mass(c1);
    std::vector<double> terms;
    if (mass1 == 0.0)
      return 0.0;
    const ClosedInterval y1 = spread1 ? k1.interval(c1) : ClosedInterval{k1.midpoint(c1), k1.midpoint(c1)};
    for (std::uint64_t j = 0; j < n2; ++j) {
      const Address c2 = Address::from_index(j, d2);
      const double mass2 = k2.mass(c2);
      if (mass2 == 0.0)
        continue;
      const ClosedInterval y2 = spread2 ? k2.interval(c2) : ClosedInterval{k2.midpoint(c2), k2.midpoint(c2)};
      std::vector<Eigen::Vector2d> corners; // y2 w2 - y1 w1 at the box corners
      for (double u : {y1.lo, y1.hi})
        for (double v : {y2.lo, y2.hi})
          corners.push_back(base + v * l2.transversal_dir - u * l1.transversal_dir);
      // Lattice shifts m with (shape + m) mapped into the window box.
      Eigen::Vector2d mn = Eigen::Vector2d::Constant(INFINITY), mx = Eigen::Vector2d::Constant(-INFINITY);
      for (int cx = 0; cx < 2; ++cx)
        for (int cy = 0; cy < 2; ++cy) {
          const Eigen::Vector2d s(cx ? hi.x() : lo.x(), cy ? hi.y() : lo.y());
          for (const auto& c : corners) {
            const Eigen::Vector2d m = a * s - c;
            mn = mn.cwiseMin(m);
            mx = mx.cwiseMax(m);
          }
        }
      double count = 0.0;
      for (double mx0 = std::floor(mn.x()) - 1.0; mx0 <= std::ceil(mx.x()) + 1.0; mx0 += 1.0)
        for (double my0 = std::floor(mn.y()) - 1.0; my0 <= std::ceil(mx.y()) + 1.0; my0 += 1.0)
          count += clipped_fraction(y1, y2, inv * (base + Eigen::Vector2d(mx0, my0)), g1, g2, lo, hi);
      terms.push_back(mass1 * mass2 * count);
    }
    return eps * pairwise_sum(terms);
  });
  return pairwise_sum(rows);
}

} // namespace

double pairing_exact(const SolenoidModel& m1, const SolenoidModel& m2, int depth)
{
  if (m1.is_linear() && m2.is_linear() && m1.ambient().torus() && m1.ambient().n == 2 && m2.ambient().n == 2 &&
      m1.leaf_dim() == 1 && m2.leaf_dim() == 1 && (m1.transversal().continuous() || m2.transversal().continuous()))
    return averaged_linear_pairing(m1, m2, depth);
  const auto recs = intersection_points(m1, m2, depth);
  std::vector<double> terms;
  terms.reserve(recs.size());
  for (const auto& r : recs) {
    if (!r.transversal)
      throw RefusalError("tangential intersection at address pair ('" + r.leaf1.addr.str() + "', '" +
                         r.leaf2.addr.str() + "'); use ae_pairing");
    terms.push_back(r.index * r.mass);
  }
  return pairwise_sum(terms);
}

double pairing_via_cup(const SolenoidModel& m1, const SolenoidModel& m2, const QuadratureSpec& quad)
{
  if (!m1.ambient().torus() || !m2.ambient().torus())
    throw InputError("the cup-product pairing is defined on the torus");
  return poincare_dual_pairing(rs_class(m1, quad), rs_class(m2, quad));
}

namespace {

// True when x is within tol of p/q for some q <= qmax (continued fractions).
bool near_rational(double x, int qmax, double tol)
{
  double a = x;
  long long p0 = 1, q0 = 0, p1 = static_cast<long long>(std::floor(a)), q1 = 1;
  for (int it = 0; it < 64; ++it) {
    if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) < tol)
      return true;
    const double frac = a - std::floor(a);
    if (frac < 1e-15)
      return true;
    a = 1.0 / frac;
    const auto c = static_cast<long long>(std::floor(a));
    const long long p2 = c * p1 + p0, q2 = c * q1 + q0;
    if (q2 > qmax)
      return false;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return false;
}

} // namespace

void check_uniquely_ergodic(const SolenoidModel& m)
{
  if (m.closed_leaves())
    return;
  if (const auto* lin = std::get_if<LinearFoliation>(&m.family())) {
    if (m.ambient().n == 2 && m.ambient().torus() && lin->directions.cols() == 1 && m.transversal().continuous()) {
      const Eigen::VectorXd u = lin->directions.col(0);
      if (std::abs(u[0]) > 1e-12 && !near_rational(u[1] / u[0], 100000, 1e-13))
        return;
      throw RefusalError("linear foliation has a rational slope: not uniquely ergodic");
    }
    throw RefusalError("unique ergodicity is only certified for irrational lines on T^2 with the Lebesgue "
                       "transversal");
  }
  if (const auto* s = std::get_if<CantorSuspension>(&m.family())) {
    const auto& spec = m.transversal().spec();
    if (s->return_map.kind() == ReturnMap::Kind::odometer && spec.measure == MeasureKind::bernoulli && spec.p == 0.5)
      return;
    throw RefusalError("only the dyadic odometer with bernoulli(1/2) is certified uniquely ergodic");
  }
  throw RefusalError("graph solenoid with non-closed leaves is not certified uniquely ergodic");
}

std::vector<ExhaustionStep> exhaustion_estimate(const SolenoidModel& m1, const SolenoidModel& m2,
                                                const LeafRef& leaf1, const LeafRef& leaf2,
                                                const std::vector<double>& radii)
{
  check_uniquely_ergodic(m1);
  check_uniquely_ergodic(m2);
  if (m1.leaf_dim() != 1 || m2.leaf_dim() != 1 || m1.ambient().n != 2)
    throw InputError("exhaustion is implemented for 1-solenoids in a 2-dimensional ambient");
  std::vector<ExhaustionStep> out;
  for (double r : radii) {
    if (!(r > 0.0))
      throw InputError("exhaustion radii must be positive");
    auto window = [&](const SolenoidModel& m) {
      return m.closed_leaves() ? detail::default_window(m) : LeafWindow{{0.0}, {r}};
    };
    const LeafWindow w1 = window(m1), w2 = window(m2);
    ExhaustionStep st;
    st.radius = r;
    if (m1.is_linear() && m2.is_linear()) {
      const auto& l1 = std::get<LinearFoliation>(m1.family());
      const auto& l2 = std::get<LinearFoliation>(m2.family());
      const int eps = intersection_index(l1.directions * m1.orientation(), l2.directions * m2.orientation()).sign;
      st.count = eps * detail::linear_pair_count(m1, leaf1, w1, m2, leaf2, w2);
    } else {
      IntersectionOptions opts;
      for (const auto& rec : detail::solve_leaf_pair(m1, leaf1, w1, m2, leaf2, w2, opts))
        st.count += rec.index;
    }
    st.volume = (w1.hi[0] - w1.lo[0]) * (w2.hi[0] - w2.lo[0]);
    st.estimate = st.count / st.volume;
    out.push_back(st);
  }
  return out;
}

// ---------------------------------------------------------------------------

SolenoidModel subtorus_model(const Subtorus& n)
{
  n.check();
  const int q = n.codim();
  if (q < 1 || q >= n.n)
    throw InputError("subtorus must have codimension between 1 and n - 1");
  const IndexSet qmask = n.mask();
  const IndexSet full = (IndexSet{1} << n.n) - 1;
  const auto rest = index_list(full & ~qmask);
  Eigen::MatrixXd dirs = Eigen::MatrixXd::Zero(n.n, static_cast<Eigen::Index>(rest.size()));
  for (std::size_t c = 0; c < rest.size(); ++c)
    dirs(rest[c], static_cast<Eigen::Index>(c)) = 1.0;
  dirs.col(0) *= shuffle_sign(qmask, full & ~qmask);
  const auto fixed = index_list(qmask);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n.n), off = Eigen::VectorXd::Zero(n.n);
  w[fixed[0]] = 1.0;
  for (std::size_t i = 0; i < n.fixed.size(); ++i)
    off[n.fixed[i]] = n.values[i];
  // The depth-0 cylinder's representative sits at 1/2.
  off[fixed[0]] -= 0.5;
  CantorSpec spec;
  spec.depth = 0;
  return SolenoidModel::linear(Ambient{AmbientKind::torus, n.n}, dirs, w, off, CantorTransversal::build(spec),
                               std::vector<double>(rest.size(), 1.0));
}

double PointSolenoid::total_mass() const
{
  std::vector<double> m;
  for (const auto& a : atoms)
    m.push_back(a.mass);
  return pairwise_sum(m);
}

double PointSolenoid::signed_mass() const
{
  std::vector<double> m;
  for (const auto& a : atoms)
    m.push_back(a.sign * a.mass);
  return pairwise_sum(m);
}

InducedSolenoid intersect_submanifold(const SolenoidModel& m, const Subtorus& n, int depth)
{
  n.check();
  if (n.n != m.ambient().n || !m.ambient().torus())
    throw InputError("subtorus and model live in different ambient manifolds");
  const int k = m.leaf_dim(), q = n.codim();
  if (k < q)
    throw DegreeError("leaf dimension is below the codimension of N");
  if (depth < 0)
    depth = m.transversal().depth();
  InducedSolenoid out;
  if (k == q) {
    PointSolenoid ps;
    ps.n = n.n;
    for (const auto& r : intersection_points(m, subtorus_model(n), depth)) {
      if (!r.transversal)
        throw RefusalError("leaves of cylinder '" + r.leaf1.addr.str() + "' are tangent to N (margin " +
                           std::to_string(r.margin) + ")");
      ps.atoms.push_back({r.point, r.leaf1.addr, r.t1, r.index, r.mass});
    }
    out.points = std::move(ps);
    return out;
  }
  if (!m.is_linear())
    throw InputError("positive-dimensional preimages are implemented for linear foliations");
  const auto& lin = std::get<LinearFoliation>(m.family());
  const auto fixed = index_list(n.mask());
  const IndexSet full_rows = (IndexSet{1} << n.n) - 1;
  const auto rest = index_list(full_rows & ~n.mask());
  Eigen::MatrixXd vq(q, k), vr(n.n - q, k);
  for (int i = 0; i < q; ++i)
    vq.row(i) = lin.directions.row(fixed[static_cast<std::size_t>(i)]);
  for (int i = 0; i < n.n - q; ++i)
    vr.row(i) = lin.directions.row(rest[static_cast<std::size_t>(i)]);

  // Leaf coordinates split as (I, J): V_Q restricted to I invertible, zero on J.
  for (IndexSet cols : lex_subsets(k, q)) {
    const auto ci = index_list(cols);
    const auto cj = index_list(((IndexSet{1} << k) - 1) & ~cols);
    bool zero_on_j = true;
    for (int c : cj)
      zero_on_j = zero_on_j && vq.col(c).cwiseAbs().maxCoeff() < 1e-12;
    Eigen::MatrixXd vqi(q, q), vri(n.n - q, q), vrj(n.n - q, k - q);
    for (int c = 0; c < q; ++c) {
      vqi.col(c) = vq.col(ci[static_cast<std::size_t>(c)]);
      vri.col(c) = vr.col(ci[static_cast<std::size_t>(c)]);
    }
    for (int c = 0; c < k - q; ++c)
      vrj.col(c) = vr.col(cj[static_cast<std::size_t>(c)]);
    const double det = vqi.determinant();
    if (!zero_on_j || std::abs(det) < 1e-12)
      continue;
    Eigen::MatrixXd unit = vqi;
    for (Eigen::Index c = 0; c < unit.cols(); ++c)
      unit.col(c).normalize();
    if (Eigen::JacobiSVD<Eigen::MatrixXd>(unit).singularValues()[q - 1] < tangency_threshold)
      throw RefusalError("leaves are tangent to N");
    double components = std::abs(det);
    for (int c : ci)
      components *= lin.periods[static_cast<std::size_t>(c)];
    if (std::abs(components - 1.0) > 1e-9)
      throw InputError("each leaf meets N in " + std::to_string(components) +
                       " components; a single component is required");
    Eigen::VectorXd cq(q), oq(q), wq(q), orr(n.n - q), wr(n.n - q);
    for (int i = 0; i < q; ++i) {
      cq[i] = n.values[static_cast<std::size_t>(std::find(n.fixed.begin(), n.fixed.end(),
                                                          fixed[static_cast<std::size_t>(i)]) -
                                                n.fixed.begin())];
      oq[i] = lin.offset[fixed[static_cast<std::size_t>(i)]];
      wq[i] = lin.transversal_dir[fixed[static_cast<std::size_t>(i)]];
    }
    for (int i = 0; i < n.n - q; ++i) {
      orr[i] = lin.offset[rest[static_cast<std::size_t>(i)]];
      wr[i] = lin.transversal_dir[rest[static_cast<std::size_t>(i)]];
    }
    const Eigen::MatrixXd mm = vri * vqi.inverse();
    std::vector<double> periods;
    for (int c : cj)
      periods.push_back(lin.periods[static_cast<std::size_t>(c)]);
    LinearFoliation induced{vrj, wr - mm * wq, orr + mm * (cq - oq), periods};
    const int orientation = m.orientation() * shuffle_sign(cols, ((IndexSet{1} << k) - 1) & ~cols);
    out.model = SolenoidModel(Ambient{AmbientKind::torus, n.n - q}, std::move(induced), m.transversal(),
                              orientation);
    return out;
  }
  throw InputError("preimage of N is not spanned by leaf coordinate directions");
}

HomologyClass restrict_dual(const HomologyClass& c, const Subtorus& n)
{
  n.check();
  const int q = n.codim();
  if (c.n != n.n || c.k < q)
    throw DegreeError("class degree is below the codimension of N");
  const IndexSet qmask = n.mask();
  const auto rest = index_list(((IndexSet{1} << n.n) - 1) & ~qmask);
  HomologyClass out;
  out.n = n.n - q;
  out.k = c.k - q;
  const auto basis = lex_subsets(out.n, out.k);
  out.coeffs.resize(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t b = 0; b < basis.size(); ++b) {
    std::vector<int> j;
    for (int i : index_list(basis[b]))
      j.push_back(rest[static_cast<std::size_t>(i)]);
    const IndexSet jmask = index_from_list(j);
    out.coeffs[static_cast<Eigen::Index>(b)] = shuffle_sign(qmask, jmask) * c[qmask | jmask];
  }
  return out;
}

std::vector<CurrentResult> pairing_via_thom(const SolenoidModel& m, const Subtorus& n,
                                            const std::vector<double>& widths, const QuadratureSpec& quad)
{
  if (m.leaf_dim() != n.codim())
    throw DegreeError("Thom pairing needs leaf dimension equal to the codimension of N");
  std::vector<CurrentResult> out;
  for (double w : widths)
    out.push_back(evaluate_current_report(m, thom_form(n, w).form, quad));
  return out;
}

} // namespace sol
