#include "solenoid/intersection.hpp"

#include "solenoid/core.hpp"
#include "solenoid/detail/solve.hpp"

#include <cmath>

namespace sol {

IntersectionIndex intersection_index(const Eigen::MatrixXd& frame1, const Eigen::MatrixXd& frame2, double threshold)
{
  if (frame1.rows() != frame2.rows() || frame1.cols() + frame2.cols() != frame1.rows())
    throw DegreeError("intersection index needs frames of complementary dimension");
  Eigen::MatrixXd f(frame1.rows(), frame1.rows());
  f << frame1, frame2;
  for (Eigen::Index c = 0; c < f.cols(); ++c)
    f.col(c).normalize();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(f);
  IntersectionIndex r;
  r.margin = svd.singularValues()[f.cols() - 1];
  if (r.margin >= threshold)
    r.sign = f.determinant() > 0.0 ? 1 : -1;
  return r;
}

namespace detail {

LeafWindow default_window(const SolenoidModel& m)
{
  const LeafDomain d = m.fundamental_domain();
  return {d.lo, d.hi};
}

int fixed_axis(const SolenoidModel& m)
{
  if (!m.is_linear() || m.leaf_dim() != m.ambient().n - 1)
    return -1;
  const auto& lin = std::get<LinearFoliation>(m.family());
  int axis = -1;
  for (Eigen::Index r = 0; r < lin.directions.rows(); ++r)
    if (lin.directions.row(r).cwiseAbs().maxCoeff() == 0.0)
      axis = static_cast<int>(r);
  if (axis < 0)
    return -1;
  for (Eigen::Index c = 0; c < lin.directions.cols(); ++c)
    if (std::abs(lin.directions.col(c).cwiseAbs().maxCoeff() - 1.0) > 1e-15)
      return -1;
  return axis;
}

Eigen::VectorXd linear_base(const SolenoidModel& m, const LeafRef& leaf)
{
  const auto& lin = std::get<LinearFoliation>(m.family());
  return lin.offset + leaf.y * lin.transversal_dir;
}

namespace {

struct LinearSystem {
  Eigen::MatrixXd inv; // (t1, t2) = inv (b + m)
  Eigen::VectorXd b;
  std::vector<double> lo, hi;
};

std::optional<LinearSystem> linear_system(const SolenoidModel& m1, const LeafRef& leaf1, const LeafWindow& w1,
                                          const SolenoidModel& m2, const LeafRef& leaf2, const LeafWindow& w2)
{
  const auto& l1 = std::get<LinearFoliation>(m1.family());
  const auto& l2 = std::get<LinearFoliation>(m2.family());
  const Eigen::Index n = l1.directions.rows();
  Eigen::MatrixXd a(n, n);
  a << l1.directions, -l2.directions;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  if (svd.singularValues()[n - 1] < 1e-12)
    return std::nullopt;
  LinearSystem s;
  s.inv = a.inverse();
  s.b = linear_base(m2, leaf2) - linear_base(m1, leaf1);
  s.lo = w1.lo;
  s.lo.insert(s.lo.end(), w2.lo.begin(), w2.lo.end());
  s.hi = w1.hi;
  s.hi.insert(s.hi.end(), w2.hi.begin(), w2.hi.end());
  return s;
}

bool in_box(const Eigen::VectorXd& s, const std::vector<double>& lo, const std::vector<double>& hi)
{
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (!(s[i] >= lo[static_cast<std::size_t>(i)] && s[i] < hi[static_cast<std::size_t>(i)]))
      return false;
  return true;
}

// Range of m = A s - b over the corners of the window box.
std::pair<Eigen::VectorXd, Eigen::VectorXd> lattice_range(const LinearSystem& s)
{
  const Eigen::MatrixXd a = s.inv.inverse();
  const auto n = static_cast<Eigen::Index>(s.lo.size());
  Eigen::VectorXd mn = Eigen::VectorXd::Constant(n, INFINITY), mx = Eigen::VectorXd::Constant(n, -INFINITY);
  for (unsigned corner = 0; corner < (1u << n); ++corner) {
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i)
      c[i] = (corner >> i) & 1u ? s.hi[static_cast<std::size_t>(i)] : s.lo[static_cast<std::size_t>(i)];
    const Eigen::VectorXd m = a * c - s.b;
    mn = mn.cwiseMin(m);
    mx = mx.cwiseMax(m);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    mn[i] = std::floor(mn[i]) - 1.0;
    mx[i] = std::ceil(mx[i]) + 1.0;
  }
  return {mn, mx};
}

// Integer interval of m1 with lo <= r + c m1 < hi for each row.
bool m1_interval(const Eigen::VectorXd& r, const Eigen::VectorXd& c, const LinearSystem& s, double& a, double& b)
{
  a = -INFINITY;
  b = INFINITY;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double lo = s.lo[static_cast<std::size_t>(i)], hi = s.hi[static_cast<std::size_t>(i)];
    if (c[i] == 0.0) {
      if (!(r[i] >= lo && r[i] < hi))
        return false;
      continue;
    }
    double x = (lo - r[i]) / c[i], y = (hi - r[i]) / c[i];
    if (x > y)
      std::swap(x, y);
    a = std::max(a, x);
    b = std::min(b, y);
  }
  return a <= b;
}

template <class Fn>
void enumerate_lattice(const LinearSystem& s, bool torus, Fn&& fn)
{
  const auto n = static_cast<Eigen::Index>(s.lo.size());
  const Eigen::VectorXd s0 = s.inv * s.b;
  if (!torus) {
    if (in_box(s0, s.lo, s.hi))
      fn(s0);
    return;
  }
  const auto [mn, mx] = lattice_range(s);
  if (n == 2) {
    for (double m0 = mn[0]; m0 <= mx[0]; m0 += 1.0) {
      const Eigen::VectorXd r = s0 + s.inv.col(0) * m0;
      double a, b;
      if (!m1_interval(r, s.inv.col(1), s, a, b))
        continue;
      for (double m1 = std::ceil(a) - 1.0; m1 <= std::floor(b) + 1.0; m1 += 1.0) {
        const Eigen::VectorXd x = r + s.inv.col(1) * m1;
        if (in_box(x, s.lo, s.hi))
          fn(x);
      }
    }
    return;
  }
  Eigen::VectorXd m = mn;
  while (true) {
    const Eigen::VectorXd x = s0 + s.inv * m;
    if (in_box(x, s.lo, s.hi))
      fn(x);
    Eigen::Index i = 0;
    for (; i < n; ++i) {
      if (m[i] < mx[i]) {
        m[i] += 1.0;
        break;
      }
      m[i] = mn[i];
    }
    if (i == n)
      break;
  }
}

} // namespace

bool linear_pair(const SolenoidModel& m1, const LeafRef& leaf1, const LeafWindow& w1, const SolenoidModel& m2,
                 const LeafRef& leaf2, const LeafWindow& w2, const std::function<void(const Eigen::VectorXd&)>& fn)
{
  const auto sys = linear_system(m1, leaf1, w1, m2, leaf2, w2);
  if (!sys)
    return false;
  enumerate_lattice(*sys, m1.ambient().torus(), fn);
  return true;
}

double linear_pair_count(const SolenoidModel& m1, const LeafRef& leaf1, const LeafWindow& w1,
                         const SolenoidModel& m2, const LeafRef& leaf2, const LeafWindow& w2)
{
  const auto sys = linear_system(m1, leaf1, w1, m2, leaf2, w2);
  if (!sys)
    return 0.0;
  if (!m1.ambient().torus() || sys->lo.size() != 2) {
    double count = 0.0;
    enumerate_lattice(*sys, m1.ambient().torus(), [&](const Eigen::VectorXd&) { count += 1.0; });
    return count;
  }
  const Eigen::VectorXd s0 = sys->inv * sys->b;
  const auto [mn, mx] = lattice_range(*sys);
  double count = 0.0;
  for (double m0 = mn[0]; m0 <= mx[0]; m0 += 1.0) {
    const Eigen::VectorXd r = s0 + sys->inv.col(0) * m0;
    double a, b;
    if (!m1_interval(r, sys->inv.col(1), *sys, a, b))
      continue;
    // Half-open rows: m1 in [a, b) up to the orientation of each row.
    const double first = std::ceil(a), last = std::ceil(b) - 1.0;
    if (last >= first)
      count += last - first + 1.0;
  }
  return count;
}

// ---------------------------------------------------------------------------

AxisPath::AxisPath(const SolenoidModel& m, const LeafRef& leaf, double lo, double hi, int axis, int grid)
    : m_(&m), leaf_(leaf), axis_(axis), torus_(m.ambient().torus())
{
  if (m.leaf_dim() != 1)
    throw InputError("axis root finding needs 1-dimensional leaves");
  const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) * grid)));
  step_ = (hi - lo) / static_cast<double>(cells);
  std::vector<double> ts(cells + 1), ds(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    ts[i] = i == cells ? hi : lo + static_cast<double>(i) * step_;
    ds[i] = slope(ts[i]);
  }
  for (std::size_t i = 0; i <= cells; ++i) {
    const bool flat_turn = ds[i] == 0.0 && i > 0 && i < cells && ds[i - 1] * ds[i + 1] < 0.0;
    nodes_.push_back({ts[i], value(ts[i]), flat_turn});
    if (i < cells && ds[i] * ds[i + 1] < 0.0) {
      double a = ts[i], b = ts[i + 1];
      const double sa = ds[i];
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double mid = 0.5 * (a + b);
        (slope(mid) * sa > 0.0 ? a : b) = mid;
      }
      const double t = 0.5 * (a + b);
      nodes_.push_back({t, value(t), true});
    }
  }
  std::size_t start = 0;
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (nodes_[i].extremum || i + 1 == nodes_.size()) {
      runs_.emplace_back(start, i);
      start = i;
    }
}

double AxisPath::value(double t) const
{
  return m_->lift(leaf_, vec1(t))[axis_];
}

double AxisPath::slope(double t) const
{
  return m_->leaf_jacobian(leaf_, vec1(t))(axis_, 0);
}

double AxisPath::refine_root(double a, double b, double level) const
{
  double fa = value(a) - level;
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = value(mid) - level;
    if (fm == 0.0)
      return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

std::vector<AxisPath::Root> AxisPath::roots(double level) const
{
  std::vector<Root> out;
  std::vector<double> tangent;
  // Extrema touching a level are double roots.
  for (const auto& nd : nodes_) {
    if (!nd.extremum)
      continue;
    const double gap = torus_ ? wrap_centered(nd.v - level) : nd.v - level;
    if (std::abs(gap) < 1e-9) {
      out.push_back({nd.t, true});
      tangent.push_back(nd.t);
    }
  }
  for (const auto& [i0, i1] : runs_) {
    const double vs = nodes_[i0].v, ve = nodes_[i1].v;
    const bool up = ve >= vs;
    const double lo = std::min(vs, ve), hi = std::max(vs, ve);
    double m0 = 0.0, m1 = 0.0;
    if (torus_) {
      m0 = std::floor(lo - level) - 1.0;
      m1 = std::ceil(hi - level) + 1.0;
    }
    for (double m = m0; m <= m1; m += 1.0) {
      const double target = level + m;
      // Half-open in t: the run owns its start node, not its end node.
      const bool inside = up ? (target >= vs && target < ve) : (target <= vs && target > ve);
      if (!inside && !(vs == ve && target == vs))
        continue;
      std::size_t a = i0, b = i1;
      while (b - a > 1) {
        const std::size_t mid = (a + b) / 2;
        const bool below = up ? nodes_[mid].v <= target : nodes_[mid].v >= target;
        (below ? a : b) = mid;
      }
      const double t = nodes_[a].v == target ? nodes_[a].t : refine_root(nodes_[a].t, nodes_[b].t, target);
      bool near_tangent = false;
      for (double tt : tangent)
        near_tangent = near_tangent || std::abs(t - tt) < step_;
      if (!near_tangent)
        out.push_back({t, false});
    }
  }
  std::sort(out.begin(), out.end(), [](const Root& x, const Root& y) { return x.t < y.t; });
  return out;
}

bool AxisPath::isolated(double t) const
{
  for (int k = 1; k <= 8; ++k) {
    const double h = step_ * k / 8.0;
    if (std::abs(slope(t - h)) <= 1e-14 || std::abs(slope(t + h)) <= 1e-14)
      return false;
  }
  return true;
}

std::vector<Eigen::VectorXd> axis_leaf_params(const SolenoidModel& m, const LeafRef& leaf, const Eigen::VectorXd& p,
                                              const LeafWindow& w)
{
  const auto& lin = std::get<LinearFoliation>(m.family());
  const Eigen::VectorXd t0 = lin.directions.transpose() * (p - linear_base(m, leaf));
  const auto k = static_cast<std::size_t>(t0.size());
  std::vector<std::vector<double>> choices(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double x = t0[static_cast<Eigen::Index>(i)];
    if (!m.ambient().torus()) {
      if (x >= w.lo[i] && x < w.hi[i])
        choices[i].push_back(x);
      continue;
    }
    const double period = lin.periods[i];
    for (double v = w.lo[i] + (x - w.lo[i]) - period * std::floor((x - w.lo[i]) / period); v < w.hi[i]; v += period)
      choices[i].push_back(v);
  }
  std::vector<Eigen::VectorXd> out;
  std::vector<std::size_t> idx(k, 0);
  for (const auto& c : choices)
    if (c.empty())
      return out;
  while (true) {
    Eigen::VectorXd t(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i)
      t[static_cast<Eigen::Index>(i)] = choices[i][idx[i]];
    out.push_back(t);
    std::size_t i = 0;
    for (; i < k; ++i) {
      if (++idx[i] < choices[i].size())
        break;
      idx[i] = 0;
    }
    if (i == k)
      break;
  }
  return out;
}

IntersectionRecord make_record(const SolenoidModel& m1, const LeafRef& leaf1, const Eigen::VectorXd& t1,
                               const SolenoidModel& m2, const LeafRef& leaf2, const Eigen::VectorXd& t2,
                               double threshold)
{
  IntersectionRecord r;
  r.point = m1.leaf_point(leaf1, t1);
  r.leaf1 = leaf1;
  r.t1 = t1;
  r.leaf2 = leaf2;
  r.t2 = t2;
  const IntersectionIndex ix = intersection_index(m1.leaf_frame(leaf1, t1), m2.leaf_frame(leaf2, t2), threshold);
  r.index = ix.sign;
  r.margin = ix.margin;
  r.transversal = ix.sign != 0;
  r.mass = m1.transversal().mass(leaf1.addr) * m2.transversal().mass(leaf2.addr);
  return r;
}

namespace {

enum class Method { lattice, axis, axis_swapped };

Method pick_method(const SolenoidModel& m1, const SolenoidModel& m2)
{
  if (m1.is_linear() && m2.is_linear())
    return Method::lattice;
  if (m1.leaf_dim() == 1 && fixed_axis(m2) >= 0)
    return Method::axis;
  if (m2.leaf_dim() == 1 && fixed_axis(m1) >= 0)
    return Method::axis_swapped;
  throw InputError("no intersection solver for this pair: one model must be a linear foliation by coordinate "
                   "subtori or both must be linear");
}

// Roots of a sampled 1-leaf of `curve` against the axis leaves `flats`.
std::vector<IntersectionRecord> axis_roots(const SolenoidModel& curve, const LeafRef& cleaf, const LeafWindow& cw,
                                           const AxisPath& path, const SolenoidModel& flat, const LeafRef& fleaf,
                                           const LeafWindow& fw, bool swapped, double threshold)
{
  const int axis = fixed_axis(flat);
  const double level = linear_base(flat, fleaf)[axis];
  std::vector<IntersectionRecord> out;
  (void)cw;
  for (const auto& root : path.roots(level)) {
    const Eigen::VectorXd tc = vec1(root.t);
    Eigen::VectorXd p = curve.lift(cleaf, tc);
    for (const auto& tf : axis_leaf_params(flat, fleaf, p, fw)) {
      IntersectionRecord r = swapped ? make_record(flat, fleaf, tf, curve, cleaf, tc, threshold)
                                     : make_record(curve, cleaf, tc, flat, fleaf, tf, threshold);
      if (root.double_root) {
        r.index = 0;
        r.transversal = false;
      }
      if (!r.transversal && !path.isolated(root.t))
        throw RefusalError("tangency at address '" + cleaf.addr.str() + "' parameter " + std::to_string(root.t) +
                           " is not leafwise isolated");
      out.push_back(std::move(r));
    }
  }
  return out;
}

void check_pair(const SolenoidModel& m1, const SolenoidModel& m2)
{
  if (m1.ambient().n != m2.ambient().n || m1.ambient().kind != m2.ambient().kind)
    throw InputError("models live in different ambient manifolds");
  if (m1.leaf_dim() + m2.leaf_dim() != m1.ambient().n)
    throw DegreeError("intersection points need complementary leaf dimensions");
}

std::vector<Address> live_cylinders(const SolenoidModel& m, int depth)
{
  if (depth < 0)
    throw InputError("depth must be nonnegative");
  depth = std::min(depth, m.transversal().depth());
  std::vector<Address> out;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << depth); ++i) {
    const Address a = Address::from_index(i, depth);
    if (m.transversal().mass(a) > 0.0)
      out.push_back(a);
  }
  return out;
}

} // namespace

std::vector<IntersectionRecord> solve_leaf_pair(const SolenoidModel& m1, const LeafRef& leaf1, const LeafWindow& w1,
                                                const SolenoidModel& m2, const LeafRef& leaf2, const LeafWindow& w2,
                                                const IntersectionOptions& opts)
{
  check_pair(m1, m2);
  std::vector<IntersectionRecord> out;
  switch (pick_method(m1, m2)) {
  case Method::lattice:
    linear_pair(m1, leaf1, w1, m2, leaf2, w2, [&](const Eigen::VectorXd& s) {
      const Eigen::Index k1 = m1.leaf_dim();
      out.push_back(make_record(m1, leaf1, s.head(k1), m2, leaf2, s.tail(s.size() - k1), opts.threshold));
    });
    break;
  case Method::axis: {
    const AxisPath path(m1, leaf1, w1.lo[0], w1.hi[0], fixed_axis(m2), opts.grid);
    out = axis_roots(m1, leaf1, w1, path, m2, leaf2, w2, false, opts.threshold);
    break;
  }
  case Method::axis_swapped: {
    const AxisPath path(m2, leaf2, w2.lo[0], w2.hi[0], fixed_axis(m1), opts.grid);
    out = axis_roots(m2, leaf2, w2, path, m1, leaf1, w1, true, opts.threshold);
    break;
  }
  }
  return out;
}

} // namespace detail

std::vector<IntersectionRecord> intersection_points(const SolenoidModel& m1, const SolenoidModel& m2, int depth,
                                                    const IntersectionOptions& opts)
{
  using namespace detail;
  check_pair(m1, m2);
  const LeafWindow w1 = opts.window1.value_or(default_window(m1));
  const LeafWindow w2 = opts.window2.value_or(default_window(m2));
  const auto c1 = live_cylinders(m1, depth), c2 = live_cylinders(m2, depth);
  const Method method = pick_method(m1, m2);
  const bool swapped = method == Method::axis_swapped;
  // The outer loop runs over the leaves that need sampling.
  const auto& outer = swapped ? c2 : c1;
  const auto& inner = swapped ? c1 : c2;
  auto parts = parallel_map(outer.size(), [&](std::size_t i) {
    std::vector<IntersectionRecord> recs;
    if (method == Method::lattice) {
      const LeafRef l1 = m1.leaf(outer[i]);
      for (const Address& a2 : inner) {
        auto r = solve_leaf_pair(m1, l1, w1, m2, m2.leaf(a2), w2, opts);
        recs.insert(recs.end(), r.begin(), r.end());
      }
      return recs;
    }
    const SolenoidModel& curve = swapped ? m2 : m1;
    const SolenoidModel& flat = swapped ? m1 : m2;
    const LeafWindow& cw = swapped ? w2 : w1;
    const LeafWindow& fw = swapped ? w1 : w2;
    const LeafRef cl = curve.leaf(outer[i]);
    const AxisPath path(curve, cl, cw.lo[0], cw.hi[0], fixed_axis(flat), opts.grid);
    for (const Address& a : inner) {
      auto r = axis_roots(curve, cl, cw, path, flat, flat.leaf(a), fw, swapped, opts.threshold);
      recs.insert(recs.end(), r.begin(), r.end());
    }
    return recs;
  });
  std::vector<IntersectionRecord> out;
  for (auto& p : parts)
    out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  if (swapped)
    std::stable_sort(out.begin(), out.end(), [](const IntersectionRecord& a, const IntersectionRecord& b) {
      return a.leaf1.addr < b.leaf1.addr;
    });
  return out;
}

} // namespace sol
