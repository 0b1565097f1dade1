#include "solenoid/model.hpp"

#include "solenoid/core.hpp"

#include <cmath>

namespace sol {

Eigen::VectorXd Ambient::reduce(Eigen::VectorXd p) const
{
  if (torus())
    for (Eigen::Index i = 0; i < p.size(); ++i)
      p[i] = wrap_unit(p[i]);
  return p;
}

double Ambient::distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const
{
  Eigen::VectorXd d = a - b;
  if (torus())
    for (Eigen::Index i = 0; i < d.size(); ++i)
      d[i] = wrap_centered(d[i]);
  return d.norm();
}

// ---------------------------------------------------------------------------

Profile Profile::cosine_well(double amplitude, double base)
{
  Profile p;
  p.kind = Kind::trig;
  p.trig = {{0, base + amplitude, 0.0}, {1, -amplitude, 0.0}};
  return p;
}

Profile Profile::polynomial(std::vector<double> coeffs)
{
  Profile p;
  p.kind = Kind::polynomial;
  p.poly = std::move(coeffs);
  return p;
}

double Profile::value(double x) const
{
  double s = 0.0;
  if (kind == Kind::trig) {
    for (const auto& [k, a, b] : trig)
      s += a * std::cos(two_pi * k * x) + b * std::sin(two_pi * k * x);
  } else {
    for (auto it = poly.rbegin(); it != poly.rend(); ++it)
      s = s * x + *it;
  }
  return s;
}

double Profile::derivative(double x) const
{
  double s = 0.0;
  if (kind == Kind::trig) {
    for (const auto& [k, a, b] : trig)
      s += two_pi * k * (-a * std::sin(two_pi * k * x) + b * std::cos(two_pi * k * x));
  } else {
    for (std::size_t i = poly.size(); i-- > 1;)
      s = s * x + static_cast<double>(i) * poly[i];
  }
  return s;
}

double Profile::second_derivative(double x) const
{
  double s = 0.0;
  if (kind == Kind::trig) {
    for (const auto& [k, a, b] : trig) {
      const double w = two_pi * k;
      s -= w * w * (a * std::cos(w * x) + b * std::sin(w * x));
    }
  } else {
    for (std::size_t i = poly.size(); i-- > 2;)
      s = s * x + static_cast<double>(i * (i - 1)) * poly[i];
  }
  return s;
}

// ---------------------------------------------------------------------------

PerturbationTerm PerturbationTerm::translation(Eigen::VectorXd v)
{
  PerturbationTerm t;
  t.kind = Kind::translation;
  t.vec = std::move(v);
  return t;
}

PerturbationTerm PerturbationTerm::wave_term(Eigen::VectorXd v, Eigen::VectorXd m, double phase)
{
  PerturbationTerm t;
  t.kind = Kind::wave;
  t.vec = std::move(v);
  t.wave = std::move(m);
  t.phase = phase;
  return t;
}

PerturbationTerm PerturbationTerm::shear(Eigen::VectorXd v, Eigen::VectorXd m)
{
  if (std::abs(v.dot(m)) > 1e-12)
    throw InputError("shear displacement must be orthogonal to its wave vector");
  return wave_term(std::move(v), std::move(m));
}

PerturbationTerm PerturbationTerm::bump(Eigen::VectorXd v, Eigen::VectorXd center, double radius)
{
  if (!(radius > 0.0 && radius <= 0.5))
    throw InputError("bump radius must lie in (0, 1/2]");
  PerturbationTerm t;
  t.kind = Kind::bump;
  t.vec = std::move(v);
  t.center = std::move(center);
  t.radius = radius;
  return t;
}

PerturbationTerm PerturbationTerm::leaf_bump(Eigen::VectorXd v, Address cylinder, double center, double half_width,
                                             double ramp)
{
  if (!(half_width >= 0.0) || !(ramp > 0.0))
    throw InputError("leaf bump needs a nonnegative plateau and a positive ramp");
  PerturbationTerm t;
  t.kind = Kind::leaf_bump;
  t.vec = std::move(v);
  t.cylinder = cylinder;
  t.leaf_center = center;
  t.half_width = half_width;
  t.ramp = ramp;
  return t;
}

namespace {

// sigma(s) = f(s) / (f(s) + f(1-s)), f(s) = exp(-1/s): smooth 0 -> 1 on [0,1].
double smooth_unit_step(double s)
{
  if (s <= 0.0)
    return 0.0;
  if (s >= 1.0)
    return 1.0;
  const double f = std::exp(-1.0 / s), g = std::exp(-1.0 / (1.0 - s));
  return f / (f + g);
}

double smooth_unit_step_derivative(double s)
{
  if (s <= 0.0 || s >= 1.0)
    return 0.0;
  const double f = std::exp(-1.0 / s), g = std::exp(-1.0 / (1.0 - s));
  const double fg = f * g;
  return (fg / (s * s) + fg / ((1.0 - s) * (1.0 - s))) / ((f + g) * (f + g));
}

double septic_step(double u)
{
  if (u <= 0.0)
    return 0.0;
  if (u >= 1.0)
    return 1.0;
  const double u4 = u * u * u * u;
  return u4 * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u);
}

double septic_step_derivative(double u)
{
  if (u <= 0.0 || u >= 1.0)
    return 0.0;
  const double v = u * (1.0 - u);
  return 140.0 * v * v * v;
}

double ambient_bump(double r)
{
  return r < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
}

double ambient_bump_derivative(double r)
{
  if (r >= 1.0)
    return 0.0;
  const double q = 1.0 - r * r;
  return ambient_bump(r) * (-2.0 * r / (q * q));
}

Address return_power(const ReturnMap& h, Address a, long long j)
{
  if (j == 0 || h.kind() == ReturnMap::Kind::identity)
    return a;
  if (h.kind() == ReturnMap::Kind::odometer) {
    const std::uint64_t mask = a.depth == 0 ? 0 : (~std::uint64_t{0} >> (64 - a.depth));
    return {(a.bits + static_cast<std::uint64_t>(j)) & mask, a.depth};
  }
  for (long long i = 0; i < j; ++i)
    a = h.apply(a);
  for (long long i = 0; i > j; --i)
    a = h.inverse(a);
  return a;
}

} // namespace

double plateau(double u, double w, double r)
{
  const double x = std::abs(u);
  if (x <= w)
    return 1.0;
  if (x >= w + r)
    return 0.0;
  return smooth_unit_step(1.0 - (x - w) / r);
}

double plateau_derivative(double u, double w, double r)
{
  const double x = std::abs(u);
  if (x <= w || x >= w + r)
    return 0.0;
  const double sgn = u < 0.0 ? -1.0 : 1.0;
  return -sgn / r * smooth_unit_step_derivative(1.0 - (x - w) / r);
}

// ---------------------------------------------------------------------------

SolenoidModel::SolenoidModel(Ambient ambient, Family family, CantorTransversal transversal, int orientation)
    : ambient_(ambient), family_(std::move(family)), transversal_(std::move(transversal)),
      orientation_(orientation >= 0 ? 1 : -1)
{
  if (ambient_.n < 1)
    throw ConstructionError("ambient dimension must be positive");
  if (const auto* lin = std::get_if<LinearFoliation>(&family_)) {
    const auto n = static_cast<Eigen::Index>(ambient_.n);
    const Eigen::Index k = lin->directions.cols();
    if (lin->directions.rows() != n || k < 1 || k > n)
      throw ConstructionError("direction matrix must be n x k with 1 <= k <= n");
    if (lin->transversal_dir.size() != n || lin->offset.size() != n)
      throw ConstructionError("transversal direction and offset must have ambient dimension");
    const Eigen::MatrixXd gram = lin->directions.transpose() * lin->directions;
    if ((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-9)
      throw ConstructionError("leaf directions must have orthonormal columns");
    if (static_cast<Eigen::Index>(lin->periods.size()) != k)
      throw ConstructionError("one leaf-domain period is needed per leaf dimension");
    for (double p : lin->periods)
      if (!(p > 0.0))
        throw ConstructionError("leaf-domain periods must be positive");
  } else {
    if (ambient_.n != 2)
      throw ConstructionError("suspension and graph solenoids live in a 2-dimensional ambient");
    if (const auto* s = std::get_if<CantorSuspension>(&family_)) {
      if (!ambient_.torus())
        throw ConstructionError("suspensions are immersed in the torus");
      if (!(s->transition_start >= 0.0 && s->transition_start < 1.0))
        throw ConstructionError("suspension transition must start in [0,1)");
    }
    if (const auto* g = std::get_if<GraphSolenoid>(&family_)) {
      if (!(g->x_max > g->x_min))
        throw ConstructionError("graph solenoid window is empty");
    }
  }
}

SolenoidModel SolenoidModel::linear(Ambient ambient, Eigen::MatrixXd directions, Eigen::VectorXd transversal_dir,
                                    Eigen::VectorXd offset, CantorTransversal k, std::vector<double> periods)
{
  if (periods.empty()) {
    if (directions.cols() != 1 || ambient.n != 2)
      throw ConstructionError("leaf-domain periods are required unless k = 1 and n = 2");
    const double det = directions(0, 0) * transversal_dir[1] - directions(1, 0) * transversal_dir[0];
    if (std::abs(det) < 1e-12)
      throw ConstructionError("transversal direction is parallel to the leaves");
    periods = {1.0 / std::abs(det)};
  }
  LinearFoliation lin{std::move(directions), std::move(transversal_dir), std::move(offset), std::move(periods)};
  return SolenoidModel(ambient, std::move(lin), std::move(k));
}

SolenoidModel SolenoidModel::kronecker(double slope, int depth, double x_offset)
{
  const double norm = std::sqrt(1.0 + slope * slope);
  CantorSpec spec;
  spec.construction = Construction::interval;
  spec.measure = MeasureKind::lebesgue;
  spec.depth = depth;
  // Product measure |det(u, e2)| dy dt is Lebesgue on T^2.
  spec.total_mass = 1.0 / norm;
  Eigen::MatrixXd u(2, 1);
  u << 1.0 / norm, slope / norm;
  return linear(Ambient{}, u, Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(x_offset, 0.0),
                CantorTransversal::build(spec));
}

SolenoidModel SolenoidModel::horizontal_circles(CantorTransversal k)
{
  Eigen::MatrixXd u(2, 1);
  u << 1.0, 0.0;
  return linear(Ambient{}, u, Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.0, 0.0), std::move(k), {1.0});
}

SolenoidModel SolenoidModel::vertical_circle(double c)
{
  CantorSpec spec;
  spec.depth = 0;
  Eigen::MatrixXd u(2, 1);
  u << 0.0, 1.0;
  // The single depth-0 cylinder sits at its midpoint 1/2.
  return linear(Ambient{}, u, Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(c - 0.5, 0.0),
                CantorTransversal::build(spec), {1.0});
}

int SolenoidModel::leaf_dim() const
{
  if (const auto* lin = std::get_if<LinearFoliation>(&family_))
    return static_cast<int>(lin->directions.cols());
  return 1;
}

SolenoidModel SolenoidModel::with_perturbation(std::vector<PerturbationTerm> terms, double scale) const
{
  for (const auto& t : terms) {
    if (t.vec.size() != ambient_.n)
      throw InputError("perturbation displacement must have ambient dimension");
    if (t.kind == PerturbationTerm::Kind::wave && t.wave.size() != ambient_.n)
      throw InputError("wave vector must have ambient dimension");
    if (t.kind == PerturbationTerm::Kind::bump && t.center.size() != ambient_.n)
      throw InputError("bump center must have ambient dimension");
    if (t.kind == PerturbationTerm::Kind::leaf_bump && leaf_dim() != 1)
      throw InputError("leaf bumps are defined on 1-dimensional leaves");
  }
  SolenoidModel out = *this;
  out.perturbation_ = std::move(terms);
  out.perturbation_scale_ = scale;
  return out;
}

SolenoidModel SolenoidModel::with_scale(double scale) const
{
  SolenoidModel out = *this;
  out.perturbation_scale_ = scale;
  return out;
}

SolenoidModel SolenoidModel::with_transversal(CantorTransversal k) const
{
  SolenoidModel out = *this;
  out.transversal_ = std::move(k);
  return out;
}

SolenoidModel SolenoidModel::with_orientation(int o) const
{
  SolenoidModel out = *this;
  out.orientation_ = o >= 0 ? 1 : -1;
  return out;
}

SolenoidModel SolenoidModel::with_mass_scale(double lambda) const
{
  CantorSpec spec = transversal_.spec();
  spec.total_mass *= lambda;
  for (auto& [k, v] : spec.masses)
    v *= lambda;
  return with_transversal(CantorTransversal::build(spec));
}

Eigen::VectorXd SolenoidModel::base_point(const LeafRef& leaf, const Eigen::VectorXd& t) const
{
  if (t.size() != leaf_dim())
    throw InputError("leaf parameter has wrong dimension");
  if (const auto* lin = std::get_if<LinearFoliation>(&family_))
    return lin->offset + lin->directions * t + leaf.y * lin->transversal_dir;
  if (const auto* s = std::get_if<CantorSuspension>(&family_)) {
    const double j = std::floor(t[0]);
    const double frac = t[0] - j;
    const Address here = return_power(s->return_map, leaf.addr, static_cast<long long>(j));
    const double start = j == 0.0 ? leaf.y : transversal_.midpoint(here);
    const double end = transversal_.midpoint(s->return_map.apply(here));
    const double u = (frac - s->transition_start) / (1.0 - s->transition_start);
    return Eigen::Vector2d(t[0], start + septic_step(u) * (end - start));
  }
  const auto& g = std::get<GraphSolenoid>(family_);
  return Eigen::Vector2d(t[0], g.profile.value(t[0]) + leaf.y);
}

Eigen::MatrixXd SolenoidModel::base_jacobian(const LeafRef& leaf, const Eigen::VectorXd& t) const
{
  if (const auto* lin = std::get_if<LinearFoliation>(&family_))
    return lin->directions;
  Eigen::MatrixXd j(2, 1);
  if (const auto* s = std::get_if<CantorSuspension>(&family_)) {
    const double jc = std::floor(t[0]);
    const double frac = t[0] - jc;
    const Address here = return_power(s->return_map, leaf.addr, static_cast<long long>(jc));
    const double start = jc == 0.0 ? leaf.y : transversal_.midpoint(here);
    const double end = transversal_.midpoint(s->return_map.apply(here));
    const double span = 1.0 - s->transition_start;
    const double u = (frac - s->transition_start) / span;
    j << 1.0, septic_step_derivative(u) * (end - start) / span;
    return j;
  }
  const auto& g = std::get<GraphSolenoid>(family_);
  j << 1.0, g.profile.derivative(t[0]);
  return j;
}

namespace {

double leaf_offset(const SolenoidModel& m, double t, double center)
{
  double u = t - center;
  if (m.closed_leaves()) {
    const LeafDomain d = m.fundamental_domain();
    const double period = d.hi[0] - d.lo[0];
    u -= period * std::round(u / period);
  }
  return u;
}

} // namespace

Eigen::VectorXd SolenoidModel::lift(const LeafRef& leaf, const Eigen::VectorXd& t) const
{
  const Eigen::VectorXd base = base_point(leaf, t);
  if (perturbation_.empty() || perturbation_scale_ == 0.0)
    return base;
  Eigen::VectorXd p = base;
  for (const auto& term : perturbation_) {
    switch (term.kind) {
    case PerturbationTerm::Kind::translation:
      p += perturbation_scale_ * term.vec;
      break;
    case PerturbationTerm::Kind::wave:
      p += perturbation_scale_ * std::sin(two_pi * term.wave.dot(base) + term.phase) * term.vec;
      break;
    case PerturbationTerm::Kind::bump: {
      Eigen::VectorXd d = base - term.center;
      if (ambient_.torus())
        for (Eigen::Index i = 0; i < d.size(); ++i)
          d[i] = wrap_centered(d[i]);
      p += perturbation_scale_ * ambient_bump(d.norm() / term.radius) * term.vec;
      break;
    }
    case PerturbationTerm::Kind::leaf_bump:
      if (leaf.addr.has_prefix(term.cylinder))
        p += perturbation_scale_ * plateau(leaf_offset(*this, t[0], term.leaf_center), term.half_width, term.ramp) *
             term.vec;
      break;
    }
  }
  return p;
}

Eigen::VectorXd SolenoidModel::leaf_point(const LeafRef& leaf, const Eigen::VectorXd& t) const
{
  return ambient_.reduce(lift(leaf, t));
}

Eigen::MatrixXd SolenoidModel::leaf_jacobian(const LeafRef& leaf, const Eigen::VectorXd& t) const
{
  Eigen::MatrixXd j = base_jacobian(leaf, t);
  if (!perturbation_.empty() && perturbation_scale_ != 0.0) {
    const Eigen::VectorXd base = base_point(leaf, t);
    const Eigen::MatrixXd j0 = j;
    for (const auto& term : perturbation_) {
      switch (term.kind) {
      case PerturbationTerm::Kind::translation:
        break;
      case PerturbationTerm::Kind::wave: {
        const double c = two_pi * std::cos(two_pi * term.wave.dot(base) + term.phase);
        j += perturbation_scale_ * c * term.vec * (term.wave.transpose() * j0);
        break;
      }
      case PerturbationTerm::Kind::bump: {
        Eigen::VectorXd d = base - term.center;
        if (ambient_.torus())
          for (Eigen::Index i = 0; i < d.size(); ++i)
            d[i] = wrap_centered(d[i]);
        const double r = d.norm() / term.radius;
        if (r >= 1.0 || r == 0.0)
          break;
        const Eigen::RowVectorXd grad = ambient_bump_derivative(r) * d.transpose() / (d.norm() * term.radius);
        j += perturbation_scale_ * term.vec * (grad * j0);
        break;
      }
      case PerturbationTerm::Kind::leaf_bump:
        if (leaf.addr.has_prefix(term.cylinder))
          j.col(0) += perturbation_scale_ *
                      plateau_derivative(leaf_offset(*this, t[0], term.leaf_center), term.half_width, term.ramp) *
                      term.vec;
        break;
      }
    }
  }
  j.col(0) *= orientation_;
  return j;
}

Eigen::MatrixXd SolenoidModel::leaf_frame(const LeafRef& leaf, const Eigen::VectorXd& t) const
{
  Eigen::MatrixXd j = leaf_jacobian(leaf, t);
  if (j.cols() == 1) {
    const double nrm = j.col(0).norm();
    if (!(nrm > 1e-12))
      throw ImmersionError("leafwise differential vanishes at address '" + leaf.addr.str() + "'");
    return j / nrm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  const auto& s = svd.singularValues();
  if (!(s[s.size() - 1] > 1e-9 * std::max(1.0, s[0])))
    throw ImmersionError("leafwise differential is rank deficient at address '" + leaf.addr.str() + "'");
  for (Eigen::Index c = 0; c < j.cols(); ++c)
    j.col(c).normalize();
  return j;
}

LeafDomain SolenoidModel::fundamental_domain(double chart_offset) const
{
  LeafDomain d;
  d.periodic = closed_leaves();
  if (const auto* lin = std::get_if<LinearFoliation>(&family_)) {
    for (double p : lin->periods) {
      d.lo.push_back(chart_offset);
      d.hi.push_back(chart_offset + p);
    }
    return d;
  }
  if (const auto* s = std::get_if<CantorSuspension>(&family_)) {
    d.lo = {chart_offset};
    d.hi = {chart_offset + 1.0};
    for (double j = std::floor(chart_offset) - 1.0; j <= chart_offset + 2.0; j += 1.0)
      for (int i = 0; i < 5; ++i) {
        // The transition is split into quarters: odometer carries move a leaf across the whole circle.
        const double b = i == 4 ? j : j + s->transition_start + 0.25 * i * (1.0 - s->transition_start);
        if (b > d.lo[0] + 1e-15 && b < d.hi[0] - 1e-15)
          d.breakpoints.push_back(b);
      }
    std::sort(d.breakpoints.begin(), d.breakpoints.end());
    d.breakpoints.erase(std::unique(d.breakpoints.begin(), d.breakpoints.end()), d.breakpoints.end());
    return d;
  }
  const auto& g = std::get<GraphSolenoid>(family_);
  d.lo = {g.x_min + chart_offset};
  d.hi = {g.x_max + chart_offset};
  return d;
}

bool SolenoidModel::closed_leaves() const
{
  if (const auto* lin = std::get_if<LinearFoliation>(&family_)) {
    if (!ambient_.torus())
      return false;
    for (Eigen::Index c = 0; c < lin->directions.cols(); ++c) {
      const Eigen::VectorXd v = lin->directions.col(c) * lin->periods[static_cast<std::size_t>(c)];
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v[i] - std::round(v[i])) > 1e-9)
          return false;
    }
    return true;
  }
  if (const auto* s = std::get_if<CantorSuspension>(&family_))
    return s->return_map.kind() == ReturnMap::Kind::identity;
  const auto& g = std::get<GraphSolenoid>(family_);
  return ambient_.torus() && g.profile.periodic() && std::abs(g.x_max - g.x_min - 1.0) < 1e-12;
}

} // namespace sol
