#include "solenoid/currents.hpp"

#include "solenoid/core.hpp"
#include "solenoid/quadrature.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace sol {

void QuadratureSpec::check() const
{
  if (order < 2)
    throw InputError("quadrature order must be at least 2");
  if (depth && *depth < 0)
    throw InputError("quadrature depth must be nonnegative");
  if (transversal_order < 1)
    throw InputError("transversal quadrature order must be positive");
}

namespace {

using Integrand = std::function<void(const Eigen::VectorXd&, const Eigen::MatrixXd&, double* out)>;

struct LeafRules {
  std::vector<QuadratureRule> per_dim;
  std::size_t nodes = 1;
  bool refined = false;
};

// Panels of [a,b] split at the interior breakpoints.
std::vector<std::pair<double, double>> segments(double a, double b, const std::vector<double>& breaks)
{
  std::vector<std::pair<double, double>> out;
  double lo = a;
  for (double x : breaks)
    if (x > lo && x < b) {
      out.emplace_back(lo, x);
      lo = x;
    }
  out.emplace_back(lo, b);
  return out;
}

LeafRules leaf_rules(const SolenoidModel& m, const QuadratureSpec& quad, std::optional<double> bump_width)
{
  const LeafDomain dom = m.fundamental_domain(quad.chart_offset);
  LeafRules r;
  for (std::size_t i = 0; i < dom.lo.size(); ++i) {
    const double a = dom.lo[i], b = dom.hi[i];
    QuadratureRule rule;
    if (dom.periodic) {
      int q = quad.order;
      if (bump_width) {
        const int need = static_cast<int>(std::ceil(128.0 * (b - a) / *bump_width));
        if (need > q) {
          q = need;
          r.refined = true;
        }
      }
      rule = periodic_trapezoid(q, a, b);
    } else {
      for (const auto& [lo, hi] : segments(a, b, i == 0 ? dom.breakpoints : std::vector<double>{})) {
        int panels = 1, q = quad.order;
        if (bump_width) {
          panels = static_cast<int>(std::ceil((hi - lo) / (0.125 * *bump_width)));
          if (panels > 1) {
            q = std::min(q, 16);
            r.refined = true;
          } else {
            panels = 1;
          }
        }
        const QuadratureRule piece = composite_gauss_legendre(q, panels, lo, hi);
        rule.nodes.insert(rule.nodes.end(), piece.nodes.begin(), piece.nodes.end());
        rule.weights.insert(rule.weights.end(), piece.weights.begin(), piece.weights.end());
      }
    }
    r.nodes *= rule.size();
    r.per_dim.push_back(std::move(rule));
  }
  return r;
}

struct TransversalNode {
  Address addr;
  double y;
  double weight;
};

std::vector<TransversalNode> transversal_nodes(const SolenoidModel& m, int depth, int order)
{
  const CantorTransversal& k = m.transversal();
  const bool spread = k.continuous() && !std::holds_alternative<CantorSuspension>(m.family());
  const std::uint64_t count = std::uint64_t{1} << depth;
  std::vector<TransversalNode> out;
  out.reserve(static_cast<std::size_t>(count) * (spread ? static_cast<std::size_t>(order) : 1));
  for (std::uint64_t i = 0; i < count; ++i) {
    const Address a = Address::from_index(i, depth);
    const double mass = k.mass(a);
    if (mass == 0.0)
      continue;
    if (!spread) {
      out.push_back({a, k.midpoint(a), mass});
      continue;
    }
    const ClosedInterval iv = k.interval(a);
    const QuadratureRule r = gauss_legendre(order, iv.lo, iv.hi);
    for (std::size_t j = 0; j < r.size(); ++j)
      out.push_back({a, r.nodes[j], mass * r.weights[j] / iv.length()});
  }
  return out;
}

int working_depth(const SolenoidModel& m, const QuadratureSpec& quad)
{
  quad.check();
  const int d = quad.depth.value_or(m.transversal().depth());
  if (d > m.transversal().depth())
    throw InputError("quadrature depth " + std::to_string(d) + " exceeds transversal depth " +
                     std::to_string(m.transversal().depth()));
  return d;
}

// Integrates `width` scalar integrands over the solenoid in one pass.
Eigen::VectorXd integrate_solenoid(const SolenoidModel& m, const QuadratureSpec& quad, int width,
                                   std::optional<double> bump_width, const Integrand& fn,
                                   std::vector<std::string>* warnings)
{
  const int depth = working_depth(m, quad);
  // Compactly supported perturbations need the same panel density as bump forms.
  for (const auto& t : m.perturbation()) {
    double scale = 0.0;
    if (t.kind == PerturbationTerm::Kind::bump)
      scale = t.radius;
    else if (t.kind == PerturbationTerm::Kind::leaf_bump)
      scale = t.ramp;
    if (scale > 0.0)
      bump_width = std::min(bump_width.value_or(scale), scale);
  }
  const LeafRules rules = leaf_rules(m, quad, bump_width);
  if (rules.refined && warnings) {
    std::ostringstream os;
    os << "leaf quadrature refined to " << rules.nodes << " nodes per leaf for bump width " << *bump_width;
    warnings->push_back(os.str());
  }
  const auto nodes = transversal_nodes(m, depth, quad.transversal_order);
  const std::size_t k = rules.per_dim.size();
  const auto w = static_cast<std::size_t>(width);

  auto per_node = parallel_map(nodes.size(), [&](std::size_t ni) {
    const TransversalNode& tn = nodes[ni];
    const LeafRef leaf{tn.addr, tn.y};
    std::vector<std::vector<double>> terms(w, std::vector<double>(rules.nodes));
    std::vector<std::size_t> idx(k, 0);
    Eigen::VectorXd t(static_cast<Eigen::Index>(k));
    std::vector<double> buf(w);
    for (std::size_t flat = 0; flat < rules.nodes; ++flat) {
      double weight = tn.weight;
      for (std::size_t d = 0; d < k; ++d) {
        t[static_cast<Eigen::Index>(d)] = rules.per_dim[d].nodes[idx[d]];
        weight *= rules.per_dim[d].weights[idx[d]];
      }
      fn(m.leaf_point(leaf, t), m.leaf_jacobian(leaf, t), buf.data());
      for (std::size_t c = 0; c < w; ++c)
        terms[c][flat] = weight * buf[c];
      for (std::size_t d = k; d-- > 0;) {
        if (++idx[d] < rules.per_dim[d].size())
          break;
        idx[d] = 0;
      }
    }
    std::vector<double> sums(w);
    for (std::size_t c = 0; c < w; ++c)
      sums[c] = pairwise_sum(terms[c]);
    return sums;
  });

  Eigen::VectorXd out(width);
  std::vector<double> col(nodes.size());
  for (std::size_t c = 0; c < w; ++c) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      col[i] = per_node[i][c];
    out[static_cast<Eigen::Index>(c)] = pairwise_sum(col);
  }
  return out;
}

} // namespace

CurrentResult evaluate_current_report(const SolenoidModel& m, const DifferentialForm& omega,
                                      const QuadratureSpec& quad)
{
  if (omega.degree() != m.leaf_dim())
    throw DegreeError("form degree " + std::to_string(omega.degree()) + " does not match leaf dimension " +
                      std::to_string(m.leaf_dim()));
  if (omega.ambient_dim() != m.ambient().n)
    throw DegreeError("form lives on a different ambient dimension");
  std::optional<double> bump_width;
  if (omega.bump())
    bump_width = omega.bump()->width;
  CurrentResult r;
  r.value = integrate_solenoid(
      m, quad, 1, bump_width,
      [&](const Eigen::VectorXd& p, const Eigen::MatrixXd& j, double* out) { out[0] = omega.evaluate(p, j); },
      &r.warnings)[0];
  return r;
}

double evaluate_current(const SolenoidModel& m, const DifferentialForm& omega, const QuadratureSpec& quad)
{
  return evaluate_current_report(m, omega, quad).value;
}

double HomologyClass::operator[](IndexSet idx) const
{
  const auto basis = lex_subsets(n, k);
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i] == idx)
      return coeffs[static_cast<Eigen::Index>(i)];
  throw DegreeError("index set " + index_name(idx) + " is not in the degree-" + std::to_string(k) + " basis");
}

HomologyClass rs_class(const SolenoidModel& m, const QuadratureSpec& quad)
{
  const int n = m.ambient().n, k = m.leaf_dim();
  const auto basis = lex_subsets(n, k);
  std::vector<std::vector<int>> rows;
  for (IndexSet s : basis)
    rows.push_back(index_list(s));
  HomologyClass c;
  c.n = n;
  c.k = k;
  c.coeffs = integrate_solenoid(
      m, quad, static_cast<int>(basis.size()), std::nullopt,
      [&](const Eigen::VectorXd&, const Eigen::MatrixXd& j, double* out) {
        Eigen::MatrixXd minor(k, k);
        for (std::size_t b = 0; b < rows.size(); ++b) {
          for (int r = 0; r < k; ++r)
            minor.row(r) = j.row(rows[b][static_cast<std::size_t>(r)]);
          out[b] = k == 1 ? minor(0, 0) : minor.determinant();
        }
      },
      nullptr);
  return c;
}

double poincare_dual_pairing(const HomologyClass& a, const HomologyClass& b)
{
  if (a.n != b.n || a.k + b.k != a.n)
    throw DegreeError("pairing needs complementary degrees on the same torus");
  const auto basis = lex_subsets(a.n, a.k);
  const IndexSet full = a.n == 32 ? ~IndexSet{0} : ((IndexSet{1} << a.n) - 1);
  std::vector<double> terms;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const IndexSet comp = full & ~basis[i];
    terms.push_back(shuffle_sign(basis[i], comp) * a.coeffs[static_cast<Eigen::Index>(i)] * b[comp]);
  }
  return pairwise_sum(terms);
}

double stokes_residual(const SolenoidModel& m, const DifferentialForm& beta, const QuadratureSpec& quad)
{
  if (beta.degree() + 1 != m.leaf_dim())
    throw DegreeError("Stokes check needs a form of degree k - 1");
  const DifferentialForm d = exterior_derivative(beta);
  if (d.is_zero())
    return 0.0;
  return std::abs(evaluate_current(m, d, quad));
}

void check_immersion(const SolenoidModel& m, int samples)
{
  const int depth = std::min(m.transversal().depth(), 8);
  const LeafDomain dom = m.fundamental_domain();
  const std::uint64_t count = std::uint64_t{1} << depth;
  for (std::uint64_t i = 0; i < count; ++i) {
    const LeafRef leaf = m.leaf(Address::from_index(i, depth));
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXd t(static_cast<Eigen::Index>(dom.lo.size()));
      for (std::size_t d = 0; d < dom.lo.size(); ++d)
        t[static_cast<Eigen::Index>(d)] = dom.lo[d] + (dom.hi[d] - dom.lo[d]) * (s + 0.5 + 0.1 * d) / samples;
      m.leaf_frame(leaf, t);
    }
  }
}

double homotopy_drift(const SolenoidModel& m, const std::vector<PerturbationTerm>& terms, const QuadratureSpec& quad,
                      int time_samples)
{
  if (!m.perturbation().empty())
    throw InputError("homotopies start from an unperturbed model");
  if (terms.empty())
    return 0.0;
  const SolenoidModel moved = m.with_perturbation(terms, 1.0);
  for (int i = 0; i < std::max(time_samples, 2); ++i)
    check_immersion(moved.with_scale(static_cast<double>(i) / (std::max(time_samples, 2) - 1)));
  const HomologyClass c0 = rs_class(m, quad), c1 = rs_class(moved, quad);
  return (c1.coeffs - c0.coeffs).cwiseAbs().maxCoeff();
}

} // namespace sol
