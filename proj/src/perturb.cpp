#include "solenoid/perturb.hpp"

#include "solenoid/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace sol {

namespace {

struct Check {
  bool ok = true;
  double min_margin = std::numeric_limits<double>::infinity();
};

// Leaf-parameter distance, measured around the leaf when it is closed (period > 0).
double leaf_distance(double t, double center, double period)
{
  double d = t - center;
  if (period > 0.0)
    d -= period * std::round(d / period);
  return std::abs(d);
}

bool in_box(const IntersectionRecord& r, const Address& piece, double center, double reach, double period)
{
  return r.leaf1.addr.has_prefix(piece) && leaf_distance(r.t1[0], center, period) <= reach;
}

// Records of m against N; a non-isolated tangency counts as a failure.
Check check(const SolenoidModel& m, const SolenoidModel& nm, int depth, double delta, const Address* piece = nullptr,
            double center = 0.0, double reach = 0.0, double period = 0.0)
{
  Check c;
  std::vector<IntersectionRecord> recs;
  try {
    recs = intersection_points(m, nm, depth);
  } catch (const RefusalError&) {
    c.ok = false;
    c.min_margin = 0.0;
    return c;
  }
  for (const auto& r : recs) {
    if (piece && !in_box(r, *piece, center, reach, period))
      continue;
    c.min_margin = std::min(c.min_margin, r.transversal ? r.margin : 0.0);
  }
  c.ok = c.min_margin >= delta;
  return c;
}

Eigen::VectorXd sample_ball(std::mt19937_64& rng, int n, double radius)
{
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = gauss(rng);
  const double norm = v.norm();
  if (norm == 0.0)
    return Eigen::VectorXd::Zero(n);
  return v * (radius * std::pow(unit(rng), 1.0 / n) / norm);
}

double class_distance(const HomologyClass& a, const HomologyClass& b)
{
  return (a.coeffs - b.coeffs).cwiseAbs().maxCoeff();
}

} // namespace

PerturbResult perturb_to_transversality(const SolenoidModel& m, const Subtorus& N, const PerturbOptions& opts)
{
  if (!(opts.epsilon > 0.0))
    throw InputError("perturbation budget epsilon must be positive");
  const double delta = opts.delta > 0.0 ? opts.delta : opts.epsilon / 10.0;
  if (delta >= opts.epsilon)
    throw InputError("margin delta must be smaller than the budget epsilon");
  if (opts.retries < 1 || opts.piece_depth < 0 || opts.box_count < 1)
    throw InputError("perturbation needs retries >= 1, piece_depth >= 0, box_count >= 1");
  if (!m.perturbation().empty())
    throw InputError("perturb_to_transversality expects an unperturbed model");
  if (m.leaf_dim() != 1)
    throw InputError("perturb_to_transversality handles 1-dimensional leaves");
  N.check();
  if (N.n != m.ambient().n || N.codim() != m.leaf_dim())
    throw InputError("subtorus must have codimension equal to the leaf dimension");

  const SolenoidModel nm = subtorus_model(N);
  const int depth = opts.check_depth < 0 ? m.transversal().depth() : std::min(opts.check_depth, m.transversal().depth());
  const int piece_depth = std::min(opts.piece_depth, depth);
  const double box_width = 1.0 / opts.box_count;
  const double reach = box_width;
  const double half_width = box_width / 2.0, ramp = box_width / 2.0;
  const LeafDomain dom = m.fundamental_domain();
  const double period = dom.periodic ? dom.hi[0] - dom.lo[0] : 0.0;
  auto box_center = [&](double t) {
    double c = std::round(t / box_width) * box_width;
    if (period > 0.0)
      c -= period * std::floor((c - dom.lo[0]) / period);
    return c;
  };

  PerturbResult out{m, {}, delta, 0.0, 0.0, 0.0, 0.0, false};

  // Boxes around the records that miss the margin, in address order.
  std::set<std::pair<Address, double>> todo;
  std::vector<IntersectionRecord> recs;
  bool refused = false;
  try {
    recs = intersection_points(m, nm, depth);
  } catch (const RefusalError&) {
    refused = true;
  }
  if (refused)
    throw RefusalError("tangency of m with N is not isolated; no leaf box can be formed");
  double initial = std::numeric_limits<double>::infinity();
  for (const auto& r : recs) {
    const double margin = r.transversal ? r.margin : 0.0;
    initial = std::min(initial, margin);
    if (margin < delta)
      todo.insert({r.leaf1.addr.prefix(piece_depth), box_center(r.t1[0])});
  }
  out.initial_min_margin = initial;
  if (todo.empty()) {
    out.min_margin = initial;
    out.unchanged = true;
    return out;
  }

  std::mt19937_64 rng(opts.seed);
  std::vector<PerturbationTerm> terms;
  const int n = m.ambient().n;
  int index = 0;
  for (const auto& [piece, center] : todo) {
    const double budget = opts.epsilon / std::ldexp(1.0, index + 1);
    std::vector<Eigen::VectorXd> samples;
    for (int s = 0; s < opts.retries; ++s)
      samples.push_back(sample_ball(rng, n, budget));

    // Samples are evaluated in batches; the first accepted one in sample order wins.
    const std::size_t batch = 8;
    int accepted = -1;
    for (std::size_t start = 0; start < samples.size() && accepted < 0; start += batch) {
      const std::size_t count = std::min(batch, samples.size() - start);
      const auto ok = parallel_map(count, [&](std::size_t j) {
        auto trial = terms;
        trial.push_back(PerturbationTerm::leaf_bump(samples[start + j], piece, center, half_width, ramp));
        return check(m.with_perturbation(trial), nm, depth, delta, &piece, center, reach, period).ok;
      });
      for (std::size_t j = 0; j < count; ++j)
        if (ok[j]) {
          accepted = static_cast<int>(start + j);
          break;
        }
    }
    if (accepted < 0) {
      std::ostringstream os;
      os << "no perturbation within budget " << budget << " reached margin " << delta << " after " << opts.retries
         << " samples on box (piece " << piece.str() << ", t = " << center << ")";
      throw RefusalError(os.str());
    }
    terms.push_back(PerturbationTerm::leaf_bump(samples[static_cast<std::size_t>(accepted)], piece, center,
                                                half_width, ramp));
    out.boxes.push_back({piece, center, budget, samples[static_cast<std::size_t>(accepted)], accepted + 1});
    ++index;
  }

  out.model = m.with_perturbation(terms);
  const Check final_check = check(out.model, nm, depth, delta);
  if (!final_check.ok) {
    std::ostringstream os;
    os << "perturbed model still has margin " << final_check.min_margin << " < " << delta
       << "; a box perturbation disturbed a neighbouring box";
    throw RefusalError(os.str());
  }
  out.min_margin = final_check.min_margin;
  out.class_drift = class_distance(rs_class(out.model, opts.quad), rs_class(m, opts.quad));
  out.homotopy_drift = homotopy_drift(m, terms, opts.quad);
  return out;
}

} // namespace sol
