#include "solenoid/core.hpp"
#include "solenoid/intersection.hpp"
#include "solenoid/perturb.hpp"
#include "solenoid/scenario.hpp"
#include "solenoid/tangency.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace sol {

namespace {

std::string flag(bool b)
{
  return b ? "true" : "false";
}

std::string one_line(std::string s)
{
  for (char& c : s)
    if (c == '\n' || c == '\r')
      c = ' ';
  return s;
}

class Report {
public:
  explicit Report(RunReport& r) : r_(r) {}
  void put(const std::string& k, double v) { r_.summary.emplace_back(k, format_number(v)); }
  void put(const std::string& k, int v) { r_.summary.emplace_back(k, std::to_string(v)); }
  void put(const std::string& k, std::size_t v) { r_.summary.emplace_back(k, std::to_string(v)); }
  void put(const std::string& k, bool v) { r_.summary.emplace_back(k, flag(v)); }
  void put(const std::string& k, const std::string& v) { r_.summary.emplace_back(k, one_line(v)); }
  void put(const std::string& k, const char* v) { put(k, std::string(v)); }
  void row(int step, double parameter, double value, std::optional<double> err = std::nullopt)
  {
    r_.sequence.push_back({step, parameter, value, err});
  }

private:
  RunReport& r_;
};

std::vector<DifferentialForm> random_forms(const RandomForms& spec, int n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> freq(-spec.max_freq, spec.max_freq);
  const auto basis = lex_subsets(n, spec.degree);
  std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
  std::vector<DifferentialForm> out;
  for (int i = 0; i < spec.count; ++i) {
    DifferentialForm w(n, spec.degree);
    for (int t = 0; t < 3; ++t) {
      TrigPoly c(n);
      std::vector<int> f(static_cast<std::size_t>(n));
      for (int& x : f)
        x = freq(rng);
      const double a = coeff(rng), b = coeff(rng);
      c.add_term(f, a, b);
      w.add(basis[pick(rng)], c);
    }
    out.push_back(w);
  }
  return out;
}

void run_current_eval(const Scenario& s, Report& rep)
{
  for (std::size_t i = 0; i < s.forms.size(); ++i) {
    const auto r = evaluate_current_report(s.models[0], s.forms[i], s.quad);
    rep.put("current_" + std::to_string(i), r.value);
    for (std::size_t w = 0; w < r.warnings.size(); ++w)
      rep.put("warning_" + std::to_string(i) + "_" + std::to_string(w), r.warnings[w]);
  }
}

void run_rs_class(const Scenario& s, Report& rep)
{
  const auto c = rs_class(s.models[0], s.quad);
  const auto basis = lex_subsets(c.n, c.k);
  for (std::size_t i = 0; i < basis.size(); ++i)
    rep.put("class_" + index_name(basis[i]), c.coeffs[static_cast<Eigen::Index>(i)]);
}

void run_stokes(const Scenario& s, Report& rep)
{
  auto forms = s.forms;
  for (auto& f : random_forms(s.random_forms, s.ambient.n, s.seed))
    forms.push_back(f);
  const auto res = parallel_map(forms.size(), [&](std::size_t i) { return stokes_residual(s.models[0], forms[i], s.quad); });
  double worst = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    worst = std::max(worst, res[i]);
    rep.row(static_cast<int>(i), static_cast<double>(i), res[i]);
  }
  rep.put("forms", forms.size());
  rep.put("max_residual", worst);
  rep.put("tolerance", s.tolerance);
  rep.put("pass", worst <= s.tolerance);
}

void run_homotopy(const Scenario& s, Report& rep)
{
  const auto before = rs_class(s.models[0], s.quad);
  const auto after = rs_class(s.models[0].with_perturbation(s.homotopy), s.quad);
  const auto basis = lex_subsets(before.n, before.k);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    rep.put("class_before_" + index_name(basis[i]), before.coeffs[static_cast<Eigen::Index>(i)]);
    rep.put("class_after_" + index_name(basis[i]), after.coeffs[static_cast<Eigen::Index>(i)]);
  }
  const double drift = homotopy_drift(s.models[0], s.homotopy, s.quad);
  rep.put("drift", drift);
  rep.put("tolerance", s.tolerance);
  rep.put("pass", drift <= s.tolerance);
}

void run_pairing(const Scenario& s, Report& rep)
{
  const double cup = pairing_via_cup(s.models[0], s.models[1], s.quad);
  rep.put("pairing_via_cup", cup);
  const double exact = pairing_exact(s.models[0], s.models[1], s.depth);
  rep.put("pairing_exact", exact);
  rep.put("abs_diff", std::abs(exact - cup));
}

void run_exhaustion(const Scenario& s, Report& rep)
{
  double reference = 0.0;
  std::string source = "pairing_exact";
  try {
    reference = pairing_exact(s.models[0], s.models[1], s.depth);
  } catch (const RefusalError&) {
    reference = pairing_via_cup(s.models[0], s.models[1], s.quad);
    source = "pairing_via_cup";
  }
  const auto steps = exhaustion_estimate(s.models[0], s.models[1], s.leaf1, s.leaf2, s.radii);
  for (std::size_t i = 0; i < steps.size(); ++i)
    rep.row(static_cast<int>(i), steps[i].radius, steps[i].estimate, std::abs(steps[i].estimate - reference));
  rep.put("reference", reference);
  rep.put("reference_source", source);
  rep.put("final_radius", steps.back().radius);
  rep.put("final_count", steps.back().count);
  rep.put("final_estimate", steps.back().estimate);
  rep.put("final_abs_diff", std::abs(steps.back().estimate - reference));
}

void run_thom(const Scenario& s, Report& rep)
{
  const auto terms = pairing_via_thom(s.models[0], *s.submanifold, s.rho, s.quad);
  const auto ae = ae_pairing(s.models[0], subtorus_model(*s.submanifold), s.depth, s.tolerance, s.null_depth);
  for (std::size_t j = 0; j < terms.size(); ++j)
    rep.row(static_cast<int>(j), s.rho[j], terms[j].value, std::abs(terms[j].value - ae.value));
  double last_step = 0.0;
  if (terms.size() > 1)
    last_step = std::abs(terms.back().value - terms[terms.size() - 2].value);
  std::size_t warnings = 0;
  for (const auto& t : terms)
    warnings += t.warnings.size();
  rep.put("ae_pairing", ae.value);
  rep.put("ae_error_bound", ae.error_bound);
  rep.put("final_rho", s.rho.back());
  rep.put("final_term", terms.back().value);
  rep.put("final_abs_diff", std::abs(terms.back().value - ae.value));
  rep.put("last_step_change", last_step);
  rep.put("quadrature_warnings", warnings);
}

void put_bounds(const TangencySet& ts, Report& rep)
{
  for (std::size_t d = 0; d < ts.mass_bound.size(); ++d)
    rep.row(static_cast<int>(d), static_cast<double>(d), ts.mass_bound[d]);
  rep.put("flagged_records", ts.flagged.size());
  rep.put("interval_bound", ts.interval_bound);
  double lo = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (std::size_t d = 0; d < ts.mass_bound.size(); ++d) {
    lo = std::min(lo, ts.mass_bound[d]);
    if (d > 0 && ts.mass_bound[d] > ts.mass_bound[d - 1] + 1e-12)
      monotone = false;
  }
  rep.put("mass_bound_min", lo);
  rep.put("mass_bound_final", ts.mass_bound.back());
  rep.put("mass_bound_monotone", monotone);
  if (ts.inclusion_exclusion_bound)
    rep.put("inclusion_exclusion_bound", *ts.inclusion_exclusion_bound);
}

const SolenoidModel& partner(const Scenario& s, std::optional<SolenoidModel>& storage)
{
  if (s.models.size() > 1)
    return s.models[1];
  storage = subtorus_model(*s.submanifold);
  return *storage;
}

void run_ae(const Scenario& s, Report& rep)
{
  std::optional<SolenoidModel> nm;
  const SolenoidModel& m2 = partner(s, nm);
  const int null_depth = std::max(s.depth, s.null_depth);
  const auto ts = detect_tangencies(s.models[0], m2, s.depth, tangency_threshold, null_depth);
  put_bounds(ts, rep);
  const auto r = ae_pairing(s.models[0], m2, s.depth, s.tolerance, null_depth);
  const double cup = pairing_via_cup(s.models[0], m2, s.quad);
  rep.put("ae_pairing", r.value);
  rep.put("error_bound", r.error_bound);
  rep.put("excluded_pairs", r.excluded_pairs);
  rep.put("pairing_via_cup", cup);
  rep.put("abs_diff_cup", std::abs(r.value - cup));
  rep.put("within_bound", std::abs(r.value - cup) <= 1e-4 + r.error_bound);
}

void run_perturb(const Scenario& s, Report& rep)
{
  if (s.models.size() > 1)
    throw RefusalError("perturbation to transversality is offered for a solenoid against a subtorus only; two "
                       "solenoids with fat Cantor transversals cannot in general be perturbed apart");
  if (!s.submanifold)
    throw InputError("scenario key 'submanifold': missing");
  const SolenoidModel nm = subtorus_model(*s.submanifold);
  const auto before = detect_tangencies(s.models[0], nm, s.depth);
  rep.put("tangencies_before", before.flagged.size());
  bool all_ok = true;
  for (std::size_t i = 0; i < s.epsilon.size(); ++i) {
    PerturbOptions o;
    o.epsilon = s.epsilon[i];
    o.seed = s.seed + i;
    o.retries = s.retries;
    o.check_depth = s.depth;
    o.quad = s.quad;
    const auto r = perturb_to_transversality(s.models[0], *s.submanifold, o);
    const auto after = detect_tangencies(r.model, nm, s.depth);
    int attempts = 0;
    for (const auto& b : r.boxes)
      attempts += b.attempts;
    const std::string k = "_" + std::to_string(i);
    rep.put("epsilon" + k, s.epsilon[i]);
    rep.put("delta" + k, r.delta);
    rep.put("boxes" + k, r.boxes.size());
    rep.put("attempts" + k, attempts);
    rep.put("initial_min_margin" + k, r.initial_min_margin);
    rep.put("min_margin" + k, r.min_margin);
    rep.put("class_drift" + k, r.class_drift);
    rep.put("homotopy_drift" + k, r.homotopy_drift);
    rep.put("tangencies_after" + k, after.flagged.size());
    rep.row(static_cast<int>(i), s.epsilon[i], r.min_margin, r.class_drift);
    all_ok = all_ok && r.min_margin >= r.delta && after.empty() && r.class_drift <= 1e-6;
  }
  rep.put("all_pass", all_ok);
}

void run_tangency_demo(const Scenario& s, Report& rep)
{
  const auto& m1 = s.models[0];
  const auto& m2 = s.models[1];
  const int bound_depth = std::max(s.depth, s.max_depth);
  const auto ts = detect_tangencies(m1, m2, s.depth, tangency_threshold, bound_depth);
  put_bounds(ts, rep);
  if (s.certificate.count > 0) {
    int certified = 0;
    double slack = std::numeric_limits<double>::infinity();
    std::size_t overlaps = std::numeric_limits<std::size_t>::max();
    for (int i = 0; i < s.certificate.count; ++i) {
      const auto g = WaveSum::random(s.seed + static_cast<std::uint64_t>(i), s.certificate.sup_norm);
      const auto c = remark_certificate(m1.transversal(), m2.transversal(), g, s.certificate.depth);
      certified += c.certified ? 1 : 0;
      slack = std::min(slack, c.slack);
      overlaps = std::min(overlaps, c.overlap_pairs);
    }
    rep.put("certificates", s.certificate.count);
    rep.put("certified", certified);
    rep.put("certificate_min_slack", slack);
    rep.put("certificate_min_overlap_pairs", overlaps);
  }
  const auto r = ae_pairing(m1, m2, s.depth, s.tolerance, bound_depth);
  rep.put("ae_pairing", r.value);
  rep.put("error_bound", r.error_bound);
}

} // namespace

std::string format_number(double x)
{
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  if (std::isnan(x))
    return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string render_summary(const Summary& s)
{
  std::string out;
  for (const auto& [k, v] : s)
    out += k + " = " + v + "\n";
  return out;
}

std::string render_sequence(const std::vector<SequenceRow>& rows)
{
  std::string out = "step,parameter,value,error_bound\n";
  for (const auto& r : rows)
    out += std::to_string(r.step) + "," + format_number(r.parameter) + "," + format_number(r.value) + "," +
           (r.error_bound ? format_number(*r.error_bound) : std::string()) + "\n";
  return out;
}

RunReport execute(const Scenario& s)
{
  RunReport out;
  Report rep(out);
  rep.put("scenario", s.name);
  rep.put("task", task_name(s.task));
  rep.put("depth", s.depth);
  rep.put("quad_order", s.quad.order);
  rep.put("seed", std::to_string(s.seed));
  try {
    switch (s.task) {
    case Task::current_eval:
      run_current_eval(s, rep);
      break;
    case Task::rs_class:
      run_rs_class(s, rep);
      break;
    case Task::stokes_check:
      run_stokes(s, rep);
      break;
    case Task::homotopy_check:
      run_homotopy(s, rep);
      break;
    case Task::pairing:
      run_pairing(s, rep);
      break;
    case Task::exhaustion:
      run_exhaustion(s, rep);
      break;
    case Task::thom_pairing:
      run_thom(s, rep);
      break;
    case Task::ae_pairing:
      run_ae(s, rep);
      break;
    case Task::perturb:
      run_perturb(s, rep);
      break;
    case Task::tangency_demo:
      run_tangency_demo(s, rep);
      break;
    }
    rep.put("status", "ok");
  } catch (const RefusalError& e) {
    out.exit_code = 2;
    out.diagnostic = e.what();
    rep.put("status", "refused");
    rep.put("diagnostic", e.what());
  } catch (const Error& e) {
    out.exit_code = 1;
    out.diagnostic = e.what();
    rep.put("status", "input-error");
    rep.put("diagnostic", e.what());
  }
  return out;
}

RunReport run_scenario_file(const std::string& path, const ScenarioOverrides& ov)
{
  Scenario s;
  try {
    s = load_scenario(path, ov);
  } catch (const Error& e) {
    RunReport r;
    r.exit_code = 1;
    r.diagnostic = e.what();
    return r;
  }
  RunReport r = execute(s);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(s.output, ec);
  if (ec) {
    r.exit_code = 1;
    r.diagnostic = "cannot create output directory '" + s.output + "': " + ec.message();
    return r;
  }
  std::ofstream(fs::path(s.output) / "summary.txt") << render_summary(r.summary);
  if (!r.sequence.empty())
    std::ofstream(fs::path(s.output) / "sequence.csv") << render_sequence(r.sequence);
  return r;
}

std::vector<ValidationCheck> validate_scenario_file(const std::string& path, const ScenarioOverrides& ov)
{
  std::vector<ValidationCheck> checks;
  Scenario s;
  try {
    s = load_scenario(path, ov);
    checks.push_back({"schema", true, "task " + task_name(s.task)});
  } catch (const std::exception& e) {
    checks.push_back({"schema", false, e.what()});
    return checks;
  }
  for (std::size_t i = 0; i < s.models.size(); ++i) {
    const auto& m = s.models[i];
    const std::string p = "model" + std::to_string(i) + ".";
    const auto& k = m.transversal();
    try {
      const auto bad = k.additivity_violation();
      checks.push_back({p + "mass_additivity", !bad.has_value(),
                        bad ? "node '" + bad->str() + "' differs from the sum of its children"
                            : "all " + std::to_string((std::uint64_t{1} << k.depth()) - 1) + " interior nodes"});
    } catch (const std::exception& e) {
      checks.push_back({p + "mass_additivity", false, e.what()});
    }
    if (const auto* susp = std::get_if<CantorSuspension>(&m.family())) {
      try {
        const double dev = holonomy_invariance_deviation(k, susp->return_map, k.depth());
        checks.push_back({p + "holonomy_invariance", dev <= 1e-12, "deviation " + format_number(dev)});
      } catch (const std::exception& e) {
        checks.push_back({p + "holonomy_invariance", false, e.what()});
      }
    } else {
      checks.push_back({p + "holonomy_invariance", true, "deviation 0 (trivial holonomy)"});
    }
    try {
      check_immersion(m);
      checks.push_back({p + "immersion_rank", true, "full rank at all samples"});
    } catch (const std::exception& e) {
      checks.push_back({p + "immersion_rank", false, e.what()});
    }
  }
  for (std::size_t i = 0; i < s.forms.size(); ++i) {
    const int k = s.forms[i].degree(), leaf = s.models[0].leaf_dim();
    const bool ok = s.task != Task::current_eval || k == leaf;
    checks.push_back({"form" + std::to_string(i) + ".degree", ok,
                      "degree " + std::to_string(k) + ", leaf dimension " + std::to_string(leaf)});
  }
  return checks;
}

std::string render_validation(const std::vector<ValidationCheck>& checks)
{
  std::string out;
  int failed = 0;
  for (const auto& c : checks) {
    out += (c.pass ? "PASS " : "FAIL ") + c.name + ": " + one_line(c.detail) + "\n";
    failed += c.pass ? 0 : 1;
  }
  out += "checks = " + std::to_string(checks.size()) + ", failed = " + std::to_string(failed) + "\n";
  return out;
}

} // namespace sol
