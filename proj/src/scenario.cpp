#include "solenoid/scenario.hpp"

#include "solenoid/core.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sol {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what)
{
  throw InputError("scenario key '" + key + "': " + what);
}

// A json node together with its dotted path, for error messages.
struct Node {
  const json& j;
  std::string path;

  std::string key(const std::string& k) const { return path.empty() ? k : path + "." + k; }
  bool has(const std::string& k) const { return j.contains(k) && !j.at(k).is_null(); }

  Node at(const std::string& k) const
  {
    if (!has(k))
      bad(key(k), "missing");
    return {j.at(k), key(k)};
  }
  Node at(std::size_t i) const { return {j.at(i), path + "[" + std::to_string(i) + "]"}; }
  std::size_t size() const { return j.size(); }

  double num() const
  {
    if (!j.is_number())
      bad(path, "expected a number");
    return j.get<double>();
  }
  int integer() const
  {
    if (!j.is_number_integer())
      bad(path, "expected an integer");
    return j.get<int>();
  }
  std::string str() const
  {
    if (!j.is_string())
      bad(path, "expected a string");
    return j.get<std::string>();
  }
  bool boolean() const
  {
    if (!j.is_boolean())
      bad(path, "expected true or false");
    return j.get<bool>();
  }
  Node array() const
  {
    if (!j.is_array())
      bad(path, "expected an array");
    return *this;
  }
  Node object() const
  {
    if (!j.is_object())
      bad(path, "expected an object");
    return *this;
  }
  std::vector<double> numbers() const
  {
    array();
    std::vector<double> v;
    for (std::size_t i = 0; i < size(); ++i)
      v.push_back(at(i).num());
    return v;
  }
  std::vector<int> integers() const
  {
    array();
    std::vector<int> v;
    for (std::size_t i = 0; i < size(); ++i)
      v.push_back(at(i).integer());
    return v;
  }
  Eigen::VectorXd vec(int n) const
  {
    const auto v = numbers();
    if (static_cast<int>(v.size()) != n)
      bad(path, "expected " + std::to_string(n) + " entries");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  }

  double num(const std::string& k, double def) const { return has(k) ? at(k).num() : def; }
  int integer(const std::string& k, int def) const { return has(k) ? at(k).integer() : def; }
  std::string str(const std::string& k, const std::string& def) const { return has(k) ? at(k).str() : def; }

  void only(std::initializer_list<const char*> allowed) const { only(std::vector<std::string>(allowed.begin(), allowed.end())); }
  void only(const std::vector<std::string>& allowed) const
  {
    object();
    for (const auto& [k, v] : j.items())
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        bad(key(k), "unknown key");
  }
};

Task parse_task(const Node& n)
{
  static const std::pair<const char*, Task> names[] = {
      {"current-eval", Task::current_eval}, {"rs-class", Task::rs_class},
      {"stokes-check", Task::stokes_check}, {"homotopy-check", Task::homotopy_check},
      {"pairing", Task::pairing},           {"exhaustion", Task::exhaustion},
      {"thom-pairing", Task::thom_pairing}, {"ae-pairing", Task::ae_pairing},
      {"perturb", Task::perturb},           {"tangency-demo", Task::tangency_demo}};
  const std::string s = n.str();
  for (const auto& [name, t] : names)
    if (s == name)
      return t;
  bad(n.path, "unknown task '" + s + "'");
}

Ambient parse_ambient(const Node& n)
{
  n.only({"kind", "n"});
  Ambient a;
  const std::string kind = n.str("kind", "torus");
  if (kind == "torus")
    a.kind = AmbientKind::torus;
  else if (kind == "plane")
    a.kind = AmbientKind::plane;
  else
    bad(n.key("kind"), "expected 'torus' or 'plane'");
  a.n = n.integer("n", 2);
  if (a.n < 1 || a.n > 8)
    bad(n.key("n"), "dimension must be in [1, 8]");
  return a;
}

CantorTransversal parse_transversal(const Node& n, int default_depth)
{
  n.only({"construction", "ratio", "base", "removed", "gap_base", "gap_scale", "depth", "measure", "p", "total_mass",
          "masses"});
  CantorSpec s;
  const int depth = n.integer("depth", default_depth);
  const std::string c = n.str("construction", "middle_ratio");
  if (c == "middle_ratio") {
    s.construction = Construction::middle_ratio;
    s.ratio = n.num("ratio", 1.0 / 3.0);
  } else if (c == "interval") {
    s.construction = Construction::interval;
  } else if (c == "fat") {
    s = CantorSpec::fat(n.num("base", 4.0), n.num("removed", 0.4), depth);
    if (n.has("gap_base"))
      s.gap_base = n.at("gap_base").num();
    if (n.has("gap_scale"))
      s.gap_scale = n.at("gap_scale").num();
  } else {
    bad(n.key("construction"), "expected 'middle_ratio', 'interval' or 'fat'");
  }
  s.depth = depth;
  const std::string m = n.str("measure", "bernoulli");
  if (m == "bernoulli")
    s.measure = MeasureKind::bernoulli;
  else if (m == "lebesgue")
    s.measure = MeasureKind::lebesgue;
  else if (m == "explicit")
    s.measure = MeasureKind::explicit_masses;
  else
    bad(n.key("measure"), "expected 'bernoulli', 'lebesgue' or 'explicit'");
  s.p = n.num("p", 0.5);
  s.total_mass = n.num("total_mass", 1.0);
  if (n.has("masses")) {
    const Node ms = n.at("masses").object();
    for (const auto& [k, v] : ms.j.items())
      s.masses[k] = Node{v, ms.key(k)}.num();
  }
  try {
    return CantorTransversal::build(s);
  } catch (const Error& e) {
    bad(n.path, e.what());
  }
}

Profile parse_profile(const Node& n)
{
  n.only({"cosine_well", "base", "polynomial", "trig"});
  if (n.has("cosine_well"))
    return Profile::cosine_well(n.at("cosine_well").num(), n.num("base", 0.0));
  if (n.has("polynomial"))
    return Profile::polynomial(n.at("polynomial").numbers());
  if (n.has("trig")) {
    Profile p;
    p.kind = Profile::Kind::trig;
    const Node t = n.at("trig").array();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto row = t.at(i).numbers();
      if (row.size() != 3)
        bad(t.at(i).path, "expected [k, cos, sin]");
      p.trig.emplace_back(static_cast<int>(row[0]), row[1], row[2]);
    }
    return p;
  }
  bad(n.path, "expected one of cosine_well, polynomial, trig");
}

PerturbationTerm parse_term(const Node& n, int dim)
{
  n.only({"kind", "vec", "wave", "phase", "center", "radius", "cylinder", "leaf_center", "half_width", "ramp"});
  const std::string kind = n.at("kind").str();
  const Eigen::VectorXd v = n.at("vec").vec(dim);
  try {
    if (kind == "translation")
      return PerturbationTerm::translation(v);
    if (kind == "wave")
      return PerturbationTerm::wave_term(v, n.at("wave").vec(dim), n.num("phase", 0.0));
    if (kind == "shear")
      return PerturbationTerm::shear(v, n.at("wave").vec(dim));
    if (kind == "bump")
      return PerturbationTerm::bump(v, n.at("center").vec(dim), n.num("radius", 0.25));
    if (kind == "leaf_bump")
      return PerturbationTerm::leaf_bump(v, Address::parse(n.str("cylinder", "")), n.num("leaf_center", 0.0),
                                         n.num("half_width", 0.0625), n.num("ramp", 0.0625));
  } catch (const Error& e) {
    bad(n.path, e.what());
  }
  bad(n.key("kind"), "expected translation, wave, shear, bump or leaf_bump");
}

SolenoidModel parse_model(const Node& n, const Ambient& amb, int depth)
{
  const std::string fam = n.at("family").str();
  std::vector<std::string> keys{"family", "orientation", "perturbation", "depth"};
  if (fam == "kronecker")
    keys.insert(keys.end(), {"slope", "x_offset"});
  else if (fam == "vertical_circle")
    keys.insert(keys.end(), {"c"});
  else if (fam == "horizontal_circles")
    keys.insert(keys.end(), {"transversal"});
  else if (fam == "linear")
    keys.insert(keys.end(), {"directions", "transversal_dir", "offset", "periods", "transversal"});
  else if (fam == "suspension")
    keys.insert(keys.end(), {"return_map", "transition_start", "transversal"});
  else if (fam == "graph")
    keys.insert(keys.end(), {"profile", "x_min", "x_max", "transversal"});
  else
    bad(n.key("family"), "unknown family '" + fam + "'");
  n.only(keys);
  const int d = n.integer("depth", depth);
  try {
    auto build = [&]() -> SolenoidModel {
      if (fam == "kronecker")
        return SolenoidModel::kronecker(n.at("slope").num(), d, n.num("x_offset", 0.0));
      if (fam == "vertical_circle")
        return SolenoidModel::vertical_circle(n.at("c").num());
      if (fam == "horizontal_circles")
        return SolenoidModel::horizontal_circles(parse_transversal(n.at("transversal"), d));
      if (fam == "linear") {
        const Node cols = n.at("directions").array();
        if (cols.size() == 0)
          bad(cols.path, "expected at least one direction");
        Eigen::MatrixXd V(amb.n, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i)
          V.col(static_cast<Eigen::Index>(i)) = cols.at(i).vec(amb.n);
        std::vector<double> periods;
        if (n.has("periods"))
          periods = n.at("periods").numbers();
        return SolenoidModel::linear(amb, V, n.at("transversal_dir").vec(amb.n), n.at("offset").vec(amb.n),
                                     parse_transversal(n.at("transversal"), d), periods);
      }
      if (fam == "suspension") {
        CantorSuspension s;
        s.transition_start = n.num("transition_start", 0.5);
        if (n.has("return_map")) {
          const Node r = n.at("return_map");
          if (r.j.is_string()) {
            const std::string k = r.str();
            if (k == "identity")
              s.return_map = ReturnMap::identity();
            else if (k == "odometer")
              s.return_map = ReturnMap::odometer();
            else
              bad(r.path, "expected 'identity', 'odometer' or {\"permutation\": [...]}");
          } else {
            r.only({"permutation"});
            const auto p = r.at("permutation").integers();
            std::vector<std::uint32_t> perm(p.begin(), p.end());
            int pd = 0;
            while ((std::size_t{1} << pd) < perm.size())
              ++pd;
            s.return_map = ReturnMap::permutation(pd, perm);
          }
        }
        return SolenoidModel(amb, s, parse_transversal(n.at("transversal"), d));
      }
      if (fam == "graph") {
        GraphSolenoid g;
        g.profile = parse_profile(n.at("profile"));
        g.x_min = n.num("x_min", 0.0);
        g.x_max = n.num("x_max", 1.0);
        return SolenoidModel(amb, g, parse_transversal(n.at("transversal"), d));
      }
      bad(n.key("family"), "unknown family '" + fam + "'");
    };
    SolenoidModel m = build();
    if (fam == "kronecker" || fam == "vertical_circle" || fam == "horizontal_circles")
      if (m.ambient().n != amb.n || m.ambient().kind != amb.kind)
        bad(n.key("family"), "family '" + fam + "' lives on the 2-torus");
    if (n.has("orientation")) {
      const int o = n.at("orientation").integer();
      if (o != 1 && o != -1)
        bad(n.key("orientation"), "expected 1 or -1");
      m = m.with_orientation(o);
    }
    if (n.has("perturbation")) {
      const Node ts = n.at("perturbation").array();
      std::vector<PerturbationTerm> terms;
      for (std::size_t i = 0; i < ts.size(); ++i)
        terms.push_back(parse_term(ts.at(i), amb.n));
      m = m.with_perturbation(terms);
    }
    return m;
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    bad(n.path, e.what());
  }
}

DifferentialForm parse_form(const Node& n, int dim)
{
  n.only({"degree", "terms"});
  const int k = n.at("degree").integer();
  if (k < 0 || k > dim)
    bad(n.key("degree"), "degree must be in [0, n]");
  DifferentialForm w(dim, k);
  const Node terms = n.at("terms").array();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Node t = terms.at(i);
    t.only({"index", "constant", "trig"});
    const auto idx = t.has("index") ? t.at("index").integers() : std::vector<int>{};
    if (static_cast<int>(idx.size()) != k)
      bad(t.key("index"), "expected " + std::to_string(k) + " indices");
    for (std::size_t a = 0; a < idx.size(); ++a)
      if (idx[a] < 0 || idx[a] >= dim || (a > 0 && idx[a] <= idx[a - 1]))
        bad(t.key("index"), "indices must be increasing and in [0, n)");
    TrigPoly c(dim);
    if (t.has("constant"))
      c += TrigPoly::constant(dim, t.at("constant").num());
    if (t.has("trig")) {
      const Node tr = t.at("trig").array();
      for (std::size_t q = 0; q < tr.size(); ++q) {
        const Node e = tr.at(q);
        e.only({"freq", "cos", "sin"});
        const auto f = e.at("freq").integers();
        if (static_cast<int>(f.size()) != dim)
          bad(e.key("freq"), "expected " + std::to_string(dim) + " frequencies");
        c.add_term(f, e.num("cos", 0.0), e.num("sin", 0.0));
      }
    }
    w.add(index_from_list(idx), c);
  }
  return w;
}

Subtorus parse_subtorus(const Node& n, int dim)
{
  n.only({"fixed", "values"});
  Subtorus s;
  s.n = dim;
  s.fixed = n.at("fixed").integers();
  s.values = n.at("values").numbers();
  try {
    s.check();
  } catch (const Error& e) {
    bad(n.path, e.what());
  }
  return s;
}

LeafRef parse_leaf(const Node& n, const SolenoidModel& m)
{
  n.only({"address", "y"});
  LeafRef l;
  try {
    l.addr = Address::parse(n.str("address", ""));
  } catch (const Error& e) {
    bad(n.key("address"), e.what());
  }
  l.y = n.has("y") ? n.at("y").num() : m.transversal().midpoint(l.addr);
  return l;
}

int required_models(Task t)
{
  switch (t) {
  case Task::pairing:
  case Task::exhaustion:
  case Task::tangency_demo:
    return 2;
  default:
    return 1;
  }
}

} // namespace

std::string task_name(Task t)
{
  switch (t) {
  case Task::current_eval:
    return "current-eval";
  case Task::rs_class:
    return "rs-class";
  case Task::stokes_check:
    return "stokes-check";
  case Task::homotopy_check:
    return "homotopy-check";
  case Task::pairing:
    return "pairing";
  case Task::exhaustion:
    return "exhaustion";
  case Task::thom_pairing:
    return "thom-pairing";
  case Task::ae_pairing:
    return "ae-pairing";
  case Task::perturb:
    return "perturb";
  case Task::tangency_demo:
    return "tangency-demo";
  }
  return "?";
}

Scenario parse_scenario(const std::string& text, const std::string& name, const ScenarioOverrides& ov)
{
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("scenario is not valid JSON: ") + e.what());
  }
  const Node root{doc, ""};
  root.only({"name", "task", "ambient", "models", "forms", "random_forms", "submanifold", "homotopy", "leaf1",
             "leaf2", "radii", "rho", "epsilon", "certificate", "depth", "null_depth", "max_depth", "quad_order",
             "transversal_order", "chart_offset", "seed", "tolerance", "retries", "output"});
  Scenario s;
  s.name = root.str("name", name);
  s.task = parse_task(root.at("task"));
  s.ambient = root.has("ambient") ? parse_ambient(root.at("ambient")) : Ambient{};
  s.depth = ov.depth ? *ov.depth : root.integer("depth", 8);
  if (s.depth < 0 || s.depth > max_depth)
    bad("depth", "must be in [0, " + std::to_string(max_depth) + "]");
  s.null_depth = root.integer("null_depth", -1);
  s.max_depth = root.integer("max_depth", 12);
  s.quad.order = ov.quad_order ? *ov.quad_order : root.integer("quad_order", 64);
  s.quad.transversal_order = root.integer("transversal_order", 4);
  s.quad.chart_offset = root.num("chart_offset", 0.0);
  try {
    s.quad.check();
  } catch (const Error& e) {
    bad("quad_order", e.what());
  }
  if (root.has("seed")) {
    const Node sd = root.at("seed");
    if (!sd.j.is_number_unsigned())
      bad("seed", "expected a nonnegative integer");
    s.seed = sd.j.get<std::uint64_t>();
  }
  if (ov.seed)
    s.seed = *ov.seed;
  s.tolerance = root.num("tolerance", s.task == Task::ae_pairing || s.task == Task::tangency_demo ? 1e-3 : 1e-6);
  s.retries = root.integer("retries", 100);

  const Node models = root.at("models").array();
  for (std::size_t i = 0; i < models.size(); ++i)
    s.models.push_back(parse_model(models.at(i), s.ambient, s.depth));
  const std::size_t need = static_cast<std::size_t>(required_models(s.task));
  if (s.models.size() < need)
    bad("models", task_name(s.task) + " needs " + std::to_string(need) + " model(s)");
  if (s.models.size() > 2)
    bad("models", "at most two models");

  if (root.has("forms")) {
    const Node fs = root.at("forms").array();
    for (std::size_t i = 0; i < fs.size(); ++i)
      s.forms.push_back(parse_form(fs.at(i), s.ambient.n));
  }
  if (root.has("random_forms")) {
    const Node r = root.at("random_forms");
    r.only({"count", "degree", "max_freq"});
    s.random_forms.count = r.integer("count", 0);
    s.random_forms.degree = r.integer("degree", 0);
    s.random_forms.max_freq = r.integer("max_freq", 2);
  }
  if (root.has("submanifold"))
    s.submanifold = parse_subtorus(root.at("submanifold"), s.ambient.n);
  if (root.has("homotopy")) {
    const Node h = root.at("homotopy").array();
    for (std::size_t i = 0; i < h.size(); ++i)
      s.homotopy.push_back(parse_term(h.at(i), s.ambient.n));
  }
  s.leaf1 = root.has("leaf1") ? parse_leaf(root.at("leaf1"), s.models[0]) : s.models[0].leaf({});
  if (s.models.size() > 1)
    s.leaf2 = root.has("leaf2") ? parse_leaf(root.at("leaf2"), s.models[1]) : s.models[1].leaf({});
  if (root.has("radii"))
    s.radii = root.at("radii").numbers();
  if (root.has("rho"))
    s.rho = root.at("rho").numbers();
  if (root.has("epsilon"))
    s.epsilon = root.at("epsilon").numbers();
  if (root.has("certificate")) {
    const Node c = root.at("certificate");
    c.only({"count", "sup_norm", "depth"});
    s.certificate.count = c.integer("count", 20);
    s.certificate.sup_norm = c.num("sup_norm", 0.01);
    s.certificate.depth = c.integer("depth", 8);
  }

  switch (s.task) {
  case Task::current_eval:
    if (s.forms.empty())
      bad("forms", "current-eval needs at least one form");
    break;
  case Task::stokes_check:
    if (s.forms.empty() && s.random_forms.count <= 0)
      bad("forms", "stokes-check needs forms or random_forms");
    break;
  case Task::homotopy_check:
    if (s.homotopy.empty())
      bad("homotopy", "homotopy-check needs perturbation terms");
    break;
  case Task::exhaustion:
    if (s.radii.empty())
      bad("radii", "exhaustion needs a radius schedule");
    break;
  case Task::thom_pairing:
    if (!s.submanifold)
      bad("submanifold", "thom-pairing needs a submanifold");
    if (s.rho.empty())
      bad("rho", "thom-pairing needs a width schedule");
    break;
  case Task::ae_pairing:
    if (s.models.size() < 2 && !s.submanifold)
      bad("models", "ae-pairing needs a second model or a submanifold");
    break;
  case Task::perturb:
    if (s.epsilon.empty())
      bad("epsilon", "perturb needs a budget list");
    break;
  default:
    break;
  }

  std::string out = root.str("output", "out/" + name);
  if (ov.out)
    out = *ov.out;
  s.output = out;
  return s;
}

Scenario load_scenario(const std::string& path, const ScenarioOverrides& ov)
{
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot read scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), std::filesystem::path(path).stem().string(), ov);
}

} // namespace sol
