#include "solenoid/solenoid.h"

#include "solenoid/core.hpp"
#include "solenoid/intersection.hpp"
#include "solenoid/perturb.hpp"
#include "solenoid/scenario.hpp"
#include "solenoid/tangency.hpp"

#include <cstring>
#include <string>

struct sol_model {
  sol::SolenoidModel m;
};

struct sol_form {
  sol::DifferentialForm w;
};

namespace {

thread_local std::string last_error;

struct NullError : sol::InputError {
  using sol::InputError::InputError;
};

struct BufferError : sol::InputError {
  using sol::InputError::InputError;
};

template <class Fn>
sol_status guard(Fn&& fn)
{
  try {
    fn();
    last_error.clear();
    return SOL_OK;
  } catch (const NullError& e) {
    last_error = e.what();
    return SOL_ERR_NULL;
  } catch (const BufferError& e) {
    last_error = e.what();
    return SOL_ERR_BUFFER;
  } catch (const sol::InputError& e) {
    last_error = e.what();
    return SOL_ERR_INPUT;
  } catch (const sol::RefusalError& e) {
    last_error = e.what();
    return SOL_ERR_REFUSED;
  } catch (const sol::ConstructionError& e) {
    last_error = e.what();
    return SOL_ERR_CONSTRUCTION;
  } catch (const sol::AddressError& e) {
    last_error = e.what();
    return SOL_ERR_ADDRESS;
  } catch (const sol::DegreeError& e) {
    last_error = e.what();
    return SOL_ERR_DEGREE;
  } catch (const sol::ImmersionError& e) {
    last_error = e.what();
    return SOL_ERR_IMMERSION;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SOL_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what)
{
  if (!p)
    throw NullError(std::string("null pointer: ") + what);
}

sol::CantorTransversal transversal(const sol_cantor_spec* c)
{
  need(c, "cantor spec");
  sol::CantorSpec s;
  switch (c->construction) {
  case SOL_MIDDLE_RATIO:
    s.construction = sol::Construction::middle_ratio;
    break;
  case SOL_INTERVAL:
    s.construction = sol::Construction::interval;
    break;
  case SOL_FAT:
    s.construction = sol::Construction::fat_gaps;
    break;
  default:
    throw sol::InputError("unknown construction");
  }
  s.ratio = c->ratio;
  s.gap_base = c->gap_base;
  s.gap_scale = c->gap_scale;
  s.depth = c->depth;
  s.measure = c->measure == SOL_LEBESGUE ? sol::MeasureKind::lebesgue : sol::MeasureKind::bernoulli;
  s.p = c->p;
  s.total_mass = c->total_mass;
  return sol::CantorTransversal::build(s);
}

sol::QuadratureSpec quad(int order)
{
  sol::QuadratureSpec q;
  if (order > 0)
    q.order = order;
  return q;
}

sol::ScenarioOverrides overrides(const sol_overrides* ov)
{
  sol::ScenarioOverrides o;
  if (!ov)
    return o;
  if (ov->depth >= 0)
    o.depth = ov->depth;
  if (ov->quad_order >= 0)
    o.quad_order = ov->quad_order;
  if (ov->has_seed)
    o.seed = ov->seed;
  if (ov->out_dir)
    o.out = ov->out_dir;
  return o;
}

sol::Subtorus subtorus(int n, int q, const int* fixed, const double* values)
{
  if (q > 0) {
    need(fixed, "fixed");
    need(values, "values");
  }
  sol::Subtorus s;
  s.n = n;
  s.fixed.assign(fixed, fixed + q);
  s.values.assign(values, values + q);
  s.check();
  return s;
}

sol_status emit(sol::SolenoidModel m, sol_model** out)
{
  *out = new sol_model{std::move(m)};
  return SOL_OK;
}

} // namespace

extern "C" {

const char* sol_version(void)
{
  return "0.1.0";
}

const char* sol_last_error(void)
{
  return last_error.c_str();
}

void sol_cantor_spec_default(sol_cantor_spec* spec)
{
  if (!spec)
    return;
  spec->construction = SOL_MIDDLE_RATIO;
  spec->ratio = 1.0 / 3.0;
  spec->gap_base = 4.0;
  spec->gap_scale = 0.8;
  spec->depth = 8;
  spec->measure = SOL_BERNOULLI;
  spec->p = 0.5;
  spec->total_mass = 1.0;
}

void sol_overrides_default(sol_overrides* ov)
{
  if (!ov)
    return;
  ov->depth = -1;
  ov->quad_order = -1;
  ov->has_seed = 0;
  ov->seed = 0;
  ov->out_dir = nullptr;
}

sol_status sol_model_kronecker(double slope, int depth, double x_offset, sol_model** out)
{
  return guard([&] {
    need(out, "out");
    emit(sol::SolenoidModel::kronecker(slope, depth, x_offset), out);
  });
}

sol_status sol_model_horizontal_circles(const sol_cantor_spec* k, sol_model** out)
{
  return guard([&] {
    need(out, "out");
    emit(sol::SolenoidModel::horizontal_circles(transversal(k)), out);
  });
}

sol_status sol_model_vertical_circle(double c, sol_model** out)
{
  return guard([&] {
    need(out, "out");
    emit(sol::SolenoidModel::vertical_circle(c), out);
  });
}

sol_status sol_model_suspension(sol_return_map h, double transition_start, const sol_cantor_spec* k, sol_model** out)
{
  return guard([&] {
    need(out, "out");
    sol::CantorSuspension s;
    s.return_map = h == SOL_ODOMETER ? sol::ReturnMap::odometer() : sol::ReturnMap::identity();
    s.transition_start = transition_start;
    emit(sol::SolenoidModel(sol::Ambient{}, s, transversal(k)), out);
  });
}

sol_status sol_model_graph_cosine(double amplitude, double base, double x_min, double x_max, const sol_cantor_spec* k,
                                  sol_model** out)
{
  return guard([&] {
    need(out, "out");
    sol::GraphSolenoid g{sol::Profile::cosine_well(amplitude, base), x_min, x_max};
    emit(sol::SolenoidModel(sol::Ambient{}, g, transversal(k)), out);
  });
}

sol_status sol_model_linear(int plane, int n, int k, const double* directions, const double* transversal_dir,
                            const double* offset, const double* periods, const sol_cantor_spec* spec, sol_model** out)
{
  return guard([&] {
    need(out, "out");
    need(directions, "directions");
    need(transversal_dir, "transversal_dir");
    need(offset, "offset");
    if (n < 1 || k < 1 || k > n)
      throw sol::InputError("need 1 <= k <= n");
    sol::Ambient a{plane ? sol::AmbientKind::plane : sol::AmbientKind::torus, n};
    Eigen::MatrixXd V = Eigen::Map<const Eigen::MatrixXd>(directions, n, k);
    std::vector<double> p;
    if (periods)
      p.assign(periods, periods + k);
    emit(sol::SolenoidModel::linear(a, V, Eigen::Map<const Eigen::VectorXd>(transversal_dir, n),
                                    Eigen::Map<const Eigen::VectorXd>(offset, n), transversal(spec), p),
         out);
  });
}

sol_status sol_model_subtorus(int n, int q, const int* fixed, const double* values, sol_model** out)
{
  return guard([&] {
    need(out, "out");
    emit(sol::subtorus_model(subtorus(n, q, fixed, values)), out);
  });
}

sol_status sol_model_dims(const sol_model* m, int* n, int* k)
{
  return guard([&] {
    need(m, "model");
    if (n)
      *n = m->m.ambient().n;
    if (k)
      *k = m->m.leaf_dim();
  });
}

void sol_model_free(sol_model* m)
{
  delete m;
}

sol_status sol_form_new(int n, int k, sol_form** out)
{
  return guard([&] {
    need(out, "out");
    if (n < 1 || k < 0 || k > n)
      throw sol::InputError("need 0 <= k <= n");
    *out = new sol_form{sol::DifferentialForm(n, k)};
  });
}

sol_status sol_form_add(sol_form* w, const int* index, const int* freq, double a, double b)
{
  return guard([&] {
    need(w, "form");
    need(freq, "freq");
    const int n = w->w.ambient_dim(), k = w->w.degree();
    if (k > 0)
      need(index, "index");
    std::vector<int> idx(index, index + k);
    sol::TrigPoly c(n);
    c.add_term(std::vector<int>(freq, freq + n), a, b);
    w->w.add(sol::index_from_list(idx), c);
  });
}

void sol_form_free(sol_form* w)
{
  delete w;
}

sol_status sol_evaluate_current(const sol_model* m, const sol_form* w, int quad_order, double* value)
{
  return guard([&] {
    need(m, "model");
    need(w, "form");
    need(value, "value");
    *value = sol::evaluate_current(m->m, w->w, quad(quad_order));
  });
}

sol_status sol_rs_class(const sol_model* m, int quad_order, double* coeffs, size_t capacity, size_t* count)
{
  return guard([&] {
    need(m, "model");
    const auto c = sol::rs_class(m->m, quad(quad_order));
    const auto size = static_cast<size_t>(c.coeffs.size());
    if (count)
      *count = size;
    if (capacity < size || !coeffs)
      throw BufferError("coefficient buffer too small");
    for (size_t i = 0; i < size; ++i)
      coeffs[i] = c.coeffs[static_cast<Eigen::Index>(i)];
  });
}

sol_status sol_stokes_residual(const sol_model* m, const sol_form* beta, int quad_order, double* residual)
{
  return guard([&] {
    need(m, "model");
    need(beta, "form");
    need(residual, "residual");
    *residual = sol::stokes_residual(m->m, beta->w, quad(quad_order));
  });
}

sol_status sol_pairing_exact(const sol_model* m1, const sol_model* m2, int depth, double* value)
{
  return guard([&] {
    need(m1, "m1");
    need(m2, "m2");
    need(value, "value");
    *value = sol::pairing_exact(m1->m, m2->m, depth);
  });
}

sol_status sol_pairing_via_cup(const sol_model* m1, const sol_model* m2, int quad_order, double* value)
{
  return guard([&] {
    need(m1, "m1");
    need(m2, "m2");
    need(value, "value");
    *value = sol::pairing_via_cup(m1->m, m2->m, quad(quad_order));
  });
}

sol_status sol_exhaustion(const sol_model* m1, const sol_model* m2, const double* radii, size_t count,
                          double* estimates)
{
  return guard([&] {
    need(m1, "m1");
    need(m2, "m2");
    need(radii, "radii");
    need(estimates, "estimates");
    const auto steps = sol::exhaustion_estimate(m1->m, m2->m, m1->m.leaf({}), m2->m.leaf({}),
                                                std::vector<double>(radii, radii + count));
    for (size_t i = 0; i < count; ++i)
      estimates[i] = steps[i].estimate;
  });
}

sol_status sol_mass_bound(const sol_model* m1, const sol_model* m2, int depth, int bound_depth, double* bounds,
                          int* interval_bound)
{
  return guard([&] {
    need(m1, "m1");
    need(m2, "m2");
    need(bounds, "bounds");
    const auto ts = sol::detect_tangencies(m1->m, m2->m, depth, sol::tangency_threshold, bound_depth);
    std::copy(ts.mass_bound.begin(), ts.mass_bound.end(), bounds);
    if (interval_bound)
      *interval_bound = ts.interval_bound ? 1 : 0;
  });
}

sol_status sol_ae_pairing(const sol_model* m1, const sol_model* m2, int depth, double tolerance, int null_depth,
                          double* value, double* error_bound)
{
  return guard([&] {
    need(m1, "m1");
    need(m2, "m2");
    const auto r = sol::ae_pairing(m1->m, m2->m, depth, tolerance, null_depth);
    if (value)
      *value = r.value;
    if (error_bound)
      *error_bound = r.error_bound;
  });
}

sol_status sol_perturb(const sol_model* m, int n, int q, const int* fixed, const double* values, double epsilon,
                       uint64_t seed, sol_model** out, double* min_margin, double* class_drift)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    sol::PerturbOptions o;
    o.epsilon = epsilon;
    o.seed = seed;
    auto r = sol::perturb_to_transversality(m->m, subtorus(n, q, fixed, values), o);
    if (min_margin)
      *min_margin = r.min_margin;
    if (class_drift)
      *class_drift = r.class_drift;
    emit(std::move(r.model), out);
  });
}

sol_status sol_run_scenario(const char* path, const sol_overrides* ov, int* exit_code)
{
  std::string diagnostic;
  const sol_status st = guard([&] {
    need(path, "path");
    need(exit_code, "exit_code");
    const auto r = sol::run_scenario_file(path, overrides(ov));
    *exit_code = r.exit_code;
    diagnostic = r.diagnostic;
  });
  // The scenario outcome travels in exit_code; its diagnostic stays readable.
  if (st == SOL_OK)
    last_error = diagnostic;
  return st;
}

sol_status sol_validate_scenario(const char* path, const sol_overrides* ov, char* buffer, size_t capacity,
                                 size_t* needed)
{
  return guard([&] {
    need(path, "path");
    const std::string text = sol::render_validation(sol::validate_scenario_file(path, overrides(ov)));
    if (needed)
      *needed = text.size() + 1;
    if (!buffer || capacity < text.size() + 1)
      throw BufferError("validation buffer too small");
    std::memcpy(buffer, text.c_str(), text.size() + 1);
  });
}

} // extern "C"
