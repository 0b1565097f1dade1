#ifndef SOLENOID_SCENARIO_HPP
#define SOLENOID_SCENARIO_HPP

#include "solenoid/currents.hpp"
#include "solenoid/forms.hpp"
#include "solenoid/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sol {

enum class Task {
  current_eval,
  rs_class,
  stokes_check,
  homotopy_check,
  pairing,
  exhaustion,
  thom_pairing,
  ae_pairing,
  perturb,
  tangency_demo
};

std::string task_name(Task t);

struct ScenarioOverrides {
  std::optional<int> depth;
  std::optional<int> quad_order;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

struct RandomForms {
  int count = 0;
  int degree = 0;
  int max_freq = 2;
};

struct CertificateSpec {
  int count = 0;
  double sup_norm = 0.01;
  int depth = 8;
};

/// Parsed scenario file.  Model fields hold built models; `model_keys`
/// records which model specs were present for the validator.
struct Scenario {
  std::string name;
  Task task = Task::current_eval;
  Ambient ambient;
  std::vector<SolenoidModel> models;
  std::vector<DifferentialForm> forms;
  RandomForms random_forms;
  std::optional<Subtorus> submanifold;
  std::vector<PerturbationTerm> homotopy;
  LeafRef leaf1, leaf2;
  std::vector<double> radii;
  std::vector<double> rho;
  std::vector<double> epsilon;
  CertificateSpec certificate;
  int depth = 8;
  int null_depth = -1;
  int max_depth = 12;
  QuadratureSpec quad;
  std::uint64_t seed = 0;
  double tolerance = 1e-6;
  int retries = 100;
  std::string output;
};

/// Throws InputError naming the offending key.
Scenario parse_scenario(const std::string& text, const std::string& name, const ScenarioOverrides& ov = {});
Scenario load_scenario(const std::string& path, const ScenarioOverrides& ov = {});

using Summary = std::vector<std::pair<std::string, std::string>>;

struct SequenceRow {
  int step = 0;
  double parameter = 0.0;
  double value = 0.0;
  std::optional<double> error_bound;
};

struct RunReport {
  int exit_code = 0;
  std::string diagnostic;
  Summary summary;
  std::vector<SequenceRow> sequence;
};

/// Executes the task.  Refusals become exit code 2 with the summary kept.
RunReport execute(const Scenario& s);

std::string format_number(double x);
std::string render_summary(const Summary& s);
std::string render_sequence(const std::vector<SequenceRow>& rows);

/// Loads, executes and writes summary.txt (and sequence.csv when the task
/// produces one) below the output directory.  Returns the exit code.
RunReport run_scenario_file(const std::string& path, const ScenarioOverrides& ov = {});

struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Schema and model invariant checks; never throws.
std::vector<ValidationCheck> validate_scenario_file(const std::string& path, const ScenarioOverrides& ov = {});
std::string render_validation(const std::vector<ValidationCheck>& checks);

} // namespace sol

#endif
