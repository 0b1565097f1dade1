// solenoid run|validate <scenario.json> [--depth D] [--quad-order Q] [--seed S] [--out DIR]
#include "solenoid/solenoid.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

struct Flags {
  std::string file;
  int depth = -1;
  int quad_order = -1;
  long long seed = -1;
  std::string out;
};

void add_flags(CLI::App* cmd, Flags& f)
{
  cmd->add_option("file", f.file, "scenario file")->required();
  cmd->add_option("--depth", f.depth, "cylinder depth override")->check(CLI::NonNegativeNumber);
  cmd->add_option("--quad-order", f.quad_order, "leaf quadrature order override")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "random seed override")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", f.out, "output directory override");
}

sol_overrides to_overrides(const Flags& f)
{
  sol_overrides ov;
  sol_overrides_default(&ov);
  ov.depth = f.depth;
  ov.quad_order = f.quad_order;
  if (f.seed >= 0) {
    ov.has_seed = 1;
    ov.seed = static_cast<uint64_t>(f.seed);
  }
  ov.out_dir = f.out.empty() ? nullptr : f.out.c_str();
  return ov;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Ruelle-Sullivan currents and intersections of solenoids"};
  app.require_subcommand(1);
  Flags run_flags, validate_flags;
  auto* run = app.add_subcommand("run", "execute a scenario and write its reports");
  auto* validate = app.add_subcommand("validate", "check a scenario and its models without running the task");
  add_flags(run, run_flags);
  add_flags(validate, validate_flags);
  app.add_flag_callback("--version", [] {
    std::printf("solenoid %s\n", sol_version());
    throw CLI::Success();
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (run->parsed()) {
    const sol_overrides ov = to_overrides(run_flags);
    int code = 1;
    if (sol_run_scenario(run_flags.file.c_str(), &ov, &code) != SOL_OK) {
      std::fprintf(stderr, "error: %s\n", sol_last_error());
      return 1;
    }
    if (code != 0)
      std::fprintf(stderr, "%s: %s\n", code == 2 ? "refused" : "error", sol_last_error());
    return code;
  }

  const sol_overrides ov = to_overrides(validate_flags);
  size_t needed = 0;
  sol_validate_scenario(validate_flags.file.c_str(), &ov, nullptr, 0, &needed);
  std::vector<char> buf(needed ? needed : 1);
  if (sol_validate_scenario(validate_flags.file.c_str(), &ov, buf.data(), buf.size(), &needed) != SOL_OK) {
    std::fprintf(stderr, "error: %s\n", sol_last_error());
    return 0;
  }
  std::fputs(buf.data(), stdout);
  return 0;
}
