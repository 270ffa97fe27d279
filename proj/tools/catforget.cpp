// catforget: learning curves, forgetting heatmaps and overshoot phase diagrams
// for two-task continual learning in the linear teacher-student model.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "catforget/config.hpp"
#include "catforget/error.hpp"
#include "catforget/experiments.hpp"
#include "catforget/theory.hpp"

namespace {

using namespace catforget;

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_validation = 2;
constexpr int exit_gate = 3;

struct CommonArgs {
  std::string config_path;
  std::string preset_name;
  std::string out_dir = "out";
  int seeds = 10;
  std::string format = "csv";
  double duration = 8.0;
  double dt = 1e-3;
  int threads = 0;
  std::vector<std::string> axes;
  bool simulate = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Flat JSON config; keys override the preset");
  cmd->add_option("--preset", args.preset_name, "fig3a | fig3b-caption | fig3b-text | fig4");
  cmd->add_option("--out", args.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--seeds", args.seeds, "Replicate count (seeds cfg.seed, cfg.seed+1, ...)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--format", args.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd->add_option("--threads", args.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

ContinualConfig resolve_config(const CommonArgs& args, std::string_view default_preset) {
  const std::string name = args.preset_name.empty() ? std::string(default_preset) : args.preset_name;
  auto base = exp::preset(name);
  if (!base) throw Error(ErrorCode::parse, "unknown preset '" + name + "'");
  if (!args.config_path.empty()) return load_config(args.config_path, *base);
  return *base;
}

exp::RunOptions run_options(const CommonArgs& args) {
  exp::RunOptions o;
  o.seeds = args.seeds;
  o.phase_duration = args.duration;
  o.dt = args.dt;
  o.threads = args.threads;
  return o;
}

void print_written(const std::vector<std::string>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p << '\n';
}

int run_curve(const CommonArgs& args) {
  const auto cfg = validate(resolve_config(args, "fig3a"));
  const auto schedule = sim::schedule_for(cfg, args.duration);
  const auto report = exp::learning_curve_experiment(cfg, schedule, run_options(args));
  print_written(exp::write_report(report, args.out_dir, *exp::parse_format(args.format)));
  const auto& s = report.summary;
  std::cout << "theory-ode gap " << s.gap_theory_ode << ", theory-sim gap " << s.gap_theory_sim
            << ", forgetting value " << s.forgetting_value << ", overshoot "
            << (s.overshoot_detected ? "detected" : "not detected") << " (theory "
            << to_string(s.theory_class.variant) << ")\n";
  return exit_ok;
}

exp::SweepSpec sweep_from(const CommonArgs& args, exp::SweepSpec spec, std::string_view default_preset) {
  if (!args.preset_name.empty() || !args.config_path.empty()) spec.base = resolve_config(args, default_preset);
  if (!args.axes.empty()) {
    spec.axes.clear();
    for (const auto& text : args.axes) spec.axes.push_back(exp::parse_axis(text));
  }
  spec.replicates = args.simulate ? args.seeds : 0;
  spec.output_path = args.out_dir;
  spec.check();
  return spec;
}

int run_heatmap(const CommonArgs& args) {
  const auto spec = sweep_from(args, exp::default_heatmap_sweep(), "fig4");
  const auto report = exp::forgetting_heatmap(spec, run_options(args));
  print_written(exp::write_report(report, args.out_dir, *exp::parse_format(args.format)));
  return exit_ok;
}

int run_overshoot(const CommonArgs& args) {
  const auto spec = sweep_from(args, exp::default_overshoot_sweep(), "fig3a");
  const auto report = exp::overshoot_phase_diagram(spec, run_options(args));
  print_written(exp::write_report(report, args.out_dir, *exp::parse_format(args.format)));
  std::size_t inconsistent = 0;
  for (const auto& c : report.cells) inconsistent += c.consistent ? 0 : 1;
  std::cout << report.cells.size() << " cells, " << inconsistent
            << " where OCCURS has no closed-form overshoot within the horizon\n";
  return exit_ok;
}

int run_validate(const CommonArgs& args) {
  const auto cfg = validate(resolve_config(args, "fig3a"));
  if (args.format == "json") {
    std::cout << config_to_json(cfg.config()) << '\n';
  } else {
    std::cout << "r_requested," << cfg.r_requested() << "\nr," << cfg.r() << "\ntask_block," << cfg.task_block()
              << "\ncommon_block," << cfg.common_block() << "\ngamma1," << cfg.gamma1() << "\ngamma2,"
              << cfg.gamma2() << "\nstable," << (cfg.task1_stable() && cfg.task2_stable() ? "true" : "false")
              << "\nill_conditioned," << (cfg.ill_conditioned() ? "true" : "false") << "\novershoot,"
              << to_string(theory::classify_overshoot(cfg).variant) << '\n';
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Catastrophic forgetting in two-task teacher-student learning"};
  app.require_subcommand(1);

  CommonArgs args;
  auto* curve = app.add_subcommand("curve", "Learning curves: simulation vs closed form vs ODE");
  auto* heatmap = app.add_subcommand("heatmap", "Forgetting value over an (r, q) grid");
  auto* overshoot = app.add_subcommand("overshoot", "Overshoot classification over a parameter grid");
  auto* check = app.add_subcommand("validate", "Validate and print the resolved config");
  for (auto* cmd : {curve, heatmap, overshoot, check}) add_common(cmd, args);
  for (auto* cmd : {curve, heatmap, overshoot}) {
    cmd->add_option("--duration", args.duration, "Time units per task")->capture_default_str();
  }
  curve->add_option("--dt", args.dt, "RK4 step")->capture_default_str();
  for (auto* cmd : {heatmap, overshoot}) {
    cmd->add_option("--axis", args.axes, "Sweep axis name:min:max:count (repeatable)");
    cmd->add_flag("--simulate", args.simulate, "Add simulated values with --seeds replicates per cell");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_validation;
  }

  try {
    if (curve->parsed()) return run_curve(args);
    if (heatmap->parsed()) return run_heatmap(args);
    if (overshoot->parsed()) return run_overshoot(args);
    return run_validate(args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::out_of_range:
      case ErrorCode::divergent:
      case ErrorCode::unquantizable:
      case ErrorCode::parse:
        return exit_validation;
      case ErrorCode::hard_gate:
        return exit_gate;
      case ErrorCode::non_finite:
        return exit_failure;
    }
    return exit_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_failure;
  }
}
