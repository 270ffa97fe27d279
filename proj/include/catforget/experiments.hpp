#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "catforget/config.hpp"
#include "catforget/simulator.hpp"
#include "catforget/types.hpp"

namespace catforget::exp {

/// Named parameter sets: fig3a, fig3b-caption, fig3b-text, fig4.
std::optional<ContinualConfig> preset(std::string_view name);
std::vector<std::string_view> preset_names();

struct Axis {
  std::string name;  // a numeric ContinualConfig field
  double min = 0;
  double max = 0;
  int count = 1;

  /// Inclusive uniform grid.
  std::vector<double> values() const;
};

/// Parses "name:min:max:count".
Axis parse_axis(std::string_view text);

/// Writes `value` into the named numeric field. Throws Error(out_of_range)
/// for names that are not sweepable fields.
void set_field(ContinualConfig& cfg, std::string_view name, double value);

struct SweepSpec {
  std::vector<Axis> axes;
  ContinualConfig base;
  int replicates = 0;  // 0 = analytic only
  std::string output_path;

  /// Throws Error(out_of_range) for unknown fields, count < 1, min > max or
  /// duplicate axes.
  void check() const;
};

struct RunOptions {
  int seeds = 10;
  double phase_duration = 8.0;  // time units per task
  double dt = 1e-3;
  int threads = 0;
};

// --- learning curves -------------------------------------------------------

struct CurveRow {
  int phase = 1;
  std::int64_t step = 0;
  double t = 0;
  double sim_eg1 = 0, sim_eg1_se = 0;
  double sim_eg2 = 0, sim_eg2_se = 0;
  double theory_eg1 = 0, theory_eg2 = 0;
  double ode_eg1 = 0, ode_eg2 = 0;
};

struct CurveSummary {
  double gap_theory_ode = 0;        // sup over rows and both errors
  double gap_theory_sim = 0;        // sup absolute gap
  double worst_tolerance_ratio = 0; // sup of |gap| / max(0.02, 0.05 |theory|)
  double forgetting_value = 0;      // NaN when gamma2 >= 2
  double sim_final_eg1 = 0, sim_final_eg1_se = 0;
  double sim_overshoot_margin = 0;  // mean (max - final) of the phase-2 eg1
  double sim_overshoot_se = 0;
  bool overshoot_detected = false;  // margin > 3 standard errors
  OvershootClass theory_class;
};

struct CurveReport {
  ContinualConfig resolved;
  sim::Schedule schedule;
  RunOptions options;
  std::vector<CurveRow> rows;
  CurveSummary summary;
  std::vector<sim::Trajectory> trajectories;
};

inline constexpr double theory_ode_gate = 1e-8;

/// Joins seed-averaged simulation, closed forms and the RK4 oracle on the
/// recording grid of both phases. Throws Error(hard_gate) if theory and ODE
/// differ by more than 1e-8 on any row.
CurveReport learning_curve_experiment(const ValidatedConfig& cfg, const sim::Schedule& schedule,
                                      const RunOptions& options);

// --- forgetting heatmap ----------------------------------------------------

enum class CellStatus { ok, diverged };
std::string_view to_string(CellStatus status);

struct HeatmapCell {
  double r_requested = 0;
  double r = 0;
  double q = 0;
  CellStatus status = CellStatus::ok;
  double forgetting_value = 0;  // NaN when diverged
  double sim_eg1 = 0, sim_eg1_se = 0;  // NaN unless simulated
};

struct HeatmapReport {
  ContinualConfig base;
  SweepSpec sweep;
  RunOptions options;
  std::vector<HeatmapCell> cells;  // r-major
};

/// Default sweep: 26 x 26 over r in [0.5, 1], q in [0, 1] on the fig4 preset.
SweepSpec default_heatmap_sweep();

HeatmapReport forgetting_heatmap(const SweepSpec& sweep, const RunOptions& options);

// --- overshoot phase diagram -------------------------------------------------

struct OvershootCell {
  double eta = 0, r = 0, sigma2_sq = 0;
  OvershootClass cls;
  double forgetting_value = 0;   // NaN when diverged
  double closed_form_max = 0;    // NaN when diverged
  bool closed_form_overshoot = false;
  bool simulated = false;
  bool sim_overshoot = false;
  double sim_margin = 0, sim_margin_se = 0;
  /// false only when the theory says OCCURS and the closed-form curve does
  /// not exceed the forgetting value.
  bool consistent = true;
};

struct OvershootReport {
  ContinualConfig base;
  SweepSpec sweep;
  RunOptions options;
  std::vector<OvershootCell> cells;
};

inline constexpr double closed_form_margin = 1e-9;

/// Maximum of eg1_phase2 over a dense grid on [0, 20/gamma2].
double closed_form_phase2_max(const ValidatedConfig& cfg);

/// Default sweep over eta in [0.5, 1.5], r in [0.5, 1], sigma2_sq in [0.5, 2]
/// with fig3a as the base.
SweepSpec default_overshoot_sweep();

OvershootReport overshoot_phase_diagram(const SweepSpec& sweep, const RunOptions& options);

/// Paired overshoot statistic for phase-2 eg1 across seeds: per seed,
/// eg1(t*) - eg1(final) where t* maximizes the seed-mean curve.
struct OvershootStat {
  double margin = 0;
  double se = 0;
  bool detected() const { return margin > 3.0 * se; }
};
OvershootStat simulated_overshoot(const std::vector<sim::Trajectory>& runs);

// --- report output ---------------------------------------------------------

enum class Format { csv, json };
std::optional<Format> parse_format(std::string_view text);

/// Writes the report into `dir` (created if missing) and returns the paths
/// written. CSV output is accompanied by resolved_config.json.
std::vector<std::string> write_report(const CurveReport& report, const std::string& dir, Format format);
std::vector<std::string> write_report(const HeatmapReport& report, const std::string& dir, Format format);
std::vector<std::string> write_report(const OvershootReport& report, const std::string& dir, Format format);

}  // namespace catforget::exp
