#include "catforget/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catforget/error.hpp"
#include "catforget/ode.hpp"
#include "catforget/theory.hpp"

namespace catforget::exp {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct MeanSe {
  double mean = 0;
  double se = 0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return {nan, nan};
  double sum = 0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) {
    out.se = std::numeric_limits<double>::infinity();
    return out;
  }
  double ss = 0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return out;
}

std::vector<const sim::TrajectoryRecord*> phase_records(const sim::Trajectory& t, int phase) {
  std::vector<const sim::TrajectoryRecord*> out;
  for (const auto& rec : t) {
    if (rec.phase == phase) out.push_back(&rec);
  }
  return out;
}

// ODE samples at exactly the recorded times of one phase.
std::vector<OrderParamState> ode_on_records(const ValidatedConfig& cfg, ode::Phase phase,
                                            const OrderParamState& init,
                                            const std::vector<const sim::TrajectoryRecord*>& recs,
                                            std::int64_t every, double dt) {
  std::vector<OrderParamState> out;
  if (recs.empty()) return out;
  const ode::OdeSystem system(phase, cfg);
  ode::IntegrateOptions opts;
  opts.dt = dt;
  opts.sample_interval = cfg.time_of(every).value();
  const auto samples = ode::integrate(system, init, recs.back()->t, opts);
  if (samples.size() != recs.size()) {
    throw Error(ErrorCode::hard_gate, "ODE sample grid does not match the recording grid");
  }
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (std::abs(samples[i].t.value() - recs[i]->t.value()) > 1e-9) {
      throw Error(ErrorCode::hard_gate, "ODE sample time differs from the recorded time");
    }
    out.push_back(samples[i].state);
  }
  return out;
}

std::int64_t record_stride(const ValidatedConfig& cfg, const sim::Schedule& s) {
  return s.record_every > 0 ? s.record_every : std::max<std::int64_t>(1, std::llround(cfg.task_block() / 10.0));
}

}  // namespace

OvershootStat simulated_overshoot(const std::vector<sim::Trajectory>& runs) {
  std::vector<std::vector<double>> curves;
  for (const auto& run : runs) {
    std::vector<double> c;
    for (const auto* rec : phase_records(run, 2)) c.push_back(rec->eg1);
    if (!c.empty()) curves.push_back(std::move(c));
  }
  if (curves.empty()) return {nan, nan};
  const std::size_t len = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != len) throw Error(ErrorCode::out_of_range, "replicate trajectories differ in length");
  }
  std::size_t peak = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0;
    for (const auto& c : curves) sum += c[i];
    if (sum > best) {
      best = sum;
      peak = i;
    }
  }
  std::vector<double> diffs;
  for (const auto& c : curves) diffs.push_back(c[peak] - c.back());
  const auto ms = mean_se(diffs);
  return {ms.mean, ms.se};
}

CurveReport learning_curve_experiment(const ValidatedConfig& cfg, const sim::Schedule& schedule,
                                      const RunOptions& options) {
  CurveReport report;
  report.resolved = cfg.config();
  report.schedule = schedule;
  report.options = options;
  report.trajectories = sim::run_replicates(cfg, schedule, options.seeds, options.threads);

  const auto& first = report.trajectories.front();
  const std::int64_t every = record_stride(cfg, schedule);
  const auto rec1 = phase_records(first, 1);
  const auto rec2 = phase_records(first, 2);
  const auto ode1 = ode_on_records(cfg, ode::Phase::one, theory::phase1_state(cfg, Time(0.0)), rec1, every, options.dt);
  const auto ode2 = ode_on_records(cfg, ode::Phase::two, theory::phase2_initial_state(cfg), rec2, every, options.dt);

  const double s1 = cfg.config().sigma1_sq;
  const double s2 = cfg.config().sigma2_sq;
  auto& sum = report.summary;

  for (std::size_t i = 0; i < first.size(); ++i) {
    const auto& rec = first[i];
    CurveRow row;
    row.phase = rec.phase;
    row.step = rec.step;
    row.t = rec.t.value();

    std::vector<double> e1, e2;
    for (const auto& run : report.trajectories) {
      e1.push_back(run[i].eg1);
      e2.push_back(run[i].eg2);
    }
    const auto m1 = mean_se(e1), m2 = mean_se(e2);
    row.sim_eg1 = m1.mean;
    row.sim_eg1_se = m1.se;
    row.sim_eg2 = m2.mean;
    row.sim_eg2_se = m2.se;

    const OrderParamState* ode_state = nullptr;
    if (rec.phase == 1) {
      row.theory_eg1 = theory::eg1_phase1(cfg, rec.t);
      row.theory_eg2 = theory::eg2_phase1(cfg, rec.t);
      ode_state = &ode1[i];
    } else {
      row.theory_eg1 = theory::eg1_phase2(cfg, rec.t);
      row.theory_eg2 = theory::eg2_phase2(cfg, rec.t);
      ode_state = &ode2[i - rec1.size()];
    }
    row.ode_eg1 = ode_state->eg1(s1);
    row.ode_eg2 = ode_state->eg2(s2);

    sum.gap_theory_ode = std::max({sum.gap_theory_ode, std::abs(row.theory_eg1 - row.ode_eg1),
                                   std::abs(row.theory_eg2 - row.ode_eg2)});
    for (auto [simv, th] : {std::pair{row.sim_eg1, row.theory_eg1}, std::pair{row.sim_eg2, row.theory_eg2}}) {
      const double gap = std::abs(simv - th);
      sum.gap_theory_sim = std::max(sum.gap_theory_sim, gap);
      sum.worst_tolerance_ratio = std::max(sum.worst_tolerance_ratio, gap / std::max(0.02, 0.05 * std::abs(th)));
    }
    report.rows.push_back(row);
  }

  if (sum.gap_theory_ode > theory_ode_gate) {
    throw Error(ErrorCode::hard_gate, "theory and ODE eps curves differ by " + std::to_string(sum.gap_theory_ode));
  }

  sum.theory_class = theory::classify_overshoot(cfg);
  sum.forgetting_value = cfg.task2_stable() ? theory::forgetting_value(cfg) : nan;
  sum.sim_final_eg1 = sum.sim_final_eg1_se = nan;
  sum.sim_overshoot_margin = sum.sim_overshoot_se = nan;
  if (!rec2.empty()) {
    const auto& last = report.rows.back();
    sum.sim_final_eg1 = last.sim_eg1;
    sum.sim_final_eg1_se = last.sim_eg1_se;
    const auto stat = simulated_overshoot(report.trajectories);
    sum.sim_overshoot_margin = stat.margin;
    sum.sim_overshoot_se = stat.se;
    sum.overshoot_detected = stat.detected();
  }
  return report;
}

SweepSpec default_heatmap_sweep() {
  SweepSpec s;
  s.base = *preset("fig4");
  s.axes = {Axis{"r", 0.5, 1.0, 26}, Axis{"q", 0.0, 1.0, 26}};
  return s;
}

namespace {

sim::Schedule phase2_only(const ValidatedConfig& cfg, double duration) {
  auto s = sim::schedule_for(cfg, duration);
  if (cfg.config().t1_mode == TaskOneEndpoint::exact_copy) s.steps_task1 = 0;
  return s;
}

}  // namespace

HeatmapReport forgetting_heatmap(const SweepSpec& sweep, const RunOptions& options) {
  sweep.check();
  const auto find = [&](std::string_view name) -> const Axis& {
    for (const auto& a : sweep.axes) {
      if (a.name == name) return a;
    }
    throw Error(ErrorCode::out_of_range, "heatmap sweep needs an '" + std::string(name) + "' axis");
  };
  if (sweep.axes.size() != 2) throw Error(ErrorCode::out_of_range, "heatmap sweep takes exactly the r and q axes");
  const auto rs = find("r").values();
  const auto qs = find("q").values();

  HeatmapReport report;
  report.base = sweep.base;
  report.sweep = sweep;
  report.options = options;
  for (double r : rs) {
    for (double q : qs) {
      ContinualConfig c = sweep.base;
      c.r = r;
      c.q = q;
      c.allow_divergent = true;
      const auto v = validate(c);

      HeatmapCell cell;
      cell.r_requested = r;
      cell.r = v.r();
      cell.q = q;
      cell.sim_eg1 = cell.sim_eg1_se = nan;
      if (!v.task1_stable() || !v.task2_stable()) {
        cell.status = CellStatus::diverged;
        cell.forgetting_value = nan;
      } else {
        cell.forgetting_value = theory::forgetting_value(v);
        if (sweep.replicates > 0) {
          const auto runs = sim::run_replicates(v, phase2_only(v, options.phase_duration), sweep.replicates,
                                                options.threads);
          std::vector<double> finals;
          for (const auto& run : runs) finals.push_back(run.back().eg1);
          const auto ms = mean_se(finals);
          cell.sim_eg1 = ms.mean;
          cell.sim_eg1_se = ms.se;
        }
      }
      report.cells.push_back(cell);
    }
  }
  return report;
}

double closed_form_phase2_max(const ValidatedConfig& cfg) {
  const double horizon = 20.0 / cfg.gamma2();
  constexpr int points = 20000;
  double best = 0.0;
  for (int i = 0; i <= points; ++i) {
    best = std::max(best, theory::eg1_phase2(cfg, Time(horizon * i / points)));
  }
  return best;
}

SweepSpec default_overshoot_sweep() {
  SweepSpec s;
  s.base = *preset("fig3a");
  s.axes = {Axis{"eta", 0.5, 1.5, 11}, Axis{"r", 0.5, 1.0, 11}, Axis{"sigma2_sq", 0.5, 2.0, 16}};
  return s;
}

OvershootReport overshoot_phase_diagram(const SweepSpec& sweep, const RunOptions& options) {
  sweep.check();
  if (sweep.axes.empty()) throw Error(ErrorCode::out_of_range, "overshoot sweep needs at least one axis");

  std::vector<std::vector<double>> grids;
  for (const auto& a : sweep.axes) grids.push_back(a.values());

  OvershootReport report;
  report.base = sweep.base;
  report.sweep = sweep;
  report.options = options;

  std::vector<std::size_t> index(grids.size(), 0);
  while (true) {
    ContinualConfig c = sweep.base;
    for (std::size_t k = 0; k < grids.size(); ++k) set_field(c, sweep.axes[k].name, grids[k][index[k]]);
    c.allow_divergent = true;
    const auto v = validate(c);

    OvershootCell cell;
    cell.eta = v.config().eta;
    cell.r = v.r();
    cell.sigma2_sq = v.config().sigma2_sq;
    cell.cls = theory::classify_overshoot(v);
    cell.forgetting_value = cell.closed_form_max = nan;
    cell.sim_margin = cell.sim_margin_se = nan;
    if (cell.cls.variant != OvershootVariant::diverges) {
      cell.forgetting_value = theory::forgetting_value(v);
      cell.closed_form_max = closed_form_phase2_max(v);
      cell.closed_form_overshoot = cell.closed_form_max - cell.forgetting_value > closed_form_margin;
      if (sweep.replicates > 0 && v.task1_stable()) {
        const auto runs = sim::run_replicates(v, phase2_only(v, 20.0 / v.gamma2()), sweep.replicates,
                                              options.threads);
        const auto stat = simulated_overshoot(runs);
        cell.simulated = true;
        cell.sim_margin = stat.margin;
        cell.sim_margin_se = stat.se;
        cell.sim_overshoot = stat.detected();
      }
    }
    cell.consistent = !(cell.cls.variant == OvershootVariant::occurs && !cell.closed_form_overshoot);
    report.cells.push_back(cell);

    // Odometer over the axes, last axis fastest.
    std::size_t k = grids.size();
    while (k > 0) {
      --k;
      if (++index[k] < grids[k].size()) break;
      index[k] = 0;
      if (k == 0) return report;
    }
  }
}

std::string_view to_string(CellStatus status) { return status == CellStatus::ok ? "OK" : "DIVERGED"; }

std::optional<Format> parse_format(std::string_view text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  return std::nullopt;
}

}  // namespace catforget::exp
