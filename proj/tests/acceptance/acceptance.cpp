// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "catforget/error.hpp"
#include "catforget/experiments.hpp"
#include "catforget/ode.hpp"
#include "catforget/simulator.hpp"
#include "catforget/theory.hpp"

using namespace catforget;
namespace th = catforget::theory;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = budget_s <= 0 || secs < budget_s;
  const bool pass = o.pass && in_time;
  failures += pass ? 0 : 1;
  std::printf("[%s] %d. %s: %s; %.1f s", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  if (budget_s > 0) std::printf(" (budget %.0f s)", budget_s);
  std::printf("\n");
  std::fflush(stdout);
}

ValidatedConfig preset(const char* name) { return validate(*exp::preset(name)); }

// Sup gap between RK4 and the closed forms over [0, 10], both phases, every
// evolved order parameter and both errors.
double oracle_gap(const ValidatedConfig& cfg) {
  double worst = 0;
  const double s1 = cfg.config().sigma1_sq, s2 = cfg.config().sigma2_sq;
  for (auto phase : {ode::Phase::one, ode::Phase::two}) {
    const ode::OdeSystem sys(phase, cfg);
    const bool one = phase == ode::Phase::one;
    const auto init = one ? th::phase1_state(cfg, Time(0)) : th::phase2_initial_state(cfg);
    for (const auto& s : ode::integrate(sys, init, Time(10.0), {1e-3, 0.01})) {
      const auto ref = one ? th::phase1_state(cfg, s.t) : th::phase2_order_params(cfg, s.t);
      for (auto m : sys.components()) worst = std::max(worst, std::abs(s.state.*m - ref.*m));
      const double e1 = one ? th::eg1_phase1(cfg, s.t) : th::eg1_phase2(cfg, s.t);
      const double e2 = one ? th::eg2_phase1(cfg, s.t) : th::eg2_phase2(cfg, s.t);
      worst = std::max({worst, std::abs(s.state.eg1(s1) - e1), std::abs(s.state.eg2(s2) - e2)});
    }
  }
  return worst;
}

sim::Schedule phase2_only(const ValidatedConfig& cfg, double duration) {
  auto s = sim::schedule_for(cfg, duration);
  s.steps_task1 = 0;
  return s;
}

// Sup over phase-2 records of |seed mean eg1 - closed form|.
double phase2_sup_gap(const ValidatedConfig& cfg, int seeds, double duration) {
  const auto runs = sim::run_replicates(cfg, phase2_only(cfg, duration), seeds);
  double worst = 0;
  for (std::size_t i = 0; i < runs.front().size(); ++i) {
    double mean = 0;
    for (const auto& r : runs) mean += r[i].eg1;
    mean /= static_cast<double>(runs.size());
    worst = std::max(worst, std::abs(mean - th::eg1_phase2(cfg, runs.front()[i].t)));
  }
  return worst;
}

}  // namespace

int main() {
  criterion(1, "closed form vs RK4 (dt=1e-3, t in [0,10])", 10, [] {
    const double a = oracle_gap(preset("fig3a"));
    const double b = oracle_gap(preset("fig3b-text"));
    return Outcome{a < 1e-8 && b < 1e-8, fmt("sup gap fig3a %.3g, fig3b-text %.3g (< 1e-8)", a, b)};
  });

  criterion(2, "forgetting value, fig3a", 60, [] {
    const auto cfg = preset("fig3a");
    const double analytic = th::forgetting_value(cfg);
    const auto runs = sim::run_replicates(cfg, phase2_only(cfg, 8.0), 10);
    double mean = 0;
    for (const auto& r : runs) mean += r.back().eg1;
    mean /= static_cast<double>(runs.size());
    const bool ok = std::abs(analytic - 0.336) < 1e-12 && std::abs(mean - 0.336) <= 0.02;
    return Outcome{ok, fmt("analytic %.6f, simulated final eg1 %.4f (N=3000, 10 seeds, target 0.336 +- 0.02)",
                           analytic, mean)};
  });

  criterion(3, "learning curves, fig3a", 60, [] {
    const auto cfg = preset("fig3a");
    exp::RunOptions o;
    o.seeds = 10;
    const auto report = exp::learning_curve_experiment(cfg, sim::schedule_for(cfg, 8.0), o);
    const auto& s = report.summary;
    return Outcome{s.worst_tolerance_ratio <= 1.0,
                   fmt("%zu grid points, max gap %.4f, worst gap / tolerance %.3f (<= 1)", report.rows.size(),
                       s.gap_theory_sim, s.worst_tolerance_ratio)};
  });

  criterion(4, "overshoot, fig3b-text", 0, [] {
    const auto cfg = preset("fig3b-text");
    const auto cls = th::classify_overshoot(cfg);
    const double margin = exp::closed_form_phase2_max(cfg) - th::forgetting_value(cfg);
    const auto runs = sim::run_replicates(cfg, phase2_only(cfg, 8.0), 10);
    const auto stat = exp::simulated_overshoot(runs);
    const bool ok = cls.variant == OvershootVariant::occurs && std::abs(cls.gamma - 1.36) < 1e-12 &&
                    margin > 0 && stat.detected();
    return Outcome{ok, fmt("class %s (gamma2 %.2f), closed-form max - limit %.4f, simulated margin %.4f +- %.4f",
                           std::string(to_string(cls.variant)).c_str(), cls.gamma, margin, stat.margin, stat.se)};
  });

  criterion(5, "trivial identities", 0, [] {
    double worst_r = 0, worst_q = 0, worst_t0 = 0;
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      ContinualConfig c;
      c.n = 1000;
      c.r = 0.5 + 0.5 * u(gen);
      c.q = -1 + 2 * u(gen);
      c.eta = 0.2 + 1.3 * u(gen);
      c.sigma_b1 = 2 * u(gen);
      c.sigma_b2 = 2 * u(gen);
      c.sigma_j = 3 * u(gen);
      c.sigma1_sq = (0.05 + 1.9 * u(gen)) / (c.eta * c.r);
      c.sigma2_sq = (0.05 + 1.9 * u(gen)) / (c.eta * c.r);
      worst_t0 = std::max(worst_t0, std::abs(th::eg1_phase2(validate(c), Time(0))));

      auto half = c;
      half.r = 0.5;
      half.sigma1_sq = half.sigma2_sq = 1;
      worst_r = std::max(worst_r, std::abs(th::forgetting_value(validate(half))));

      auto same = c;
      same.q = 1;
      same.sigma_b2 = same.sigma_b1;
      worst_q = std::max(worst_q, std::abs(th::forgetting_value(validate(same))));
    }
    const bool ok = worst_r == 0 && worst_q <= 1e-15 && worst_t0 < 1e-12;
    return Outcome{ok, fmt("max |eps'| at r=0.5 %.3g, at q=1 %.3g; max |eg1_phase2(0)| %.3g over 1000 configs",
                           worst_r, worst_q, worst_t0)};
  });

  criterion(6, "heatmap monotonicity (26x26)", 0, [] {
    const auto report = exp::forgetting_heatmap(exp::default_heatmap_sweep(), exp::RunOptions{});
    int violations = 0;
    const int n = 26;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double v = report.cells[i * n + j].forgetting_value;
        if (j > 0 && v > report.cells[i * n + j - 1].forgetting_value) ++violations;
        if (i > 0 && v < report.cells[(i - 1) * n + j].forgetting_value) ++violations;
        if (!std::isfinite(v)) ++violations;
      }
    }
    return Outcome{violations == 0 && report.cells.size() == 676u,
                   fmt("%zu cells, %d violations", report.cells.size(), violations)};
  });

  criterion(7, "finite-size scaling", 300, [] {
    const std::vector<double> ns{1500, 3000, 6000};
    std::vector<double> gaps;
    for (double n : ns) {
      ContinualConfig c = *exp::preset("fig3a");
      c.n = static_cast<std::int64_t>(n);
      gaps.push_back(phase2_sup_gap(validate(c), 20, 8.0));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const double x = std::log(ns[i]), y = std::log(gaps[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double k = static_cast<double>(ns.size());
    const double alpha = -(k * sxy - sx * sy) / (k * sxx - sx * sx);
    return Outcome{alpha >= 0.3 && alpha <= 0.7,
                   fmt("sup gaps %.4g, %.4g, %.4g at N=1500, 3000, 6000; alpha %.3f (in [0.3, 0.7])", gaps[0],
                       gaps[1], gaps[2], alpha)};
  });

  criterion(8, "divergence guard", 0, [] {
    ContinualConfig c;
    c.n = 4;
    c.r = 1;
    c.sigma2_sq = 2.5;
    bool rejected = false;
    try {
      validate(c);
    } catch (const Error& e) {
      rejected = e.code() == ErrorCode::divergent;
    }
    c.allow_divergent = true;
    const auto cfg = validate(c);
    Rng teachers(0, Stream::teachers), student(0, Stream::student), data(0, Stream::task_data);
    auto t = sim::gen_teachers(cfg, teachers);
    sim::WeightTriple w{t.b1, t.b2, sim::gen_student(cfg, student)};
    std::int64_t step = 0;
    bool non_finite = false;
    try {
      for (; step < 10000; ++step) sim::sgd_step(w, sim::Task::two, cfg, data);
    } catch (const Error& e) {
      non_finite = e.code() == ErrorCode::non_finite;
    }
    return Outcome{rejected && non_finite,
                   fmt("validate %s gamma2=2.5; with the flag NON_FINITE %s (step %lld, N=4)",
                       rejected ? "rejects" : "accepts", non_finite ? "raised" : "not raised",
                       static_cast<long long>(step))};
  });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
