#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "catforget/error.hpp"
#include "catforget/experiments.hpp"
#include "format.hpp"

namespace catforget::exp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using detail::fmt17;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::parse, "cannot write " + path.string());
  return out;
}

json config_json(const ContinualConfig& cfg) { return json::parse(config_to_json(cfg)); }

json options_json(const RunOptions& o) {
  return {{"seeds", o.seeds}, {"phase_duration", o.phase_duration}, {"dt", o.dt}};
}

json sweep_json(const SweepSpec& s) {
  json axes = json::array();
  for (const auto& a : s.axes) axes.push_back({{"name", a.name}, {"min", a.min}, {"max", a.max}, {"count", a.count}});
  return {{"axes", axes}, {"replicates", s.replicates}};
}

std::string write_json(const fs::path& dir, const std::string& name, const json& doc) {
  const auto path = dir / name;
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  return path.string();
}

fs::path prepare(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::parse, "cannot create output directory " + dir);
  return p;
}

const char* flag(bool b) { return b ? "true" : "false"; }

}  // namespace

std::vector<std::string> write_report(const CurveReport& report, const std::string& dir, Format format) {
  const auto root = prepare(dir);
  const auto& s = report.summary;
  std::vector<std::string> written;

  json summary = {
      {"gap_theory_ode", s.gap_theory_ode},
      {"gap_theory_sim", s.gap_theory_sim},
      {"worst_tolerance_ratio", s.worst_tolerance_ratio},
      {"forgetting_value", s.forgetting_value},
      {"sim_final_eg1", s.sim_final_eg1},
      {"sim_final_eg1_se", s.sim_final_eg1_se},
      {"sim_overshoot_margin", s.sim_overshoot_margin},
      {"sim_overshoot_se", s.sim_overshoot_se},
      {"overshoot_detected", s.overshoot_detected},
      {"theory_class", std::string(to_string(s.theory_class.variant))},
      {"gamma2", s.theory_class.gamma},
      {"c1", s.theory_class.c1},
      {"c2", s.theory_class.c2},
  };
  json schedule = {{"steps_task1", report.schedule.steps_task1},
                   {"steps_task2", report.schedule.steps_task2},
                   {"record_every", report.schedule.record_every}};

  if (format == Format::json) {
    json rows = json::array();
    for (const auto& r : report.rows) {
      rows.push_back({{"phase", r.phase}, {"step", r.step}, {"t", r.t}, {"sim_eg1", r.sim_eg1},
                      {"sim_eg1_se", r.sim_eg1_se}, {"sim_eg2", r.sim_eg2}, {"sim_eg2_se", r.sim_eg2_se},
                      {"theory_eg1", r.theory_eg1}, {"theory_eg2", r.theory_eg2}, {"ode_eg1", r.ode_eg1},
                      {"ode_eg2", r.ode_eg2}});
    }
    json trajectories = json::array();
    for (const auto& run : report.trajectories) {
      for (const auto& rec : run) {
        json row = {{"phase", rec.phase}, {"step", rec.step}, {"t", rec.t.value()},
                    {"eg1", rec.eg1},     {"eg2", rec.eg2},   {"seed", rec.seed}};
        const auto values = rec.order.to_array();
        const auto& names = OrderParamState::names();
        for (std::size_t i = 0; i < values.size(); ++i) row[std::string(names[i])] = values[i];
        trajectories.push_back(row);
      }
    }
    written.push_back(write_json(root, "curve.json",
                                 {{"config", config_json(report.resolved)},
                                  {"schedule", schedule},
                                  {"options", options_json(report.options)},
                                  {"rows", rows},
                                  {"summary", summary},
                                  {"trajectories", trajectories}}));
    return written;
  }

  {
    const auto path = root / "curve.csv";
    auto out = open_out(path);
    out << "phase,step,t,sim_eg1,sim_eg1_se,sim_eg2,sim_eg2_se,theory_eg1,theory_eg2,ode_eg1,ode_eg2\n";
    for (const auto& r : report.rows) {
      out << r.phase << ',' << r.step << ',' << fmt17(r.t) << ',' << fmt17(r.sim_eg1) << ','
          << fmt17(r.sim_eg1_se) << ',' << fmt17(r.sim_eg2) << ',' << fmt17(r.sim_eg2_se) << ','
          << fmt17(r.theory_eg1) << ',' << fmt17(r.theory_eg2) << ',' << fmt17(r.ode_eg1) << ','
          << fmt17(r.ode_eg2) << '\n';
    }
    written.push_back(path.string());
  }
  {
    const auto path = root / "curve_summary.csv";
    auto out = open_out(path);
    const auto& c = report.resolved;
    out << "n,r,q,eta,sigma1_sq,sigma2_sq,sigma_b1,sigma_b2,sigma_j,seed,seeds,t1_mode,steps_task1,steps_task2,"
           "record_every,dt,gap_theory_ode,gap_theory_sim,worst_tolerance_ratio,forgetting_value,sim_final_eg1,"
           "sim_final_eg1_se,sim_overshoot_margin,sim_overshoot_se,overshoot_detected,theory_class,gamma2,c1,c2\n";
    out << c.n << ',' << fmt17(c.r) << ',' << fmt17(c.q) << ',' << fmt17(c.eta) << ',' << fmt17(c.sigma1_sq) << ','
        << fmt17(c.sigma2_sq) << ',' << fmt17(c.sigma_b1) << ',' << fmt17(c.sigma_b2) << ',' << fmt17(c.sigma_j)
        << ',' << c.seed << ',' << report.options.seeds << ',' << to_string(c.t1_mode) << ','
        << report.schedule.steps_task1 << ',' << report.schedule.steps_task2 << ',' << report.schedule.record_every
        << ',' << fmt17(report.options.dt) << ',' << fmt17(s.gap_theory_ode) << ',' << fmt17(s.gap_theory_sim)
        << ',' << fmt17(s.worst_tolerance_ratio) << ',' << fmt17(s.forgetting_value) << ','
        << fmt17(s.sim_final_eg1) << ',' << fmt17(s.sim_final_eg1_se) << ',' << fmt17(s.sim_overshoot_margin)
        << ',' << fmt17(s.sim_overshoot_se) << ',' << flag(s.overshoot_detected) << ','
        << to_string(s.theory_class.variant) << ',' << fmt17(s.theory_class.gamma) << ','
        << fmt17(s.theory_class.c1) << ',' << fmt17(s.theory_class.c2) << '\n';
    written.push_back(path.string());
  }
  {
    const auto path = root / "trajectories.csv";
    auto out = open_out(path);
    sim::write_trajectory_header(out);
    for (const auto& run : report.trajectories) sim::write_trajectory_csv(out, run);
    written.push_back(path.string());
  }
  written.push_back(write_json(root, "resolved_config.json",
                               {{"config", config_json(report.resolved)},
                                {"schedule", schedule},
                                {"options", options_json(report.options)}}));
  return written;
}

std::vector<std::string> write_report(const HeatmapReport& report, const std::string& dir, Format format) {
  const auto root = prepare(dir);
  std::vector<std::string> written;
  if (format == Format::json) {
    json cells = json::array();
    for (const auto& c : report.cells) {
      cells.push_back({{"r_requested", c.r_requested}, {"r", c.r}, {"q", c.q},
                       {"status", std::string(to_string(c.status))}, {"forgetting_value", c.forgetting_value},
                       {"sim_eg1", c.sim_eg1}, {"sim_eg1_se", c.sim_eg1_se}});
    }
    written.push_back(write_json(root, "heatmap.json",
                                 {{"config", config_json(report.base)},
                                  {"sweep", sweep_json(report.sweep)},
                                  {"options", options_json(report.options)},
                                  {"cells", cells}}));
    return written;
  }
  const auto path = root / "heatmap.csv";
  auto out = open_out(path);
  out << "r_requested,r,q,status,forgetting_value,sim_eg1,sim_eg1_se\n";
  for (const auto& c : report.cells) {
    out << fmt17(c.r_requested) << ',' << fmt17(c.r) << ',' << fmt17(c.q) << ',' << to_string(c.status) << ','
        << fmt17(c.forgetting_value) << ',' << fmt17(c.sim_eg1) << ',' << fmt17(c.sim_eg1_se) << '\n';
  }
  written.push_back(path.string());
  written.push_back(write_json(root, "resolved_config.json",
                               {{"config", config_json(report.base)},
                                {"sweep", sweep_json(report.sweep)},
                                {"options", options_json(report.options)}}));
  return written;
}

std::vector<std::string> write_report(const OvershootReport& report, const std::string& dir, Format format) {
  const auto root = prepare(dir);
  std::vector<std::string> written;
  if (format == Format::json) {
    json cells = json::array();
    for (const auto& c : report.cells) {
      cells.push_back({{"eta", c.eta},
                       {"r", c.r},
                       {"sigma2_sq", c.sigma2_sq},
                       {"gamma2", c.cls.gamma},
                       {"c1", c.cls.c1},
                       {"c2", c.cls.c2},
                       {"class", std::string(to_string(c.cls.variant))},
                       {"forgetting_value", c.forgetting_value},
                       {"closed_form_max", c.closed_form_max},
                       {"closed_form_overshoot", c.closed_form_overshoot},
                       {"simulated", c.simulated},
                       {"sim_overshoot", c.sim_overshoot},
                       {"sim_margin", c.sim_margin},
                       {"sim_margin_se", c.sim_margin_se},
                       {"consistent", c.consistent}});
    }
    written.push_back(write_json(root, "overshoot.json",
                                 {{"config", config_json(report.base)},
                                  {"sweep", sweep_json(report.sweep)},
                                  {"options", options_json(report.options)},
                                  {"cells", cells}}));
    return written;
  }
  const auto path = root / "overshoot.csv";
  auto out = open_out(path);
  out << "eta,r,sigma2_sq,gamma2,c1,c2,class,forgetting_value,closed_form_max,closed_form_overshoot,simulated,"
         "sim_overshoot,sim_margin,sim_margin_se,consistent\n";
  for (const auto& c : report.cells) {
    out << fmt17(c.eta) << ',' << fmt17(c.r) << ',' << fmt17(c.sigma2_sq) << ',' << fmt17(c.cls.gamma) << ','
        << fmt17(c.cls.c1) << ',' << fmt17(c.cls.c2) << ',' << to_string(c.cls.variant) << ','
        << fmt17(c.forgetting_value) << ',' << fmt17(c.closed_form_max) << ',' << flag(c.closed_form_overshoot)
        << ',' << flag(c.simulated) << ',' << flag(c.sim_overshoot) << ',' << fmt17(c.sim_margin) << ','
        << fmt17(c.sim_margin_se) << ',' << flag(c.consistent) << '\n';
  }
  written.push_back(path.string());
  written.push_back(write_json(root, "resolved_config.json",
                               {{"config", config_json(report.base)},
                                {"sweep", sweep_json(report.sweep)},
                                {"options", options_json(report.options)}}));
  return written;
}

}  // namespace catforget::exp
