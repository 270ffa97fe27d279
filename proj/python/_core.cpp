#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <string>

#include "catforget/config.hpp"
#include "catforget/error.hpp"
#include "catforget/experiments.hpp"
#include "catforget/ode.hpp"
#include "catforget/simulator.hpp"
#include "catforget/theory.hpp"

namespace py = pybind11;
using namespace catforget;

namespace {

py::dict state_dict(const OrderParamState& s) {
  py::dict d;
  const auto values = s.to_array();
  for (std::size_t i = 0; i < values.size(); ++i) d[py::str(std::string(OrderParamState::names()[i]))] = values[i];
  return d;
}

py::dict summary_dict(const exp::CurveSummary& s) {
  py::dict d;
  d["gap_theory_ode"] = s.gap_theory_ode;
  d["gap_theory_sim"] = s.gap_theory_sim;
  d["worst_tolerance_ratio"] = s.worst_tolerance_ratio;
  d["forgetting_value"] = s.forgetting_value;
  d["sim_final_eg1"] = s.sim_final_eg1;
  d["sim_final_eg1_se"] = s.sim_final_eg1_se;
  d["sim_overshoot_margin"] = s.sim_overshoot_margin;
  d["sim_overshoot_se"] = s.sim_overshoot_se;
  d["overshoot_detected"] = s.overshoot_detected;
  d["theory_class"] = std::string(to_string(s.theory_class.variant));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-task teacher-student forgetting: closed forms, RK4 oracle and online SGD";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (message, code name)
      PyErr_SetObject(error.ptr(), py::make_tuple(e.what(), std::string(to_string(e.code()))).ptr());
    }
  });

  py::enum_<TaskOneEndpoint>(m, "TaskOneEndpoint")
      .value("TRAINED", TaskOneEndpoint::trained)
      .value("EXACT_COPY", TaskOneEndpoint::exact_copy);

  py::enum_<OvershootVariant>(m, "OvershootVariant")
      .value("MAY_NOT_OCCUR", OvershootVariant::may_not_occur)
      .value("DOES_NOT_OCCUR", OvershootVariant::does_not_occur)
      .value("OCCURS", OvershootVariant::occurs)
      .value("DIVERGES", OvershootVariant::diverges);

  py::class_<ContinualConfig>(m, "ContinualConfig")
      .def(py::init<>())
      .def_readwrite("n", &ContinualConfig::n)
      .def_readwrite("r", &ContinualConfig::r)
      .def_readwrite("q", &ContinualConfig::q)
      .def_readwrite("eta", &ContinualConfig::eta)
      .def_readwrite("sigma1_sq", &ContinualConfig::sigma1_sq)
      .def_readwrite("sigma2_sq", &ContinualConfig::sigma2_sq)
      .def_readwrite("sigma_b1", &ContinualConfig::sigma_b1)
      .def_readwrite("sigma_b2", &ContinualConfig::sigma_b2)
      .def_readwrite("sigma_j", &ContinualConfig::sigma_j)
      .def_readwrite("seed", &ContinualConfig::seed)
      .def_readwrite("t1_mode", &ContinualConfig::t1_mode)
      .def_readwrite("allow_divergent", &ContinualConfig::allow_divergent)
      .def_readwrite("exact_similarity", &ContinualConfig::exact_similarity)
      .def("to_json", [](const ContinualConfig& c) { return config_to_json(c); })
      .def_static("from_json", [](const std::string& text) { return config_from_json(text); })
      .def(py::self == py::self)
      .def("__repr__", [](const ContinualConfig& c) { return "ContinualConfig(" + config_to_json(c, -1) + ")"; });

  py::class_<ValidatedConfig>(m, "ValidatedConfig")
      .def_property_readonly("config", &ValidatedConfig::config)
      .def_property_readonly("n", &ValidatedConfig::n)
      .def_property_readonly("r", &ValidatedConfig::r)
      .def_property_readonly("r_requested", &ValidatedConfig::r_requested)
      .def_property_readonly("task_block", &ValidatedConfig::task_block)
      .def_property_readonly("common_block", &ValidatedConfig::common_block)
      .def_property_readonly("gamma1", &ValidatedConfig::gamma1)
      .def_property_readonly("gamma2", &ValidatedConfig::gamma2)
      .def_property_readonly("task1_stable", &ValidatedConfig::task1_stable)
      .def_property_readonly("task2_stable", &ValidatedConfig::task2_stable)
      .def_property_readonly("ill_conditioned", &ValidatedConfig::ill_conditioned);

  m.def("validate", &validate, py::arg("config"));
  m.def("preset", [](const std::string& name) {
    auto c = exp::preset(name);
    if (!c) throw Error(ErrorCode::parse, "unknown preset '" + name + "'");
    return *c;
  });
  m.def("preset_names", [] {
    std::vector<std::string> out;
    for (auto n : exp::preset_names()) out.emplace_back(n);
    return out;
  });

  py::class_<OrderParamState>(m, "OrderParamState")
      .def(py::init<>())
      .def_readwrite("q1", &OrderParamState::q1)
      .def_readwrite("q2", &OrderParamState::q2)
      .def_readwrite("q12", &OrderParamState::q12)
      .def_readwrite("r1_1", &OrderParamState::r1_1)
      .def_readwrite("r2_1", &OrderParamState::r2_1)
      .def_readwrite("r1_2", &OrderParamState::r1_2)
      .def_readwrite("r2_2", &OrderParamState::r2_2)
      .def_readwrite("r12_1", &OrderParamState::r12_1)
      .def_readwrite("r12_2", &OrderParamState::r12_2)
      .def_readwrite("t1_1", &OrderParamState::t1_1)
      .def_readwrite("t2_2", &OrderParamState::t2_2)
      .def_readwrite("t12_1", &OrderParamState::t12_1)
      .def_readwrite("t12_2", &OrderParamState::t12_2)
      .def_readwrite("q_prime", &OrderParamState::q_prime)
      .def("eg1", &OrderParamState::eg1, py::arg("sigma1_sq"))
      .def("eg2", &OrderParamState::eg2, py::arg("sigma2_sq"))
      .def("as_dict", &state_dict);

  py::class_<OvershootClass>(m, "OvershootClass")
      .def_readonly("variant", &OvershootClass::variant)
      .def_readonly("gamma", &OvershootClass::gamma)
      .def_readonly("c1", &OvershootClass::c1)
      .def_readonly("c2", &OvershootClass::c2);

  auto theory = m.def_submodule("theory", "Closed-form dynamics");
  using Fn = double (*)(const ValidatedConfig&, Time);
  auto wrap = [&](const char* name, Fn f) {
    theory.def(name, [f](const ValidatedConfig& c, double t) { return f(c, Time(t)); }, py::arg("config"),
               py::arg("t"));
  };
  wrap("eg1_phase1", &theory::eg1_phase1);
  wrap("eg2_phase1", &theory::eg2_phase1);
  wrap("eg1_phase2", &theory::eg1_phase2);
  wrap("eg2_phase2", &theory::eg2_phase2);
  wrap("eg1_phase2_derivative", &theory::eg1_phase2_derivative);
  theory.def("phase1_state", [](const ValidatedConfig& c, double t) { return theory::phase1_state(c, Time(t)); });
  theory.def("phase2_order_params",
             [](const ValidatedConfig& c, double t) { return theory::phase2_order_params(c, Time(t)); });
  theory.def("phase2_initial_state", &theory::phase2_initial_state);
  theory.def("forgetting_value", &theory::forgetting_value);
  theory.def("overshoot_constants", [](const ValidatedConfig& c) {
    const auto k = theory::overshoot_constants(c);
    return py::make_tuple(k.c1, k.c2);
  });
  theory.def("classify_overshoot", py::overload_cast<const ValidatedConfig&>(&theory::classify_overshoot));

  m.def(
      "integrate",
      [](int phase, const ValidatedConfig& cfg, const OrderParamState& init, double t_end, double dt,
         double sample_interval) {
        if (phase != 1 && phase != 2) throw Error(ErrorCode::out_of_range, "phase must be 1 or 2");
        const ode::OdeSystem sys(phase == 1 ? ode::Phase::one : ode::Phase::two, cfg);
        py::list out;
        for (const auto& s : ode::integrate(sys, init, Time(t_end), {dt, sample_interval})) {
          out.append(py::make_tuple(s.t.value(), s.state));
        }
        return out;
      },
      py::arg("phase"), py::arg("config"), py::arg("init"), py::arg("t_end"), py::arg("dt") = 1e-3,
      py::arg("sample_interval") = 0.01, "RK4 samples as a list of (t, OrderParamState)");

  py::class_<sim::TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("phase", &sim::TrajectoryRecord::phase)
      .def_readonly("step", &sim::TrajectoryRecord::step)
      .def_property_readonly("t", [](const sim::TrajectoryRecord& r) { return r.t.value(); })
      .def_readonly("eg1", &sim::TrajectoryRecord::eg1)
      .def_readonly("eg2", &sim::TrajectoryRecord::eg2)
      .def_readonly("order", &sim::TrajectoryRecord::order)
      .def_readonly("seed", &sim::TrajectoryRecord::seed);

  m.def(
      "run_continual",
      [](const ValidatedConfig& cfg, std::int64_t steps_task1, std::int64_t steps_task2, std::int64_t record_every) {
        py::gil_scoped_release release;
        return sim::run_continual(cfg, sim::Schedule{steps_task1, steps_task2, record_every});
      },
      py::arg("config"), py::arg("steps_task1"), py::arg("steps_task2"), py::arg("record_every") = 0);

  m.def(
      "learning_curve",
      [](const ValidatedConfig& cfg, double duration, int seeds, double dt) {
        exp::RunOptions o;
        o.seeds = seeds;
        o.phase_duration = duration;
        o.dt = dt;
        exp::CurveReport report;
        {
          py::gil_scoped_release release;
          report = exp::learning_curve_experiment(cfg, sim::schedule_for(cfg, duration), o);
        }
        py::list rows;
        for (const auto& r : report.rows) {
          py::dict d;
          d["phase"] = r.phase;
          d["step"] = r.step;
          d["t"] = r.t;
          d["sim_eg1"] = r.sim_eg1;
          d["sim_eg1_se"] = r.sim_eg1_se;
          d["sim_eg2"] = r.sim_eg2;
          d["sim_eg2_se"] = r.sim_eg2_se;
          d["theory_eg1"] = r.theory_eg1;
          d["theory_eg2"] = r.theory_eg2;
          d["ode_eg1"] = r.ode_eg1;
          d["ode_eg2"] = r.ode_eg2;
          rows.append(d);
        }
        return py::make_tuple(rows, summary_dict(report.summary));
      },
      py::arg("config"), py::arg("duration") = 8.0, py::arg("seeds") = 10, py::arg("dt") = 1e-3,
      "Returns (rows, summary)");

  m.def(
      "forgetting_heatmap",
      [](const ContinualConfig& base, std::pair<double, double> r_range, std::pair<double, double> q_range,
         int r_count, int q_count) {
        exp::SweepSpec s;
        s.base = base;
        s.axes = {exp::Axis{"r", r_range.first, r_range.second, r_count},
                  exp::Axis{"q", q_range.first, q_range.second, q_count}};
        py::list out;
        for (const auto& c : exp::forgetting_heatmap(s, exp::RunOptions{}).cells) {
          py::dict d;
          d["r_requested"] = c.r_requested;
          d["r"] = c.r;
          d["q"] = c.q;
          d["status"] = std::string(exp::to_string(c.status));
          d["forgetting_value"] = c.forgetting_value;
          out.append(d);
        }
        return out;
      },
      py::arg("base"), py::arg("r_range") = std::pair{0.5, 1.0}, py::arg("q_range") = std::pair{0.0, 1.0},
      py::arg("r_count") = 26, py::arg("q_count") = 26, "Analytic forgetting values, r-major");
}
