#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "l2e/harness.hpp"
#include "l2e/planmdp.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace l2e;

namespace {

py::tuple vec2(Vec2 v) { return py::make_tuple(v.x, v.y); }

py::array_t<double> waypoints(const Plan& p) {
  py::array_t<double> out({p.size(), p.dim()});
  std::copy(p.flat().begin(), p.flat().end(), out.mutable_data());
  return out;
}

py::list obstacles(const ObstacleSet& set) {
  py::list out;
  for (const Rect& r : set) out.append(py::make_tuple(vec2(r.center), vec2(r.half)));
  return out;
}

py::dict step_dict(const StepResult& r) {
  return py::dict("state"_a = r.state.vector(), "reward"_a = r.reward, "done"_a = r.done,
                  "success"_a = r.success, "truncated"_a = r.truncated);
}

py::dict reset_dict(const ResetResult& r) {
  return py::dict("state"_a = r.state.vector(), "goal"_a = vec2(r.goal), "obstacles"_a = obstacles(r.obstacles));
}

py::dict eval_dict(const EvalRecord& e) {
  return py::dict("step"_a = e.step, "success_rate"_a = e.success_rate, "successes"_a = e.successes);
}

}  // namespace

PYBIND11_MODULE(_l2e, m) {
  m.doc() = "Plan-conditioned reinforcement learning with final-volume-preserving reward shaping";

  py::class_<Rng>(m, "Generator")
      .def(py::init([](std::uint64_t seed, std::uint64_t stream) { return make_rng(seed, stream); }), "seed"_a,
           "stream"_a = 0)
      .def("uniform", [](Rng& r, double lo, double hi) { return uniform(r, lo, hi); });

  py::enum_<Task>(m, "Task")
      .value("BASIC_PUSHING", Task::BasicPushing)
      .value("OBSTACLE_PUSHING", Task::ObstaclePushing)
      .value("MAZE", Task::Maze);
  m.def("parse_task", [](const std::string& s) { return parse_task(s); });
  m.def("task_name", [](Task t) { return std::string(task_name(t)); });

  py::class_<EnvConfig>(m, "EnvConfig")
      .def(py::init([](Task task, bool noise) {
             EnvConfig c;
             c.task = task;
             c.noise = noise;
             c.validate();
             return c;
           }),
           "task"_a = Task::BasicPushing, "noise"_a = true)
      .def_readwrite("task", &EnvConfig::task)
      .def_readwrite("noise", &EnvConfig::noise)
      .def_readwrite("episode_length", &EnvConfig::episode_length)
      .def_readwrite("goal_tolerance", &EnvConfig::goal_tolerance)
      .def_readwrite("max_velocity", &EnvConfig::max_velocity);

  py::class_<Env>(m, "Env")
      .def_property_readonly("task", &Env::task)
      .def_property_readonly("state_dim", &Env::state_dim)
      .def_property_readonly("action_dim", &Env::action_dim)
      .def_property_readonly("action_bound", &Env::action_bound)
      .def_property_readonly("state", [](const Env& e) { return e.state().vector(); })
      .def_property_readonly("goal", [](const Env& e) { return vec2(e.goal()); })
      .def_property_readonly("obstacles", [](const Env& e) { return obstacles(e.obstacles()); })
      .def("reset", [](Env& e, Rng& rng) { return reset_dict(e.reset(rng)); }, "rng"_a)
      .def("step", [](Env& e, const std::vector<double>& a, Rng& rng) { return step_dict(e.step(a, rng)); },
           "action"_a, "rng"_a)
      .def("clamp_action", [](const Env& e, const std::vector<double>& a) { return e.clamp_action(a); })
      .def("set_state", [](Env& e, const std::vector<double>& s) { e.set_state(State(s)); });
  m.def("make_env", &make_env, "config"_a);

  py::class_<Plan>(m, "Plan")
      .def_property_readonly("task", &Plan::task)
      .def_property_readonly("dim", &Plan::dim)
      .def_property_readonly("goal", [](const Plan& p) { return vec2(p.goal()); })
      .def_property_readonly("waypoints", &waypoints)
      .def_property_readonly("intermediate",
                             [](const Plan& p) -> py::object {
                               if (!p.meta().intermediate) return py::none();
                               return vec2(*p.meta().intermediate);
                             })
      .def("achieved", [](const Plan& p, std::size_t i) { return vec2(p.achieved(i)); })
      .def("__len__", &Plan::size)
      .def("__eq__", [](const Plan& a, const Plan& b) { return a == b; })
      .def("serialize", &serialize_plan)
      .def("subsample", &subsample_plan, "n"_a);
  m.def("parse_plan", [](const std::string& s) { return parse_plan(s); });
  m.def("encode_plan", &encode_plan, "plan"_a, "task"_a);

  py::class_<ShapingConfig>(m, "ShapingConfig")
      .def_readonly("sigma", &ShapingConfig::sigma)
      .def_readonly("distance_mask", &ShapingConfig::distance_mask)
      .def_readonly("goal_tolerance", &ShapingConfig::goal_tolerance);
  m.def("make_shaping_config", &make_shaping_config, "task"_a, "sigma"_a = 0.5, "goal_tolerance"_a = 0.1);
  m.def(
      "fv_shaping",
      [](const std::vector<double>& s, const std::vector<double>& a, const std::vector<double>& s2, const Plan& p,
         const ShapingConfig& c) { return fv_shaping(s, a, s2, p, c); },
      "state"_a, "action"_a, "next_state"_a, "plan"_a, "shaping"_a);
  m.def(
      "plan_reward",
      [](const std::vector<double>& s, const std::vector<double>& a, const std::vector<double>& s2, const Plan& p,
         const ShapingConfig& c) { return plan_reward(s, a, s2, p, c); },
      "state"_a, "action"_a, "next_state"_a, "plan"_a, "shaping"_a);
  m.def(
      "nearest_index",
      [](const std::vector<double>& s, const Plan& p, const ShapingConfig& c) {
        return nearest_index(s, p, c.distance_mask);
      },
      "state"_a, "plan"_a, "shaping"_a);

  py::class_<PlanMdp>(m, "PlanMdp")
      .def(py::init([](const EnvConfig& env, double sigma, std::size_t density) {
             return PlanMdp(env, PlanMdpOptions{sigma, density});
           }),
           "env"_a, "sigma"_a = 0.5, "density"_a = 0)
      .def("sample_task",
           [](PlanMdp& mdp, Rng& rng) {
             TaskSample t = mdp.sample_task(rng);
             return py::make_tuple(t.state.vector(), t.plan);
           })
      .def("shaped_step",
           [](PlanMdp& mdp, const std::vector<double>& a, const Plan& p, Rng& rng) {
             return step_dict(mdp.shaped_step(a, p, rng));
           })
      .def("encode", &PlanMdp::encode)
      .def_property_readonly("latent_dim", &PlanMdp::latent_dim)
      .def_property_readonly("shaping", &PlanMdp::shaping)
      .def_property_readonly("env", py::overload_cast<>(&PlanMdp::env), py::return_value_policy::reference_internal);

  m.def(
      "direct_execute",
      [](const Plan& p, Env& env, const ShapingConfig& c, Rng& rng) {
        const RolloutResult r = direct_execute(p, env, c, rng);
        return py::dict("success"_a = r.success, "steps"_a = r.steps);
      },
      "plan"_a, "env"_a, "shaping"_a, "rng"_a);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_static("parse", [](const std::string& s) { return ExperimentConfig::parse(s); })
      .def_static("load", &ExperimentConfig::load)
      .def("text", &ExperimentConfig::text)
      .def("hash", &ExperimentConfig::hash)
      .def_property_readonly("method", [](const ExperimentConfig& c) { return std::string(method_name(c.method)); })
      .def_property_readonly("task", [](const ExperimentConfig& c) { return c.env.task; })
      .def_readwrite("total_steps", &ExperimentConfig::total_steps)
      .def_readwrite("agents", &ExperimentConfig::agents)
      .def_readwrite("warmup", &ExperimentConfig::warmup)
      .def_readwrite("eval_interval", &ExperimentConfig::eval_interval)
      .def_readwrite("eval_rollouts", &ExperimentConfig::eval_rollouts);

  m.def(
      "train",
      [](const ExperimentConfig& cfg, std::uint64_t seed, const std::string& out) {
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train(cfg, seed, TrainOptions{out, {}});
        }
        py::list evals;
        for (const auto& e : r.evals) evals.append(eval_dict(e));
        return py::dict("evals"_a = evals, "steps"_a = r.steps, "episodes"_a = r.episodes,
                        "updates"_a = r.updates, "buffer_size"_a = r.buffer_size, "stored_plans"_a = r.stored_plans);
      },
      "config"_a, "seed"_a = 0, "out"_a = "");
  m.def(
      "evaluate_checkpoint",
      [](const std::filesystem::path& ckpt, int rollouts, std::uint64_t seed) {
        py::gil_scoped_release release;
        return evaluate_checkpoint(ckpt, std::nullopt, rollouts, seed);
      },
      "checkpoint"_a, "rollouts"_a = 30, "seed"_a = 0);
  m.def(
      "summarize",
      [](const std::vector<std::vector<bool>>& per_agent) {
        const SuccessSummary s = summarize(per_agent);
        return py::dict("mean"_a = s.mean, "std_of_mean"_a = s.std_of_mean, "agents"_a = s.agents,
                        "rollouts"_a = s.rollouts);
      },
      "per_agent"_a);
}
