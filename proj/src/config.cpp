#include "l2e/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "l2e/text.hpp"

namespace l2e {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::L2E:
      return "l2e";
    case Method::Her:
      return "her";
    case Method::Plan:
      return "plan";
    case Method::PlanIm:
      return "plan_im";
    case Method::SubgoalRl:
      return "subgoal_rl";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::L2E, Method::Her, Method::Plan, Method::PlanIm, Method::SubgoalRl}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view replay_strategy_name(ReplayStrategy s) {
  return s == ReplayStrategy::Uniform ? "uniform" : "bias";
}

ReplayStrategy parse_replay_strategy(std::string_view name) {
  if (name == "uniform") return ReplayStrategy::Uniform;
  if (name == "bias") return ReplayStrategy::Biased;
  throw std::invalid_argument("unknown replay strategy '" + std::string(name) + "'");
}

std::string_view her_strategy_name(HerStrategy s) { return s == HerStrategy::Future ? "future" : "episode"; }

HerStrategy parse_her_strategy(std::string_view name) {
  if (name == "future") return HerStrategy::Future;
  if (name == "episode") return HerStrategy::Episode;
  throw std::invalid_argument("unknown HER strategy '" + std::string(name) + "'");
}

std::string ExperimentConfig::display_label() const {
  return label.empty() ? std::string(method_name(method)) : label;
}

void ExperimentConfig::validate() const {
  env.validate();
  learner.validate();
  im.validate();
  if (total_steps < 0) throw std::invalid_argument("experiment.total_steps must be non-negative");
  if (agents < 1) throw std::invalid_argument("experiment.agents must be at least 1");
  if (replay_n == 0) throw std::invalid_argument("replay.n must be positive");
  if (replay == ReplayStrategy::Biased && replay_n > replay_m) {
    throw std::invalid_argument("replay.n must not exceed replay.m");
  }
  if (buffer_capacity == 0) throw std::invalid_argument("replay.capacity must be positive");
  if (her_k < 0) throw std::invalid_argument("her.k must be non-negative");
  if (!(sigma > 0.0)) throw std::invalid_argument("shaping.sigma must be positive");
  if (plan_density == 1) throw std::invalid_argument("plan.density must be 0 or at least 2");
  if (warmup < 0) throw std::invalid_argument("learner.warmup must be non-negative");
  if (!(updates_per_step >= 0.0)) throw std::invalid_argument("learner.updates_per_step must be non-negative");
  if (eval_interval <= 0) throw std::invalid_argument("eval.interval must be positive");
  if (eval_rollouts < 1) throw std::invalid_argument("eval.rollouts must be at least 1");
  if (im_episodes < 1) throw std::invalid_argument("im.episodes must be at least 1");
  if ((method == Method::PlanIm) && !is_pushing(env.task)) {
    throw std::invalid_argument("method plan_im needs a pushing environment");
  }
  if (env.task == Task::Maze && plan_density != 0 && plan_density != kMazePlanLength) {
    throw std::invalid_argument("maze plans are encoded in full and must keep 20 waypoints");
  }
  if (plan_density > default_plan_length(env.task)) {
    throw std::invalid_argument("plan.density exceeds the planner's plan length");
  }
}

void InverseModelConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("im.lr must be positive");
  if (batch_size == 0) throw std::invalid_argument("im.batch_size must be positive");
  if (max_epochs < 1) throw std::invalid_argument("im.max_epochs must be at least 1");
  if (patience < 1) throw std::invalid_argument("im.patience must be at least 1");
}

namespace {

struct Field {
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

const std::vector<std::pair<std::string, Field>>& fields() {
  using C = ExperimentConfig;
  static const std::vector<std::pair<std::string, Field>> table = {
      {"experiment.method", {[](const C& c) { return std::string(method_name(c.method)); },
                             [](C& c, std::string_view v) { c.method = parse_method(v); }}},
      {"experiment.label", {[](const C& c) { return c.label; },
                            [](C& c, std::string_view v) { c.label = std::string(v); }}},
      {"experiment.env", {[](const C& c) { return std::string(task_name(c.env.task)); },
                          [](C& c, std::string_view v) { c.env.task = parse_task(v); }}},
      {"experiment.total_steps", {[](const C& c) { return std::to_string(c.total_steps); },
                                  [](C& c, std::string_view v) { c.total_steps = parse_int(v); }}},
      {"experiment.agents", {[](const C& c) { return std::to_string(c.agents); },
                             [](C& c, std::string_view v) { c.agents = static_cast<int>(parse_int(v)); }}},
      {"experiment.seed", {[](const C& c) { return std::to_string(c.seed); },
                           [](C& c, std::string_view v) { c.seed = static_cast<std::uint64_t>(parse_int(v)); }}},
      {"experiment.save_replay", {[](const C& c) { return fmt_bool(c.save_replay); },
                                  [](C& c, std::string_view v) { c.save_replay = parse_bool(v); }}},

      {"env.noise", {[](const C& c) { return fmt_bool(c.env.noise); },
                     [](C& c, std::string_view v) { c.env.noise = parse_bool(v); }}},
      {"env.noise_scale", {[](const C& c) { return format_double(c.env.noise_scale); },
                           [](C& c, std::string_view v) { c.env.noise_scale = parse_double(v); }}},
      {"env.maze_noise", {[](const C& c) { return format_double(c.env.maze_noise); },
                          [](C& c, std::string_view v) { c.env.maze_noise = parse_double(v); }}},
      {"env.episode_length", {[](const C& c) { return std::to_string(c.env.episode_length); },
                              [](C& c, std::string_view v) { c.env.episode_length = static_cast<int>(parse_int(v)); }}},
      {"env.max_velocity", {[](const C& c) { return format_double(c.env.max_velocity); },
                            [](C& c, std::string_view v) { c.env.max_velocity = parse_double(v); }}},
      {"env.goal_tolerance", {[](const C& c) { return format_double(c.env.goal_tolerance); },
                              [](C& c, std::string_view v) { c.env.goal_tolerance = parse_double(v); }}},
      {"env.maze_obstacles", {[](const C& c) { return std::to_string(c.env.maze_obstacles); },
                              [](C& c, std::string_view v) { c.env.maze_obstacles = static_cast<int>(parse_int(v)); }}},

      {"replay.strategy", {[](const C& c) { return std::string(replay_strategy_name(c.replay)); },
                           [](C& c, std::string_view v) { c.replay = parse_replay_strategy(v); }}},
      {"replay.n", {[](const C& c) { return std::to_string(c.replay_n); },
                    [](C& c, std::string_view v) { c.replay_n = static_cast<std::size_t>(parse_int(v)); }}},
      {"replay.m", {[](const C& c) { return std::to_string(c.replay_m); },
                    [](C& c, std::string_view v) { c.replay_m = static_cast<std::size_t>(parse_int(v)); }}},
      {"replay.capacity", {[](const C& c) { return std::to_string(c.buffer_capacity); },
                           [](C& c, std::string_view v) { c.buffer_capacity = static_cast<std::size_t>(parse_int(v)); }}},

      {"her.strategy", {[](const C& c) { return std::string(her_strategy_name(c.her_strategy)); },
                        [](C& c, std::string_view v) { c.her_strategy = parse_her_strategy(v); }}},
      {"her.k", {[](const C& c) { return std::to_string(c.her_k); },
                 [](C& c, std::string_view v) { c.her_k = static_cast<int>(parse_int(v)); }}},

      {"shaping.sigma", {[](const C& c) { return format_double(c.sigma); },
                         [](C& c, std::string_view v) { c.sigma = parse_double(v); }}},
      {"plan.density", {[](const C& c) { return std::to_string(c.plan_density); },
                        [](C& c, std::string_view v) { c.plan_density = static_cast<std::size_t>(parse_int(v)); }}},

      {"learner.hidden", {[](const C& c) { return join_ints(c.learner.hidden); },
                          [](C& c, std::string_view v) { c.learner.hidden = parse_int_list(v); }}},
      {"learner.lr", {[](const C& c) { return format_double(c.learner.lr); },
                      [](C& c, std::string_view v) { c.learner.lr = parse_double(v); }}},
      {"learner.batch_size", {[](const C& c) { return std::to_string(c.learner.batch_size); },
                              [](C& c, std::string_view v) { c.learner.batch_size = static_cast<std::size_t>(parse_int(v)); }}},
      {"learner.gamma", {[](const C& c) { return format_double(c.learner.gamma); },
                         [](C& c, std::string_view v) { c.learner.gamma = parse_double(v); }}},
      {"learner.polyak", {[](const C& c) { return format_double(c.learner.polyak); },
                          [](C& c, std::string_view v) { c.learner.polyak = parse_double(v); }}},
      {"learner.entropy_target",
       {[](const C& c) { return c.learner.entropy_target ? format_double(*c.learner.entropy_target) : std::string("auto"); },
        [](C& c, std::string_view v) {
          if (v == "auto") {
            c.learner.entropy_target.reset();
          } else {
            c.learner.entropy_target = parse_double(v);
          }
        }}},
      {"learner.init_alpha", {[](const C& c) { return format_double(c.learner.init_alpha); },
                              [](C& c, std::string_view v) { c.learner.init_alpha = parse_double(v); }}},
      {"learner.learn_alpha", {[](const C& c) { return fmt_bool(c.learner.learn_alpha); },
                               [](C& c, std::string_view v) { c.learner.learn_alpha = parse_bool(v); }}},
      {"learner.warmup", {[](const C& c) { return std::to_string(c.warmup); },
                          [](C& c, std::string_view v) { c.warmup = parse_int(v); }}},
      {"learner.updates_per_step", {[](const C& c) { return format_double(c.updates_per_step); },
                                    [](C& c, std::string_view v) { c.updates_per_step = parse_double(v); }}},

      {"eval.interval", {[](const C& c) { return std::to_string(c.eval_interval); },
                         [](C& c, std::string_view v) { c.eval_interval = parse_int(v); }}},
      {"eval.rollouts", {[](const C& c) { return std::to_string(c.eval_rollouts); },
                         [](C& c, std::string_view v) { c.eval_rollouts = static_cast<int>(parse_int(v)); }}},

      {"im.episodes", {[](const C& c) { return std::to_string(c.im_episodes); },
                       [](C& c, std::string_view v) { c.im_episodes = static_cast<int>(parse_int(v)); }}},
      {"im.hidden", {[](const C& c) { return join_ints(c.im.hidden); },
                     [](C& c, std::string_view v) { c.im.hidden = parse_int_list(v); }}},
      {"im.lr", {[](const C& c) { return format_double(c.im.lr); },
                 [](C& c, std::string_view v) { c.im.lr = parse_double(v); }}},
      {"im.batch_size", {[](const C& c) { return std::to_string(c.im.batch_size); },
                         [](C& c, std::string_view v) { c.im.batch_size = static_cast<std::size_t>(parse_int(v)); }}},
      {"im.max_epochs", {[](const C& c) { return std::to_string(c.im.max_epochs); },
                         [](C& c, std::string_view v) { c.im.max_epochs = static_cast<int>(parse_int(v)); }}},
      {"im.patience", {[](const C& c) { return std::to_string(c.im.patience); },
                       [](C& c, std::string_view v) { c.im.patience = static_cast<int>(parse_int(v)); }}},
  };
  return table;
}

}  // namespace

std::string ExperimentConfig::text() const {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(*this) + "\n";
  return out;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::map<std::string, const Field*> index;
  for (const auto& [key, field] : fields()) index[key] = &field;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    auto it = index.find(key);
    if (it == index.end()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    try {
      it->second->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + " (" + key + "): " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace l2e
