#include "l2e/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "l2e/checkpoint.hpp"
#include "l2e/text.hpp"

namespace l2e {

namespace {

// Random streams of one agent.
enum Stream : std::uint64_t {
  kTaskStream = 1,
  kActionStream = 2,
  kLearnStream = 3,
  kReplayStream = 4,
  kInitStream = 5,
  kImStream = 6,
  kEvalTaskStream = 101,
  kEvalNoiseStream = 102,
};

constexpr const char* kMetricsColumns = "step episodes success_rate critic1 critic2 actor temperature alpha";

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<double> concat(std::span<const double> a, Vec2 g) {
  std::vector<double> out(a.begin(), a.end());
  out.push_back(g.x);
  out.push_back(g.y);
  return out;
}

PlanMdpOptions mdp_options(const ExperimentConfig& cfg) {
  PlanMdpOptions o;
  o.sigma = cfg.sigma;
  o.plan_density = cfg.plan_density;
  return o;
}

bool uses_learner(Method m) { return m == Method::L2E || m == Method::Her || m == Method::SubgoalRl; }

std::size_t cond_dim(const ExperimentConfig& cfg) {
  return cfg.method == Method::L2E ? latent_dim(cfg.env.task) : 2;
}

// Policies used for evaluation. Every rollout draws its task from the task
// stream first, so all evaluation points of a run see the same tasks.
struct Evaluator {
  const ExperimentConfig& cfg;
  const Sac* agent = nullptr;
  const InverseModel* im = nullptr;

  std::vector<bool> run(int rollouts, std::uint64_t seed) const {
    PlanMdp mdp(cfg.env, mdp_options(cfg));
    Env& env = mdp.env();
    Rng task_rng = make_rng(seed, kEvalTaskStream);
    Rng noise_rng = make_rng(seed, kEvalNoiseStream);
    std::vector<bool> out;
    for (int m = 0; m < rollouts; ++m) {
      if (cfg.method == Method::Her) {
        env.reset(task_rng);
        out.push_back(goal_rollout(env, noise_rng));
        continue;
      }
      const TaskSample task = mdp.sample_task(task_rng);
      switch (cfg.method) {
        case Method::L2E:
          out.push_back(plan_rollout(mdp, task.plan, noise_rng));
          break;
        case Method::Plan:
          out.push_back(direct_execute(task.plan, env, mdp.shaping(), noise_rng).success);
          break;
        case Method::PlanIm:
          out.push_back(im_execute(task.plan, *im, env, mdp.shaping(), noise_rng).success);
          break;
        case Method::SubgoalRl:
          out.push_back(subgoal_rollout(env, task.plan, noise_rng));
          break;
        case Method::Her:
          break;
      }
    }
    return out;
  }

  bool plan_rollout(PlanMdp& mdp, const Plan& plan, Rng& rng) const {
    Env& env = mdp.env();
    const std::vector<double> enc = mdp.encode(plan);
    while (env.elapsed() < cfg.env.episode_length) {
      const Action a = agent->act(concat(env.state().values(), enc), true, rng);
      const StepResult r = env.step(a, rng);
      if (r.success) return true;
      if (r.done) return false;
    }
    return false;
  }

  bool goal_rollout(Env& env, Rng& rng) const {
    while (env.elapsed() < cfg.env.episode_length) {
      const Action a = agent->act(concat(env.state().values(), env.goal()), true, rng);
      const StepResult r = env.step(a, rng);
      if (r.success) return true;
      if (r.done) return false;
    }
    return false;
  }

  bool subgoal_rollout(Env& env, const Plan& plan, Rng& rng) const {
    SubgoalTracker tracker(plan);
    while (env.elapsed() < cfg.env.episode_length) {
      const Action a = subgoal_policy_step(tracker, env.state(), env.task(), *agent, true, rng);
      const StepResult r = env.step(a, rng);
      if (r.success) return true;
      if (r.done) return false;
    }
    return false;
  }
};

struct LossAverage {
  SacLosses sum;
  int count = 0;

  void add(const SacLosses& l) {
    sum.critic1 += l.critic1;
    sum.critic2 += l.critic2;
    sum.actor += l.actor;
    sum.temperature += l.temperature;
    sum.alpha += l.alpha;
    ++count;
  }
  SacLosses take() {
    SacLosses out;
    if (count > 0) {
      out.critic1 = sum.critic1 / count;
      out.critic2 = sum.critic2 / count;
      out.actor = sum.actor / count;
      out.temperature = sum.temperature / count;
      out.alpha = sum.alpha / count;
    }
    *this = {};
    return out;
  }
};

class RunFiles {
 public:
  RunFiles(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& out)
      : out_(out), start_(std::chrono::steady_clock::now()) {
    if (out_.empty()) return;
    std::filesystem::create_directories(out_);
    std::ofstream(out_ / "config.txt") << cfg.text();
    metrics_.open(out_ / "metrics.txt", std::ios::trunc);
    evals_.open(out_ / "evals.txt", std::ios::trunc);
    timing_.open(out_ / "timing.txt", std::ios::trunc);
    if (!metrics_ || !evals_ || !timing_) throw std::runtime_error("cannot write metrics in " + out_.string());
    metrics_ << "# l2e-metrics v1 config_hash=" << cfg.hash() << " label=" << cfg.display_label()
             << " method=" << method_name(cfg.method) << " env=" << task_name(cfg.env.task)
             << " seed=" << seed << "\n"
             << kMetricsColumns << "\n";
    evals_ << "# step successes\n";
    timing_ << "# step wall_seconds\n";
  }

  const std::filesystem::path& dir() const { return out_; }
  bool enabled() const { return !out_.empty(); }

  void record(const EvalRecord& r) {
    if (!enabled()) return;
    metrics_ << r.step << ' ' << r.episodes << ' ' << format_double(r.success_rate) << ' '
             << format_double(r.losses.critic1) << ' ' << format_double(r.losses.critic2) << ' '
             << format_double(r.losses.actor) << ' ' << format_double(r.losses.temperature) << ' '
             << format_double(r.losses.alpha) << '\n';
    metrics_.flush();
    evals_ << r.step << ' ';
    for (bool s : r.successes) evals_ << (s ? '1' : '0');
    evals_ << '\n';
    evals_.flush();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    timing_ << r.step << ' ' << wall << '\n';
    timing_.flush();
  }

 private:
  std::filesystem::path out_;
  std::ofstream metrics_, evals_, timing_;
  std::chrono::steady_clock::time_point start_;
};

std::map<std::string, std::string> checkpoint_meta(const ExperimentConfig& cfg, std::uint64_t seed,
                                                   std::int64_t step) {
  return {{"config", cfg.text()}, {"seed", std::to_string(seed)}, {"step", std::to_string(step)}};
}

// Rollout of one training episode for the learned methods. Returns the
// episode's transitions with rewards for the conditioning it was collected
// under; the caller stores them.
struct Collector {
  const ExperimentConfig& cfg;
  Sac& agent;
  Rng& act_rng;
  Rng& env_rng;

  Action choose(const std::vector<double>& obs, std::int64_t step, const Env& env) {
    if (step < cfg.warmup) {
      Action a(env.action_dim());
      for (auto& v : a) v = uniform(act_rng, -env.action_bound(), env.action_bound());
      return a;
    }
    return agent.act(obs, false, act_rng);
  }

  Transition make(const State& s, const Action& a, const StepResult& r, const Env& env) {
    Transition t;
    t.state = s.vector();
    t.action = env.clamp_action(a);
    t.reward = r.reward;
    t.next_state = r.state.vector();
    t.absorbing = env.absorbing(r.state);
    return t;
  }

  Episode l2e(PlanMdp& mdp, const Plan& plan, const std::vector<double>& enc, std::int64_t step,
              std::int64_t limit) {
    Env& env = mdp.env();
    Episode ep;
    const Vec2 goal = goal_of(plan);
    while (env.elapsed() < cfg.env.episode_length && static_cast<std::int64_t>(ep.size()) < limit) {
      const State s = env.state();
      const Action a = choose(concat(s.values(), enc), step + static_cast<std::int64_t>(ep.size()), env);
      const StepResult r = mdp.shaped_step(a, plan, env_rng);
      Transition t = make(s, a, r, env);
      t.success = goal_reward(t.next_state, goal, mdp.shaping()) == 1.0;
      ep.push_back(std::move(t));
      if (r.done) break;
    }
    return ep;
  }

  Episode goal(Env& env, const ShapingConfig& shaping, std::int64_t step, std::int64_t limit,
               SubgoalTracker* tracker) {
    Episode ep;
    while (env.elapsed() < cfg.env.episode_length && static_cast<std::int64_t>(ep.size()) < limit) {
      const State s = env.state();
      const Vec2 g = tracker ? tracker->update(achieved_goal(env.task(), s.values())) : env.goal();
      const Action a = choose(concat(s.values(), g), step + static_cast<std::int64_t>(ep.size()), env);
      const StepResult r = env.step(a, env_rng);
      Transition t = make(s, a, r, env);
      t.goal = g;
      t.reward = goal_reward(t.next_state, g, shaping);
      t.success = t.reward == 1.0;
      ep.push_back(std::move(t));
      if (r.done) break;
    }
    return ep;
  }
};

TrainResult train_fixed(const ExperimentConfig& cfg, std::uint64_t seed, RunFiles& files) {
  TrainResult result;
  std::optional<InverseModel> im;
  if (cfg.method == Method::PlanIm) {
    auto env = make_env(cfg.env);
    Rng data_rng = make_rng(seed, kImStream);
    Rng init_rng = make_rng(seed, kInitStream);
    const ImDataset data = collect_im_data(*env, cfg.im_episodes, data_rng);
    im.emplace(env->state_dim(), env->action_dim(), env->action_bound(), cfg.im, init_rng);
    im->fit(data, data_rng);
    if (files.enabled()) im->save(files.dir() / "inverse_model.bin");
  }
  Evaluator ev{cfg, nullptr, im ? &*im : nullptr};
  EvalRecord rec;
  rec.successes = ev.run(cfg.eval_rollouts, seed);
  rec.success_rate = summarize({rec.successes}).mean;
  files.record(rec);
  result.evals.push_back(std::move(rec));
  return result;
}

TrainResult train_learned(const ExperimentConfig& cfg, std::uint64_t seed, RunFiles& files,
                          const TrainOptions& options) {
  PlanMdp mdp(cfg.env, mdp_options(cfg));
  Env& env = mdp.env();
  const ShapingConfig& shaping = mdp.shaping();
  const std::size_t S = env.state_dim();
  const std::size_t A = env.action_dim();
  const std::size_t C = cond_dim(cfg);

  Rng task_rng = make_rng(seed, kTaskStream);
  Rng act_rng = make_rng(seed, kActionStream);
  Rng learn_rng = make_rng(seed, kLearnStream);
  Rng replay_rng = make_rng(seed, kReplayStream);
  Rng init_rng = make_rng(seed, kInitStream);

  Sac agent(S + C, A, env.action_bound(), cfg.learner, init_rng);
  ReplayBuffer buffer(cfg.buffer_capacity, S, A, C);
  Collector collect{cfg, agent, act_rng, task_rng};
  Evaluator ev{cfg, &agent, nullptr};

  TrainResult result;
  LossAverage losses;
  std::int64_t steps = 0;
  int episodes = 0;
  double update_credit = 0.0;

  auto evaluate_now = [&]() {
    EvalRecord rec;
    rec.step = steps;
    rec.episodes = episodes;
    rec.successes = ev.run(cfg.eval_rollouts, seed);
    rec.success_rate = summarize({rec.successes}).mean;
    rec.losses = losses.take();
    files.record(rec);
    if (files.enabled()) agent.save(files.dir() / "checkpoint.bin", checkpoint_meta(cfg, seed, steps));
    result.evals.push_back(std::move(rec));
  };

  evaluate_now();
  std::int64_t next_eval = cfg.eval_interval;

  while (steps < cfg.total_steps) {
    const std::int64_t limit = cfg.total_steps - steps;
    Episode ep;
    if (cfg.method == Method::L2E) {
      const TaskSample task = mdp.sample_task(task_rng);
      const std::vector<double> enc = mdp.encode(task.plan);
      ep = collect.l2e(mdp, task.plan, enc, steps, limit);
      buffer.add_episode(ep, task.plan, enc);
      const std::vector<PlanId> replay =
          cfg.replay == ReplayStrategy::Uniform
              ? uniform_replay_plans(buffer.plans(), cfg.replay_n, replay_rng)
              : biased_replay_plans(buffer.plans(), ep, cfg.replay_n, cfg.replay_m, shaping, replay_rng);
      for (PlanId id : replay) buffer.plans().retain(id);
      for (PlanId id : replay) buffer.add(relabel_episode(ep, id, buffer.plans().plan(id), shaping));
      for (PlanId id : replay) buffer.plans().release(id);
    } else {
      std::optional<SubgoalTracker> tracker;
      if (cfg.method == Method::SubgoalRl) {
        const TaskSample task = mdp.sample_task(task_rng);
        tracker.emplace(task.plan);
      } else {
        env.reset(task_rng);
      }
      ep = collect.goal(env, shaping, steps, limit, tracker ? &*tracker : nullptr);
      buffer.add(ep);
      Episode relabeled;
      for (const HerReplayGoal& g : her_replay_goals(ep, cfg.her_strategy, cfg.her_k, shaping, replay_rng)) {
        relabeled.push_back(her_relabel(ep[g.transition], g.goal, shaping));
      }
      buffer.add(relabeled);
    }

    const std::int64_t before = steps;
    steps += static_cast<std::int64_t>(ep.size());
    ++episodes;

    const std::int64_t learn_steps = steps - std::max(before, cfg.warmup);
    if (learn_steps > 0) {
      update_credit += cfg.updates_per_step * static_cast<double>(learn_steps);
      while (update_credit >= 1.0) {
        update_credit -= 1.0;
        const Batch batch = buffer.sample(cfg.learner.batch_size, learn_rng);
        try {
          losses.add(agent.update(batch, learn_rng));
        } catch (const NonFiniteLoss& e) {
          if (files.enabled()) {
            agent.save(files.dir() / "halt_checkpoint.bin", checkpoint_meta(cfg, seed, steps));
            std::ofstream(files.dir() / "halt.txt") << "step " << steps << ": " << e.what() << "\n";
          }
          throw;
        }
      }
    }
    if (options.on_episode) options.on_episode(steps, episodes);
    if (steps >= next_eval) {
      evaluate_now();
      while (next_eval <= steps) next_eval += cfg.eval_interval;
    }
  }
  if (result.evals.back().step != steps) evaluate_now();

  if (cfg.save_replay && files.enabled()) buffer.save(files.dir() / "replay.bin");
  result.steps = steps;
  result.episodes = episodes;
  result.buffer_size = buffer.size();
  result.stored_plans = buffer.plans().size();
  result.updates = agent.updates();
  return result;
}

}  // namespace

TrainResult train(const ExperimentConfig& config, std::uint64_t seed, const TrainOptions& options) {
  config.validate();
  RunFiles files(config, seed, options.out);
  if (uses_learner(config.method)) return train_learned(config, seed, files, options);
  return train_fixed(config, seed, files);
}

int worker_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("L2E_THREADS")) {
    try {
      n = static_cast<int>(parse_int(env));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("L2E_THREADS must be an integer");
    }
  }
  return std::max(1, n);
}

std::vector<TrainResult> train_agents(const ExperimentConfig& config, std::uint64_t seed, int agents,
                                      const std::filesystem::path& out, int threads) {
  if (agents < 1) throw std::invalid_argument("train_agents: need at least one agent");
  std::vector<TrainResult> results(static_cast<std::size_t>(agents));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(agents));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < agents; i = next++) {
      try {
        TrainOptions opts;
        if (!out.empty()) opts.out = out / ("agent_" + std::to_string(i));
        results[static_cast<std::size_t>(i)] = train(config, seed + static_cast<std::uint64_t>(i), opts);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(threads, 1, agents);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

SuccessSummary summarize(const std::vector<std::vector<bool>>& per_agent) {
  SuccessSummary s;
  s.agents = static_cast<int>(per_agent.size());
  if (per_agent.empty()) return s;
  std::vector<double> means;
  double total = 0.0;
  for (const auto& a : per_agent) {
    const double hits = static_cast<double>(std::count(a.begin(), a.end(), true));
    total += hits;
    s.rollouts += static_cast<int>(a.size());
    means.push_back(a.empty() ? 0.0 : hits / static_cast<double>(a.size()));
  }
  s.mean = s.rollouts > 0 ? total / s.rollouts : 0.0;
  if (means.size() > 1) {
    double mu = 0.0;
    for (double m : means) mu += m;
    mu /= static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu);
    var /= static_cast<double>(means.size() - 1);
    s.std_of_mean = std::sqrt(var) / std::sqrt(static_cast<double>(means.size()));
  }
  return s;
}

std::vector<bool> evaluate_checkpoint(const std::filesystem::path& checkpoint,
                                      const std::optional<ExperimentConfig>& config, int rollouts,
                                      std::uint64_t seed) {
  const ParamFile meta = ParamFile::load(checkpoint);
  ExperimentConfig cfg;
  if (config) {
    cfg = *config;
  } else if (meta.meta.contains("config")) {
    cfg = ExperimentConfig::parse(meta.value("config"));
  } else if (std::filesystem::exists(checkpoint.parent_path() / "config.txt")) {
    cfg = ExperimentConfig::load(checkpoint.parent_path() / "config.txt");
  } else {
    throw std::invalid_argument("no configuration for " + checkpoint.string() + "; pass --config");
  }

  const std::string kind = meta.value("kind");
  auto env = make_env(cfg.env);
  if (kind == "sac") {
    if (!uses_learner(cfg.method)) throw CheckpointError("learner checkpoint given for method " + std::string(method_name(cfg.method)));
    const Sac agent = Sac::load(checkpoint);
    if (agent.obs_dim() != env->state_dim() + cond_dim(cfg) || agent.action_dim() != env->action_dim()) {
      throw CheckpointError("checkpoint does not match the configured environment");
    }
    return Evaluator{cfg, &agent, nullptr}.run(rollouts, seed);
  }
  if (kind == "inverse_model") {
    if (cfg.method != Method::PlanIm) throw CheckpointError("inverse model given for method " + std::string(method_name(cfg.method)));
    const InverseModel im = InverseModel::load(checkpoint);
    return Evaluator{cfg, nullptr, &im}.run(rollouts, seed);
  }
  throw CheckpointError("unknown checkpoint kind '" + kind + "'");
}

MetricsFile read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  MetricsFile m;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# l2e-metrics v1", 0) != 0) {
    throw std::runtime_error(path.string() + ": missing metrics header");
  }
  std::istringstream hs(line.substr(16));
  for (std::string tok; hs >> tok;) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) m.header[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  if (!std::getline(in, line) || line != kMetricsColumns) {
    throw std::runtime_error(path.string() + ": unexpected column header");
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::int64_t step = 0;
    int episodes = 0;
    std::string rate;
    if (!(ls >> step >> episodes >> rate)) throw std::runtime_error(path.string() + ": malformed row");
    m.steps.push_back(step);
    m.success_rates.push_back(parse_double(rate));
  }
  return m;
}

std::vector<std::string> emit_plots(const std::vector<std::filesystem::path>& runs,
                                    const std::filesystem::path& out) {
  if (runs.empty()) throw std::invalid_argument("plot: no run directories given");
  std::vector<std::filesystem::path> files;
  for (const auto& run : runs) {
    if (!std::filesystem::is_directory(run)) throw std::invalid_argument(run.string() + " is not a directory");
    std::vector<std::filesystem::path> found;
    if (std::filesystem::exists(run / "metrics.txt")) {
      found.push_back(run / "metrics.txt");
    } else {
      for (const auto& e : std::filesystem::directory_iterator(run)) {
        if (e.is_directory() && std::filesystem::exists(e.path() / "metrics.txt")) found.push_back(e.path() / "metrics.txt");
      }
      std::sort(found.begin(), found.end());
    }
    if (found.empty()) throw std::invalid_argument("no metrics.txt found in " + run.string());
    files.insert(files.end(), found.begin(), found.end());
  }

  // series name -> per-agent (step -> rate)
  std::map<std::string, std::vector<std::map<std::int64_t, double>>> series;
  for (const auto& f : files) {
    const MetricsFile m = read_metrics(f);
    if (m.steps.empty()) throw std::invalid_argument(f.string() + " has no evaluations");
    const std::string name = m.header.at("env") + "-" + m.header.at("label");
    std::map<std::int64_t, double> curve;
    for (std::size_t i = 0; i < m.steps.size(); ++i) curve[m.steps[i]] = m.success_rates[i];
    series[name].push_back(std::move(curve));
  }

  std::filesystem::create_directories(out);
  std::vector<std::string> names;
  for (const auto& [name, agents] : series) {
    std::ofstream tsv(out / (name + ".tsv"));
    tsv << "step\tmean\thalfwidth\tagents\n";
    // Steps every agent of the series was evaluated at.
    for (const auto& [step, _] : agents.front()) {
      std::vector<double> rates;
      for (const auto& a : agents) {
        auto it = a.find(step);
        if (it != a.end()) rates.push_back(it->second);
      }
      if (rates.size() != agents.size()) continue;
      double mu = 0.0;
      for (double r : rates) mu += r;
      mu /= static_cast<double>(rates.size());
      double half = 0.0;
      if (rates.size() > 1) {
        double var = 0.0;
        for (double r : rates) var += (r - mu) * (r - mu);
        half = std::sqrt(var / static_cast<double>(rates.size() - 1)) / std::sqrt(static_cast<double>(rates.size()));
      }
      tsv << step << '\t' << format_double(mu) << '\t' << format_double(half) << '\t' << rates.size() << '\n';
    }
    names.push_back(name);
  }

  std::ofstream script(out / "plot.py");
  script << R"(# Renders every <env>-<label>.tsv in this directory: mean success rate with
# a band of one standard deviation of the mean across agents.
import collections
import glob
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
by_env = collections.defaultdict(list)
for path in sorted(glob.glob(os.path.join(here, "*.tsv"))):
    env, label = os.path.basename(path)[:-4].split("-", 1)
    by_env[env].append((label, path))

for env, entries in by_env.items():
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, path in entries:
        rows = [line.split("\t") for line in open(path).read().splitlines()[1:]]
        steps = [int(r[0]) for r in rows]
        mean = [float(r[1]) for r in rows]
        half = [float(r[2]) for r in rows]
        ax.plot(steps, mean, label=label)
        ax.fill_between(steps, [m - h for m, h in zip(mean, half)],
                        [m + h for m, h in zip(mean, half)], alpha=0.25)
    ax.set_xlabel("environment steps")
    ax.set_ylabel("success rate")
    ax.set_ylim(0, 1)
    ax.set_title(env)
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(here, env + ".png"), dpi=120)
)";
  return names;
}

}  // namespace l2e
