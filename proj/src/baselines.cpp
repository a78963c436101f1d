#include "l2e/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "l2e/checkpoint.hpp"
#include "l2e/text.hpp"

namespace l2e {

Action direct_action(const Plan& plan, const State& state, const Env& env, const ShapingConfig& shaping) {
  const std::size_t k = nearest_index(state.values(), plan, shaping.distance_mask);
  const std::size_t A = env.action_dim();
  Action a(A, 0.0);
  if (k + 1 < plan.size()) {
    const auto here = plan.waypoint(k);
    const auto next = plan.waypoint(k + 1);
    for (std::size_t i = 0; i < A; ++i) a[i] = next[i] - here[i];
  }
  return env.clamp_action(a);
}

namespace {

template <class Policy>
RolloutResult run_tracking(Env& env, Rng& rng, Policy&& policy) {
  RolloutResult out;
  out.states.push_back(env.state());
  const int limit = env.config().episode_length;
  while (env.elapsed() < limit) {
    Action a = policy(env.state());
    const StepResult r = env.step(a, rng);
    out.actions.push_back(std::move(a));
    out.states.push_back(r.state);
    ++out.steps;
    if (r.success) {
      out.success = true;
      break;
    }
    if (r.done) break;
  }
  return out;
}

}  // namespace

RolloutResult direct_execute(const Plan& plan, Env& env, const ShapingConfig& shaping, Rng& rng) {
  if (plan.task() != env.task() && !(is_pushing(plan.task()) && is_pushing(env.task()))) {
    throw std::invalid_argument("direct_execute: plan does not match the environment");
  }
  return run_tracking(env, rng, [&](const State& s) { return direct_action(plan, s, env, shaping); });
}

Action toward_box_action(const State& state, const Env& env) {
  const Vec3 ee = state.ee();
  const Vec2 box = state.box();
  const double d[3] = {box.x - ee.x, box.y - ee.y, -ee.z};
  const double m = std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])});
  Action a(3, 0.0);
  if (m > 0.0) {
    const double s = env.action_bound() / m;
    for (int i = 0; i < 3; ++i) a[i] = d[i] * s;
  }
  return env.clamp_action(a);
}

ImDataset collect_im_data(Env& env, int episodes, Rng& rng, double box_fraction) {
  if (!is_pushing(env.task())) throw std::invalid_argument("collect_im_data: needs a pushing environment");
  if (episodes < 0) throw std::invalid_argument("collect_im_data: negative episode count");
  ImDataset data;
  data.state_dim = env.state_dim();
  data.action_dim = env.action_dim();
  const double bound = env.action_bound();
  const int T = env.config().episode_length;
  for (int e = 0; e < episodes; ++e) {
    env.reset(rng);
    for (int t = 0; t < T; ++t) {
      const State s = env.state();
      const bool directed = bernoulli(rng, box_fraction);
      Action a(data.action_dim);
      if (directed) {
        a = toward_box_action(s, env);
      } else {
        for (auto& v : a) v = uniform(rng, -bound, bound);
      }
      // The episode runs for its full length; transition() ignores done flags.
      const State next = env.transition(s, a, rng);
      env.set_state(next);
      env.set_elapsed(t + 1);
      data.states.insert(data.states.end(), s.vector().begin(), s.vector().end());
      data.next_states.insert(data.next_states.end(), next.vector().begin(), next.vector().end());
      data.actions.insert(data.actions.end(), a.begin(), a.end());
      data.box_directed.push_back(directed);
    }
  }
  return data;
}

// ------------------------------------------------------------ InverseModel

InverseModel::InverseModel(std::size_t state_dim, std::size_t action_dim, double action_bound,
                           InverseModelConfig config)
    : state_dim_(state_dim), action_dim_(action_dim), action_bound_(action_bound), config_(std::move(config)) {
  if (!(action_bound > 0.0)) throw std::invalid_argument("InverseModel: action bound must be positive");
  if (!(config_.validation_fraction > 0.0 && config_.validation_fraction < 1.0)) {
    throw std::invalid_argument("InverseModel: validation fraction must lie in (0, 1)");
  }
  net_ = Mlp(layer_sizes(static_cast<int>(2 * state_dim), config_.hidden, static_cast<int>(action_dim)));
  in_mean_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * state_dim));
  in_std_ = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(2 * state_dim));
}

InverseModel::InverseModel(std::size_t state_dim, std::size_t action_dim, double action_bound,
                           InverseModelConfig config, Rng& init_rng)
    : InverseModel(state_dim, action_dim, action_bound, std::move(config)) {
  net_.init(init_rng);
}

Eigen::MatrixXd InverseModel::inputs(const ImDataset& data, const std::vector<std::size_t>& rows) const {
  const auto S = static_cast<Eigen::Index>(state_dim_);
  Eigen::MatrixXd x(2 * S, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    x.col(c).head(S) = Eigen::Map<const Eigen::VectorXd>(data.states.data() + rows[j] * state_dim_, S);
    x.col(c).tail(S) = Eigen::Map<const Eigen::VectorXd>(data.next_states.data() + rows[j] * state_dim_, S);
  }
  return (x.colwise() - in_mean_).array().colwise() / in_std_.array();
}

Eigen::MatrixXd InverseModel::targets(const ImDataset& data, const std::vector<std::size_t>& rows) const {
  const auto A = static_cast<Eigen::Index>(action_dim_);
  Eigen::MatrixXd y(A, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    y.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(data.actions.data() + rows[j] * action_dim_, A) / action_bound_;
  }
  return y;
}

double InverseModel::mse(const ImDataset& data, const std::vector<std::size_t>& rows) const {
  if (rows.empty()) return 0.0;
  const Eigen::MatrixXd pred = net_.forward(inputs(data, rows)).array().tanh().matrix();
  return (pred - targets(data, rows)).squaredNorm() / static_cast<double>(pred.size());
}

std::vector<double> InverseModel::fit(const ImDataset& data, Rng& rng) {
  if (data.state_dim != state_dim_ || data.action_dim != action_dim_) {
    throw std::invalid_argument("InverseModel::fit: dataset dimensions do not match");
  }
  if (data.size() < 2) throw std::invalid_argument("InverseModel::fit: need at least two samples");

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = std::max<std::size_t>(1, static_cast<std::size_t>(config_.validation_fraction * data.size()));
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

  // Input statistics from the training split.
  in_mean_.setZero();
  in_std_.setOnes();
  const Eigen::MatrixXd raw = inputs(data, train);
  in_mean_ = raw.rowwise().mean();
  in_std_ = ((raw.colwise() - in_mean_).array().square().rowwise().mean()).sqrt().max(1e-6).matrix();

  Adam opt(net_.num_params(), config_.lr);
  std::vector<double> history;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_params = net_.params();
  int stale = 0;
  for (int epoch = 0; epoch < config_.max_epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    for (std::size_t start = 0; start < train.size(); start += config_.batch_size) {
      const std::vector<std::size_t> rows(
          train.begin() + static_cast<std::ptrdiff_t>(start),
          train.begin() + static_cast<std::ptrdiff_t>(std::min(train.size(), start + config_.batch_size)));
      Mlp::Cache cache;
      const Eigen::MatrixXd out = net_.forward(inputs(data, rows), cache);
      const Eigen::ArrayXXd t = out.array().tanh();
      const Eigen::ArrayXXd diff = t - targets(data, rows).array();
      const double n = static_cast<double>(out.size());
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(net_.num_params());
      net_.backward(cache, (2.0 / n * diff * (1.0 - t.square())).matrix(), &grad);
      opt.step(net_.params(), grad);
    }
    const double v = mse(data, val);
    history.push_back(v);
    if (v < best) {
      best = v;
      best_params = net_.params();
      stale = 0;
    } else if (++stale >= config_.patience) {
      break;
    }
  }
  net_.params() = best_params;
  trained_ = true;
  return history;
}

Action InverseModel::predict(std::span<const double> state, std::span<const double> desired) const {
  if (!trained_) throw std::logic_error("InverseModel::predict: model is untrained");
  if (state.size() != state_dim_ || desired.size() != state_dim_) {
    throw std::invalid_argument("InverseModel::predict: state dimension mismatch");
  }
  const auto S = static_cast<Eigen::Index>(state_dim_);
  Eigen::MatrixXd x(2 * S, 1);
  for (Eigen::Index i = 0; i < S; ++i) {
    x(i, 0) = state[static_cast<std::size_t>(i)];
    x(S + i, 0) = desired[static_cast<std::size_t>(i)];
  }
  x = (x.col(0) - in_mean_).cwiseQuotient(in_std_);
  const Eigen::VectorXd out = net_.forward(x).col(0);
  Action a(action_dim_);
  for (std::size_t i = 0; i < action_dim_; ++i) a[i] = std::tanh(out(static_cast<Eigen::Index>(i))) * action_bound_;
  return a;
}

void InverseModel::save(const std::filesystem::path& path) const {
  if (!trained_) throw std::logic_error("InverseModel::save: model is untrained");
  ParamFile f;
  f.meta["kind"] = "inverse_model";
  f.meta["format"] = "1";
  f.meta["state_dim"] = std::to_string(state_dim_);
  f.meta["action_dim"] = std::to_string(action_dim_);
  f.meta["action_bound"] = format_double(action_bound_);
  f.meta["hidden"] = join_ints(config_.hidden);
  auto put = [&](const std::string& name, const Eigen::VectorXd& v) {
    f.arrays[name] = {{static_cast<std::uint64_t>(v.size())}, std::vector<double>(v.begin(), v.end())};
  };
  put("net", net_.params());
  put("input_mean", in_mean_);
  put("input_std", in_std_);
  f.save(path);
}

InverseModel InverseModel::load(const std::filesystem::path& path) {
  const ParamFile f = ParamFile::load(path);
  if (f.value("kind") != "inverse_model" || f.value("format") != "1") {
    throw CheckpointError(path.string() + " is not an inverse-model checkpoint");
  }
  InverseModelConfig cfg;
  cfg.hidden = parse_int_list(f.value("hidden"));
  InverseModel m(static_cast<std::size_t>(parse_int(f.value("state_dim"))),
                 static_cast<std::size_t>(parse_int(f.value("action_dim"))),
                 parse_double(f.value("action_bound")), cfg);
  auto get = [&](const std::string& name, Eigen::VectorXd& dst) {
    const auto& a = f.array(name);
    if (static_cast<Eigen::Index>(a.data.size()) != dst.size()) {
      throw CheckpointError("array '" + name + "' does not match the architecture");
    }
    dst = Eigen::Map<const Eigen::VectorXd>(a.data.data(), dst.size());
  };
  get("net", m.net_.params());
  get("input_mean", m.in_mean_);
  get("input_std", m.in_std_);
  m.trained_ = true;
  return m;
}

std::vector<double> desired_state(const Plan& plan, std::size_t i) {
  if (plan.dim() != kPushingWaypointDim) throw std::invalid_argument("desired_state: pushing plans only");
  const auto w = plan.waypoint(i);
  std::vector<double> s(w.begin(), w.end());
  s.push_back(0.0);  // box parallel to the table edges
  return s;
}

RolloutResult im_execute(const Plan& plan, const InverseModel& model, Env& env,
                         const ShapingConfig& shaping, Rng& rng) {
  if (!model.trained()) throw std::logic_error("im_execute: model is untrained");
  if (!is_pushing(env.task())) throw std::invalid_argument("im_execute: needs a pushing environment");
  return run_tracking(env, rng, [&](const State& s) {
    const std::size_t k = nearest_index(s.values(), plan, shaping.distance_mask);
    if (k + 1 >= plan.size()) return Action(env.action_dim(), 0.0);
    return env.clamp_action(model.predict(s.values(), desired_state(plan, k + 1)));
  });
}

// ---------------------------------------------------------- SubgoalTracker

SubgoalTracker::SubgoalTracker(const Plan& plan, double lookahead, double tolerance)
    : goal_(plan.goal()), lookahead_(lookahead), tolerance_(tolerance) {
  if (plan.empty()) throw std::invalid_argument("SubgoalTracker: empty plan");
  for (std::size_t i = 0; i < plan.size(); ++i) points_.push_back(plan.achieved(i));
  arc_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) arc_.push_back(arc_.back() + distance(points_[i - 1], points_[i]));
  select_from(0);
}

std::size_t SubgoalTracker::projection(Vec2 position) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = distance(points_[i], position);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

void SubgoalTracker::select_from(std::size_t base) {
  for (std::size_t i = base + 1; i < points_.size(); ++i) {
    if (arc_[i] - arc_[base] >= lookahead_) {
      index_ = i;
      subgoal_ = points_[i];
      return;
    }
  }
  index_ = points_.size();
  subgoal_ = goal_;
}

Vec2 SubgoalTracker::update(Vec2 position) {
  if (at_goal()) return subgoal_;
  if (distance(position, points_.back()) < lookahead_) {
    index_ = points_.size();
    subgoal_ = goal_;
    return subgoal_;
  }
  if (distance(position, subgoal_) <= tolerance_) {
    select_from(std::max(index_, projection(position)));
  }
  return subgoal_;
}

Action subgoal_policy_step(SubgoalTracker& tracker, const State& state, Task task, const Sac& agent,
                           bool deterministic, Rng& rng) {
  const Vec2 g = tracker.update(achieved_goal(task, state.values()));
  std::vector<double> obs(state.vector());
  obs.push_back(g.x);
  obs.push_back(g.y);
  return agent.act(obs, deterministic, rng);
}

}  // namespace l2e
