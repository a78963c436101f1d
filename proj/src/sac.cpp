#include "l2e/sac.hpp"

#include <cmath>
#include <numbers>

#include "l2e/checkpoint.hpp"
#include "l2e/text.hpp"

namespace l2e {

namespace {

constexpr std::uint32_t kSacFormat = 1;

Eigen::ArrayXXd softplus(const Eigen::ArrayXXd& x) {
  return x.unaryExpr([](double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); });
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

void LearnerConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("learner: lr must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("learner: gamma must lie in (0, 1)");
  if (!(polyak > 0.0 && polyak < 1.0)) throw std::invalid_argument("learner: polyak must lie in (0, 1)");
  if (batch_size == 0) throw std::invalid_argument("learner: batch size must be positive");
  // A zero temperature is allowed only when it stays fixed.
  if (!(init_alpha > 0.0 || (init_alpha == 0.0 && !learn_alpha))) {
    throw std::invalid_argument("learner: init_alpha must be positive");
  }
  if (!(log_std_min < log_std_max)) throw std::invalid_argument("learner: empty log-std band");
  for (int h : hidden) {
    if (h <= 0) throw std::invalid_argument("learner: hidden sizes must be positive");
  }
}

std::vector<int> layer_sizes(int input, const std::vector<int>& hidden, int output) {
  std::vector<int> s{input};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(output);
  return s;
}

Sac::Sac(std::size_t obs_dim, std::size_t action_dim, double action_bound, LearnerConfig config)
    : obs_dim_(obs_dim),
      action_dim_(action_dim),
      action_bound_(action_bound),
      config_(std::move(config)) {
  config_.validate();
  if (obs_dim == 0 || action_dim == 0) throw std::invalid_argument("Sac: dimensions must be positive");
  if (!(action_bound > 0.0)) throw std::invalid_argument("Sac: action bound must be positive");
  const int obs = static_cast<int>(obs_dim);
  const int act = static_cast<int>(action_dim);
  entropy_target_ = config_.entropy_target.value_or(-static_cast<double>(action_dim));
  actor_ = Mlp(layer_sizes(obs, config_.hidden, 2 * act));
  q1_ = Mlp(layer_sizes(obs + act, config_.hidden, 1));
  q2_ = q1_;
  log_alpha_ = std::log(config_.init_alpha);
  actor_opt_ = Adam(actor_.num_params(), config_.lr);
  q1_opt_ = Adam(q1_.num_params(), config_.lr);
  q2_opt_ = Adam(q2_.num_params(), config_.lr);
  alpha_opt_ = Adam(1, config_.lr);
}

Sac::Sac(std::size_t obs_dim, std::size_t action_dim, double action_bound, LearnerConfig config,
         Rng& init_rng)
    : Sac(obs_dim, action_dim, action_bound, std::move(config)) {
  actor_.init(init_rng);
  q1_.init(init_rng);
  q2_.init(init_rng);
  q1_target_ = q1_;
  q2_target_ = q2_;
}

double Sac::alpha() const { return std::exp(log_alpha_); }

Eigen::MatrixXd Sac::critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& action) const {
  Eigen::MatrixXd in(obs.rows() + action.rows(), obs.cols());
  in.topRows(obs.rows()) = obs;
  in.bottomRows(action.rows()) = action;
  return in;
}

Eigen::MatrixXd Sac::normalized_actions(const Batch& batch) const {
  return batch.actions / action_bound_;
}

PolicySample Sac::sample_policy(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise) const {
  const auto A = static_cast<Eigen::Index>(action_dim_);
  if (noise.rows() != A || noise.cols() != obs.cols()) {
    throw std::invalid_argument("Sac::sample_policy: noise shape mismatch");
  }
  PolicySample ps;
  const Eigen::MatrixXd h = actor_.forward(obs, ps.cache);
  ps.mean = h.topRows(A);
  const Eigen::ArrayXXd raw = h.bottomRows(A).array();
  ps.log_std = raw.cwiseMax(config_.log_std_min).cwiseMin(config_.log_std_max).matrix();
  ps.clamp_pass = ((raw >= config_.log_std_min) && (raw <= config_.log_std_max)).cast<double>().matrix();
  const Eigen::ArrayXXd u = ps.mean.array() + ps.log_std.array().exp() * noise.array();
  ps.u = u.matrix();
  ps.action = u.tanh().matrix();
  // log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u))
  const Eigen::ArrayXXd log_jac = 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u));
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  ps.log_prob = (-0.5 * noise.array().square() - ps.log_std.array() - half_log_2pi - log_jac)
                    .colwise()
                    .sum()
                    .matrix();
  return ps;
}

Eigen::RowVectorXd Sac::min_q(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& action,
                              bool target) const {
  const Eigen::MatrixXd in = critic_input(obs, action);
  const Mlp& a = target ? q1_target_ : q1_;
  const Mlp& b = target ? q2_target_ : q2_;
  return a.forward(in).cwiseMin(b.forward(in));
}

Action Sac::act(std::span<const double> obs, bool deterministic, Rng& rng) const {
  if (obs.size() != obs_dim_) throw std::invalid_argument("Sac::act: observation dimension mismatch");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(obs_dim_), 1);
  for (std::size_t i = 0; i < obs_dim_; ++i) {
    if (!std::isfinite(obs[i])) throw std::invalid_argument("Sac::act: non-finite observation");
    x(static_cast<Eigen::Index>(i), 0) = obs[i];
  }
  const auto A = static_cast<Eigen::Index>(action_dim_);
  Eigen::MatrixXd squashed;
  if (deterministic) {
    squashed = actor_.forward(x).topRows(A).array().tanh().matrix();
  } else {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd noise(A, 1);
    for (Eigen::Index i = 0; i < A; ++i) noise(i, 0) = normal(rng);
    squashed = sample_policy(x, noise).action;
  }
  Action out(action_dim_);
  for (std::size_t i = 0; i < action_dim_; ++i) out[i] = squashed(static_cast<Eigen::Index>(i), 0) * action_bound_;
  return out;
}

std::pair<double, double> Sac::critic_loss(const Batch& batch, const Eigen::MatrixXd& next_noise,
                                           Eigen::VectorXd* grad1, Eigen::VectorXd* grad2) const {
  const double B = static_cast<double>(batch.size());
  const PolicySample next = sample_policy(batch.next_obs, next_noise);
  const Eigen::RowVectorXd q_next = min_q(batch.next_obs, next.action, true);
  const Eigen::RowVectorXd soft = q_next - alpha() * next.log_prob;
  const Eigen::RowVectorXd y =
      batch.rewards.array() + config_.gamma * (1.0 - batch.terminal.array()) * soft.array();

  const Eigen::MatrixXd in = critic_input(batch.obs, normalized_actions(batch));
  auto head = [&](const Mlp& q, Eigen::VectorXd* grad) {
    Mlp::Cache cache;
    const Eigen::RowVectorXd diff = q.forward(in, cache).row(0) - y;
    if (grad) {
      grad->setZero(q.num_params());
      q.backward(cache, diff / B, grad);
    }
    return 0.5 * diff.squaredNorm() / B;
  };
  return {head(q1_, grad1), head(q2_, grad2)};
}

double Sac::actor_loss(const Batch& batch, const Eigen::MatrixXd& noise, Eigen::VectorXd* grad,
                       double* mean_log_prob) const {
  const double B = static_cast<double>(batch.size());
  const auto A = static_cast<Eigen::Index>(action_dim_);
  const PolicySample ps = sample_policy(batch.obs, noise);
  const Eigen::MatrixXd in = critic_input(batch.obs, ps.action);
  Mlp::Cache c1, c2;
  const Eigen::RowVectorXd q1 = q1_.forward(in, c1).row(0);
  const Eigen::RowVectorXd q2 = q2_.forward(in, c2).row(0);
  const Eigen::RowVectorXd pick1 = (q1.array() <= q2.array()).cast<double>().matrix();
  const Eigen::RowVectorXd qmin = q1.cwiseMin(q2);
  const double a = alpha();
  if (mean_log_prob) *mean_log_prob = ps.log_prob.mean();
  const double loss = (a * ps.log_prob - qmin).sum() / B;
  if (grad) {
    const Eigen::MatrixXd up1 = -pick1 / B;
    const Eigen::MatrixXd up2 = -(Eigen::RowVectorXd::Ones(pick1.size()) - pick1) / B;
    const Eigen::MatrixXd d_action = q1_.backward(c1, up1, nullptr).bottomRows(A) +
                                     q2_.backward(c2, up2, nullptr).bottomRows(A);
    const Eigen::ArrayXXd t = ps.action.array();
    const Eigen::ArrayXXd sigma = ps.log_std.array().exp();
    const Eigen::ArrayXXd d_u = (a / B) * 2.0 * t + d_action.array() * (1.0 - t.square());
    Eigen::MatrixXd upstream(2 * A, batch.size());
    upstream.topRows(A) = d_u.matrix();
    upstream.bottomRows(A) =
        ((-a / B) + d_u * sigma * noise.array()).cwiseProduct(ps.clamp_pass.array()).matrix();
    grad->setZero(actor_.num_params());
    actor_.backward(ps.cache, upstream, grad);
  }
  return loss;
}

double Sac::temperature_loss(const Batch& batch, const Eigen::MatrixXd& noise, double* grad) const {
  const double m = sample_policy(batch.obs, noise).log_prob.mean() + entropy_target_;
  if (grad) *grad = -m;
  return -log_alpha_ * m;
}

void Sac::polyak_update() {
  const double tau = config_.polyak;
  q1_target_.params() = (1.0 - tau) * q1_target_.params() + tau * q1_.params();
  q2_target_.params() = (1.0 - tau) * q2_target_.params() + tau * q2_.params();
}

SacLosses Sac::update(const Batch& batch, Rng& rng) {
  const auto A = static_cast<Eigen::Index>(action_dim_);
  std::normal_distribution<double> normal;
  SacNoise noise{Eigen::MatrixXd(A, batch.size()), Eigen::MatrixXd(A, batch.size())};
  for (Eigen::Index i = 0; i < noise.next.size(); ++i) noise.next.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < noise.current.size(); ++i) noise.current.data()[i] = normal(rng);
  return update(batch, noise);
}

SacLosses Sac::update(const Batch& batch, const SacNoise& noise) {
  if (batch.size() == 0) throw std::invalid_argument("Sac::update: empty batch");
  if (batch.obs.rows() != static_cast<Eigen::Index>(obs_dim_) ||
      batch.actions.rows() != static_cast<Eigen::Index>(action_dim_)) {
    throw std::invalid_argument("Sac::update: batch dimensions do not match the learner");
  }
  SacLosses out;
  Eigen::VectorXd g1, g2;
  std::tie(out.critic1, out.critic2) = critic_loss(batch, noise.next, &g1, &g2);
  if (!std::isfinite(out.critic1) || !std::isfinite(out.critic2) || !finite(g1) || !finite(g2)) {
    throw NonFiniteLoss("non-finite critic loss at update " + std::to_string(updates_) +
                        " (critic1=" + format_double(out.critic1) +
                        ", critic2=" + format_double(out.critic2) + ", alpha=" + format_double(alpha()) + ")");
  }
  q1_opt_.step(q1_.params(), g1);
  q2_opt_.step(q2_.params(), g2);

  Eigen::VectorXd ga;
  double mean_log_prob = 0.0;
  out.actor = actor_loss(batch, noise.current, &ga, &mean_log_prob);
  if (!std::isfinite(out.actor) || !finite(ga)) {
    throw NonFiniteLoss("non-finite actor loss at update " + std::to_string(updates_) +
                        " (actor=" + format_double(out.actor) + ", alpha=" + format_double(alpha()) + ")");
  }
  actor_opt_.step(actor_.params(), ga);

  const double m = mean_log_prob + entropy_target_;
  if (config_.learn_alpha) {
    out.temperature = -log_alpha_ * m;
    Eigen::VectorXd la(1), gl(1);
    la(0) = log_alpha_;
    gl(0) = -m;
    alpha_opt_.step(la, gl);
    log_alpha_ = la(0);
  }
  out.alpha = alpha();
  polyak_update();
  ++updates_;
  return out;
}

void Sac::save(const std::filesystem::path& path, const std::map<std::string, std::string>& extra) const {
  ParamFile f;
  f.meta = extra;
  f.meta["kind"] = "sac";
  f.meta["format"] = std::to_string(kSacFormat);
  f.meta["obs_dim"] = std::to_string(obs_dim_);
  f.meta["action_dim"] = std::to_string(action_dim_);
  f.meta["action_bound"] = format_double(action_bound_);
  f.meta["hidden"] = join_ints(config_.hidden);
  f.meta["lr"] = format_double(config_.lr);
  f.meta["batch_size"] = std::to_string(config_.batch_size);
  f.meta["gamma"] = format_double(config_.gamma);
  f.meta["polyak"] = format_double(config_.polyak);
  f.meta["entropy_target"] = format_double(entropy_target_);
  f.meta["init_alpha"] = format_double(config_.init_alpha);
  f.meta["learn_alpha"] = config_.learn_alpha ? "true" : "false";
  f.meta["log_std_min"] = format_double(config_.log_std_min);
  f.meta["log_std_max"] = format_double(config_.log_std_max);
  f.meta["updates"] = std::to_string(updates_);

  auto put = [&](const std::string& name, const Eigen::VectorXd& v) {
    f.arrays[name] = {{static_cast<std::uint64_t>(v.size())}, std::vector<double>(v.begin(), v.end())};
  };
  put("actor", actor_.params());
  put("critic1", q1_.params());
  put("critic2", q2_.params());
  put("target1", q1_target_.params());
  put("target2", q2_target_.params());
  f.arrays["log_alpha"] = {{1}, {log_alpha_}};
  auto put_opt = [&](const std::string& name, const Adam& o) {
    put(name + ".m", o.m);
    put(name + ".v", o.v);
    f.arrays[name + ".t"] = {{1}, {static_cast<double>(o.t)}};
  };
  put_opt("opt.actor", actor_opt_);
  put_opt("opt.critic1", q1_opt_);
  put_opt("opt.critic2", q2_opt_);
  put_opt("opt.alpha", alpha_opt_);
  f.save(path);
}

Sac Sac::load(const std::filesystem::path& path) {
  const ParamFile f = ParamFile::load(path);
  if (f.value("kind") != "sac") throw CheckpointError(path.string() + " is not a learner checkpoint");
  if (f.value("format") != std::to_string(kSacFormat)) {
    throw CheckpointError("unsupported learner checkpoint format " + f.value("format"));
  }
  LearnerConfig cfg;
  cfg.hidden = parse_int_list(f.value("hidden"));
  cfg.lr = parse_double(f.value("lr"));
  cfg.batch_size = static_cast<std::size_t>(parse_int(f.value("batch_size")));
  cfg.gamma = parse_double(f.value("gamma"));
  cfg.polyak = parse_double(f.value("polyak"));
  cfg.entropy_target = parse_double(f.value("entropy_target"));
  cfg.init_alpha = parse_double(f.value("init_alpha"));
  cfg.learn_alpha = parse_bool(f.value("learn_alpha"));
  cfg.log_std_min = parse_double(f.value("log_std_min"));
  cfg.log_std_max = parse_double(f.value("log_std_max"));
  Sac sac(static_cast<std::size_t>(parse_int(f.value("obs_dim"))),
          static_cast<std::size_t>(parse_int(f.value("action_dim"))),
          parse_double(f.value("action_bound")), cfg);

  auto get = [&](const std::string& name, Eigen::VectorXd& dst) {
    const auto& a = f.array(name);
    if (static_cast<Eigen::Index>(a.data.size()) != dst.size()) {
      throw CheckpointError("array '" + name + "' does not match the architecture");
    }
    dst = Eigen::Map<const Eigen::VectorXd>(a.data.data(), dst.size());
  };
  get("actor", sac.actor_.params());
  get("critic1", sac.q1_.params());
  get("critic2", sac.q2_.params());
  sac.q1_target_ = sac.q1_;
  sac.q2_target_ = sac.q2_;
  get("target1", sac.q1_target_.params());
  get("target2", sac.q2_target_.params());
  sac.log_alpha_ = f.array("log_alpha").data.at(0);
  auto get_opt = [&](const std::string& name, Adam& o) {
    get(name + ".m", o.m);
    get(name + ".v", o.v);
    o.t = static_cast<std::int64_t>(f.array(name + ".t").data.at(0));
  };
  get_opt("opt.actor", sac.actor_opt_);
  get_opt("opt.critic1", sac.q1_opt_);
  get_opt("opt.critic2", sac.q2_opt_);
  get_opt("opt.alpha", sac.alpha_opt_);
  sac.updates_ = parse_int(f.value("updates"));
  return sac;
}

}  // namespace l2e
