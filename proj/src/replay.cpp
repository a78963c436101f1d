#include "l2e/replay.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "l2e/checkpoint.hpp"

namespace l2e {

namespace {
constexpr char kReplayMagic[9] = "L2EREPLY";
constexpr std::uint8_t kSuccessBit = 1;
constexpr std::uint8_t kAbsorbingBit = 2;
}  // namespace

// ---------------------------------------------------------------- PlanStore

PlanId PlanStore::intern(const Plan& plan, std::vector<double> encoding) {
  const std::uint64_t h = plan.content_hash();
  auto [lo, hi] = by_hash_.equal_range(h);
  for (auto it = lo; it != hi; ++it) {
    if (entries_.at(it->second).plan == plan) return it->second;
  }
  const PlanId id = next_id_++;
  entries_.emplace(id, Entry{plan, std::move(encoding), 0, ids_.size()});
  by_hash_.emplace(h, id);
  ids_.push_back(id);
  return id;
}

const PlanStore::Entry& PlanStore::entry(PlanId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw std::out_of_range("PlanStore: unknown plan id " + std::to_string(id));
  return it->second;
}

void PlanStore::retain(PlanId id) {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw std::out_of_range("PlanStore: unknown plan id " + std::to_string(id));
  ++it->second.refs;
}

void PlanStore::release(PlanId id) {
  auto it = entries_.find(id);
  if (it == entries_.end() || it->second.refs == 0) {
    throw std::logic_error("PlanStore: release without matching retain");
  }
  if (--it->second.refs == 0) erase(id);
}

void PlanStore::erase(PlanId id) {
  auto it = entries_.find(id);
  const std::size_t slot = it->second.slot;
  const PlanId moved = ids_.back();
  ids_[slot] = moved;
  entries_.at(moved).slot = slot;
  ids_.pop_back();

  auto [lo, hi] = by_hash_.equal_range(it->second.plan.content_hash());
  for (auto h = lo; h != hi; ++h) {
    if (h->second == id) {
      by_hash_.erase(h);
      break;
    }
  }
  entries_.erase(it);
}

const Plan& PlanStore::plan(PlanId id) const { return entry(id).plan; }
const std::vector<double>& PlanStore::encoding(PlanId id) const { return entry(id).encoding; }
std::size_t PlanStore::refcount(PlanId id) const { return entry(id).refs; }

// ------------------------------------------------------------- ReplayBuffer

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim,
                           std::size_t cond_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim), cond_dim_(cond_dim) {
  if (capacity == 0 || state_dim == 0 || action_dim == 0) {
    throw std::invalid_argument("ReplayBuffer: capacity and dimensions must be positive");
  }
  states_.resize(capacity * state_dim);
  actions_.resize(capacity * action_dim);
  rewards_.resize(capacity);
  next_states_.resize(capacity * state_dim);
  flags_.resize(capacity);
  plan_ids_.assign(capacity, kNoPlan);
  goals_.resize(capacity * 2);
}

void ReplayBuffer::write_slot(std::size_t slot, const Transition& t) {
  std::copy(t.state.begin(), t.state.end(), states_.begin() + slot * state_dim_);
  std::copy(t.action.begin(), t.action.end(), actions_.begin() + slot * action_dim_);
  rewards_[slot] = t.reward;
  std::copy(t.next_state.begin(), t.next_state.end(), next_states_.begin() + slot * state_dim_);
  flags_[slot] = (t.success ? kSuccessBit : 0) | (t.absorbing ? kAbsorbingBit : 0);
  plan_ids_[slot] = t.plan;
  goals_[2 * slot] = t.goal.x;
  goals_[2 * slot + 1] = t.goal.y;
}

void ReplayBuffer::add(std::span<const Transition> transitions) {
  for (const Transition& t : transitions) {
    if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ ||
        t.action.size() != action_dim_) {
      throw std::invalid_argument("ReplayBuffer::add: transition dimensions do not match");
    }
    if (t.plan != kNoPlan) {
      if (!plans_.contains(t.plan)) throw std::invalid_argument("ReplayBuffer::add: plan not resident");
      if (plans_.encoding(t.plan).size() != cond_dim_) {
        throw std::invalid_argument("ReplayBuffer::add: plan encoding has the wrong dimension");
      }
    } else if (cond_dim_ != 2) {
      throw std::invalid_argument("ReplayBuffer::add: goal conditioning needs cond_dim 2");
    }
  }
  // Pin every referenced plan so evictions inside this call cannot drop it.
  for (const Transition& t : transitions) {
    if (t.plan != kNoPlan) plans_.retain(t.plan);
  }
  for (const Transition& t : transitions) {
    const std::size_t slot = head_;
    if (size_ == capacity_) {
      if (plan_ids_[slot] != kNoPlan) plans_.release(plan_ids_[slot]);
    } else {
      ++size_;
    }
    write_slot(slot, t);
    if (t.plan != kNoPlan) plans_.retain(t.plan);
    head_ = (head_ + 1) % capacity_;
  }
  for (const Transition& t : transitions) {
    if (t.plan != kNoPlan) plans_.release(t.plan);
  }
}

PlanId ReplayBuffer::add_episode(Episode& episode, const Plan& plan, std::vector<double> encoding) {
  const PlanId id = plans_.intern(plan, std::move(encoding));
  plans_.retain(id);
  for (Transition& t : episode) {
    t.plan = id;
    t.goal = goal_of(plan);
  }
  try {
    add(episode);
  } catch (...) {
    plans_.release(id);
    throw;
  }
  plans_.release(id);
  return id;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayBuffer::at");
  const std::size_t slot = physical(i);
  Transition t;
  t.state.assign(states_.begin() + slot * state_dim_, states_.begin() + (slot + 1) * state_dim_);
  t.action.assign(actions_.begin() + slot * action_dim_, actions_.begin() + (slot + 1) * action_dim_);
  t.reward = rewards_[slot];
  t.next_state.assign(next_states_.begin() + slot * state_dim_,
                      next_states_.begin() + (slot + 1) * state_dim_);
  t.success = flags_[slot] & kSuccessBit;
  t.absorbing = flags_[slot] & kAbsorbingBit;
  t.plan = plan_ids_[slot];
  t.goal = {goals_[2 * slot], goals_[2 * slot + 1]};
  return t;
}

void ReplayBuffer::fill_column(std::size_t slot, Eigen::Ref<Eigen::VectorXd> obs,
                               Eigen::Ref<Eigen::VectorXd> next_obs) const {
  const auto S = static_cast<Eigen::Index>(state_dim_);
  const auto C = static_cast<Eigen::Index>(cond_dim_);
  obs.head(S) = Eigen::Map<const Eigen::VectorXd>(states_.data() + slot * state_dim_, S);
  next_obs.head(S) = Eigen::Map<const Eigen::VectorXd>(next_states_.data() + slot * state_dim_, S);
  if (plan_ids_[slot] != kNoPlan) {
    const auto& enc = plans_.encoding(plan_ids_[slot]);
    obs.tail(C) = Eigen::Map<const Eigen::VectorXd>(enc.data(), C);
  } else {
    obs.tail(C) = Eigen::Map<const Eigen::VectorXd>(goals_.data() + 2 * slot, C);
  }
  next_obs.tail(C) = obs.tail(C);
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("ReplayBuffer::sample: empty buffer");
  const auto B = static_cast<Eigen::Index>(batch_size);
  const auto in = static_cast<Eigen::Index>(state_dim_ + cond_dim_);
  const auto A = static_cast<Eigen::Index>(action_dim_);
  Batch b;
  b.obs.resize(in, B);
  b.next_obs.resize(in, B);
  b.actions.resize(A, B);
  b.rewards.resize(B);
  b.terminal.resize(B);
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  for (Eigen::Index j = 0; j < B; ++j) {
    const std::size_t slot = physical(pick(rng));
    fill_column(slot, b.obs.col(j), b.next_obs.col(j));
    b.actions.col(j) = Eigen::Map<const Eigen::VectorXd>(actions_.data() + slot * action_dim_, A);
    b.rewards(j) = rewards_[slot];
    b.terminal(j) = flags_[slot] != 0 ? 1.0 : 0.0;
  }
  return b;
}

void ReplayBuffer::save(const std::filesystem::path& path) const {
  BinaryWriter w(path);
  for (int i = 0; i < 8; ++i) w.pod(kReplayMagic[i]);
  w.pod(kVersion);
  w.pod<std::uint64_t>(capacity_);
  w.pod<std::uint64_t>(state_dim_);
  w.pod<std::uint64_t>(action_dim_);
  w.pod<std::uint64_t>(cond_dim_);
  w.pod<std::uint64_t>(size_);

  std::vector<double> s, a, r, s2, g;
  std::vector<std::uint8_t> f;
  std::vector<PlanId> p;
  s.reserve(size_ * state_dim_);
  s2.reserve(size_ * state_dim_);
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t slot = physical(i);
    s.insert(s.end(), states_.begin() + slot * state_dim_, states_.begin() + (slot + 1) * state_dim_);
    a.insert(a.end(), actions_.begin() + slot * action_dim_,
             actions_.begin() + (slot + 1) * action_dim_);
    r.push_back(rewards_[slot]);
    s2.insert(s2.end(), next_states_.begin() + slot * state_dim_,
              next_states_.begin() + (slot + 1) * state_dim_);
    f.push_back(flags_[slot]);
    p.push_back(plan_ids_[slot]);
    g.push_back(goals_[2 * slot]);
    g.push_back(goals_[2 * slot + 1]);
  }
  w.array<double>(s);
  w.array<double>(a);
  w.array<double>(r);
  w.array<double>(s2);
  w.array<std::uint8_t>(f);
  w.array<PlanId>(p);
  w.array<double>(g);

  w.pod<std::uint64_t>(plans_.size());
  for (PlanId id : plans_.ids()) {
    w.pod<PlanId>(id);
    w.string(serialize_plan(plans_.plan(id)));
    w.array<double>(plans_.encoding(id));
  }
  w.pod<PlanId>(plans_.next_id_);
  w.finish();
}

ReplayBuffer ReplayBuffer::load(const std::filesystem::path& path) {
  BinaryReader r(path);
  r.expect_magic(kReplayMagic);
  const auto version = r.pod<std::uint32_t>();
  if (version != kVersion) {
    throw CheckpointError("unsupported replay buffer version " + std::to_string(version));
  }
  const auto capacity = r.pod<std::uint64_t>();
  const auto S = r.pod<std::uint64_t>();
  const auto A = r.pod<std::uint64_t>();
  const auto C = r.pod<std::uint64_t>();
  const auto size = r.pod<std::uint64_t>();
  if (size > capacity || S == 0 || A == 0 || S > 4096 || A > 4096 || C > 4096 || capacity > (1ULL << 32)) {
    throw CheckpointError("replay buffer header out of range");
  }
  ReplayBuffer buf(capacity, S, A, C);
  const auto s = r.array<double>();
  const auto a = r.array<double>();
  const auto rw = r.array<double>();
  const auto s2 = r.array<double>();
  const auto f = r.array<std::uint8_t>();
  const auto p = r.array<PlanId>();
  const auto g = r.array<double>();
  if (s.size() != size * S || a.size() != size * A || rw.size() != size || s2.size() != size * S ||
      f.size() != size || p.size() != size || g.size() != 2 * size) {
    throw CheckpointError("replay buffer arrays do not match the header");
  }

  const auto n_plans = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n_plans; ++i) {
    const PlanId id = r.pod<PlanId>();
    Plan plan = parse_plan(r.string());
    std::vector<double> enc = r.array<double>();
    if (enc.size() != C) throw CheckpointError("plan encoding does not match cond_dim");
    const std::uint64_t h = plan.content_hash();
    buf.plans_.entries_.emplace(id, PlanStore::Entry{std::move(plan), std::move(enc), 0,
                                                     buf.plans_.ids_.size()});
    buf.plans_.by_hash_.emplace(h, id);
    buf.plans_.ids_.push_back(id);
  }
  buf.plans_.next_id_ = r.pod<PlanId>();

  for (std::size_t i = 0; i < size; ++i) {
    std::copy_n(s.begin() + i * S, S, buf.states_.begin() + i * S);
    std::copy_n(a.begin() + i * A, A, buf.actions_.begin() + i * A);
    buf.rewards_[i] = rw[i];
    std::copy_n(s2.begin() + i * S, S, buf.next_states_.begin() + i * S);
    buf.flags_[i] = f[i];
    buf.plan_ids_[i] = p[i];
    buf.goals_[2 * i] = g[2 * i];
    buf.goals_[2 * i + 1] = g[2 * i + 1];
    if (p[i] != kNoPlan) {
      if (!buf.plans_.contains(p[i])) throw CheckpointError("transition references a missing plan");
      buf.plans_.retain(p[i]);
    }
  }
  for (PlanId id : buf.plans_.ids_) {
    if (buf.plans_.refcount(id) == 0) throw CheckpointError("replay buffer stores an unreferenced plan");
  }
  buf.size_ = size;
  buf.head_ = size % capacity;
  return buf;
}

// --------------------------------------------------------- replay strategies

std::vector<PlanId> uniform_replay_plans(const PlanStore& store, std::size_t n, Rng& rng) {
  std::vector<PlanId> pool(store.ids().begin(), store.ids().end());
  const std::size_t take = std::min(n, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(take);
  return pool;
}

double episode_return(std::span<const Transition> episode, const Plan& plan,
                      const ShapingConfig& shaping) {
  double sum = 0.0;
  for (const Transition& t : episode) {
    sum += plan_reward(t.state, t.action, t.next_state, plan, shaping);
  }
  return sum;
}

std::vector<PlanId> biased_replay_plans(const PlanStore& store, std::span<const Transition> episode,
                                        std::size_t n, std::size_t m, const ShapingConfig& shaping,
                                        Rng& rng, std::vector<ScoredPlan>* scored) {
  if (n > m) throw std::invalid_argument("biased_replay_plans: n must not exceed m");
  const std::vector<PlanId> candidates = uniform_replay_plans(store, m, rng);
  std::vector<ScoredPlan> scores;
  scores.reserve(candidates.size());
  for (PlanId id : candidates) scores.push_back({id, episode_return(episode, store.plan(id), shaping)});
  if (scored) *scored = scores;

  std::stable_sort(scores.begin(), scores.end(),
                   [](const ScoredPlan& a, const ScoredPlan& b) { return a.score > b.score; });
  std::vector<PlanId> out;
  for (std::size_t i = 0; i < std::min(n, scores.size()); ++i) out.push_back(scores[i].id);
  return out;
}

Episode relabel_episode(std::span<const Transition> episode, PlanId id, const Plan& plan,
                        const ShapingConfig& shaping) {
  Episode out(episode.begin(), episode.end());
  const Vec2 goal = goal_of(plan);
  for (Transition& t : out) {
    t.reward = plan_reward(t.state, t.action, t.next_state, plan, shaping);
    t.success = goal_reward(t.next_state, goal, shaping) == 1.0;
    t.plan = id;
    t.goal = goal;
  }
  return out;
}

std::vector<HerReplayGoal> her_replay_goals(std::span<const Transition> episode,
                                            HerStrategy strategy, int k,
                                            const ShapingConfig& shaping, Rng& rng) {
  if (k < 0) throw std::invalid_argument("her_replay_goals: k must be non-negative");
  std::vector<HerReplayGoal> out;
  const std::size_t T = episode.size();
  auto achieved = [&](std::size_t i) {
    const auto& s = episode[i].next_state;
    return Vec2{s[shaping.achieved_offset], s[shaping.achieved_offset + 1]};
  };
  for (std::size_t t = 0; t < T; ++t) {
    std::size_t lo = 0;
    if (strategy == HerStrategy::Future) {
      if (t + 1 >= T) continue;
      lo = t + 1;
    }
    std::uniform_int_distribution<std::size_t> pick(lo, T - 1);
    for (int j = 0; j < k; ++j) {
      const std::size_t src = pick(rng);
      out.push_back({t, src, achieved(src)});
    }
  }
  return out;
}

Transition her_relabel(const Transition& t, Vec2 goal, const ShapingConfig& shaping) {
  Transition out = t;
  out.reward = goal_reward(t.next_state, goal, shaping);
  out.success = out.reward == 1.0;
  out.plan = kNoPlan;
  out.goal = goal;
  return out;
}

}  // namespace l2e
