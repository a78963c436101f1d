#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <unordered_map>
#include <vector>

#include "l2e/batch.hpp"
#include "l2e/planners.hpp"
#include "l2e/random.hpp"
#include "l2e/shaping.hpp"

namespace l2e {

using PlanId = std::uint64_t;
inline constexpr PlanId kNoPlan = 0;

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  /// next_state reaches the conditioning goal.
  bool success = false;
  /// next_state left the reachable region (box off the table).
  bool absorbing = false;
  /// Conditioning: a plan in the buffer's store, or a bare goal when plan == kNoPlan.
  PlanId plan = kNoPlan;
  Vec2 goal;

  bool terminal() const { return success || absorbing; }
};

using Episode = std::vector<Transition>;

/// Plans shared by buffer slots, deduplicated by content and dropped once no
/// slot references them. Ids are never reused.
class PlanStore {
 public:
  /// Returns the id of an equal resident plan or stores a new one. A fresh
  /// entry starts unreferenced and must be retained.
  PlanId intern(const Plan& plan, std::vector<double> encoding);

  void retain(PlanId id);
  void release(PlanId id);

  bool contains(PlanId id) const { return entries_.contains(id); }
  const Plan& plan(PlanId id) const;
  const std::vector<double>& encoding(PlanId id) const;
  std::size_t refcount(PlanId id) const;

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  /// Resident ids; the order changes as plans are dropped.
  std::span<const PlanId> ids() const { return ids_; }

 private:
  friend class ReplayBuffer;

  struct Entry {
    Plan plan;
    std::vector<double> encoding;
    std::size_t refs = 0;
    std::size_t slot = 0;  // position in ids_
  };

  void erase(PlanId id);
  const Entry& entry(PlanId id) const;

  std::unordered_map<PlanId, Entry> entries_;
  std::unordered_multimap<std::uint64_t, PlanId> by_hash_;
  std::vector<PlanId> ids_;
  PlanId next_id_ = 1;
};

/// FIFO ring of transitions stored column-wise.
class ReplayBuffer {
 public:
  static constexpr std::uint32_t kVersion = 1;

  ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim,
               std::size_t cond_dim);

  /// Appends transitions in order, evicting the oldest at capacity. Plans they
  /// reference must be resident.
  void add(std::span<const Transition> transitions);
  void add(const Transition& t) { add(std::span<const Transition>(&t, 1)); }

  /// Stores `plan` and appends the episode conditioned on it.
  PlanId add_episode(Episode& episode, const Plan& plan, std::vector<double> encoding);

  /// Transition i counted from the oldest resident one.
  Transition at(std::size_t i) const;

  /// Uniform sample with replacement; conditioning is the plan encoding or the goal.
  Batch sample(std::size_t batch_size, Rng& rng) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  std::size_t cond_dim() const { return cond_dim_; }
  const PlanStore& plans() const { return plans_; }
  PlanStore& plans() { return plans_; }

  /// Layout: "L2EREPLY" magic, u32 version, u64 capacity, state/action/cond
  /// dims, u64 size, then the resident transitions oldest first as arrays
  /// (states, actions, rewards, next states, flags, plan ids, goals), then the
  /// plan store.
  void save(const std::filesystem::path& path) const;
  static ReplayBuffer load(const std::filesystem::path& path);

 private:
  std::size_t physical(std::size_t i) const { return (head_ + capacity_ - size_ + i) % capacity_; }
  void write_slot(std::size_t slot, const Transition& t);
  void fill_column(std::size_t slot, Eigen::Ref<Eigen::VectorXd> obs,
                   Eigen::Ref<Eigen::VectorXd> next_obs) const;

  std::size_t capacity_;
  std::size_t state_dim_;
  std::size_t action_dim_;
  std::size_t cond_dim_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;  // next slot to write

  std::vector<double> states_;
  std::vector<double> actions_;
  std::vector<double> rewards_;
  std::vector<double> next_states_;
  std::vector<std::uint8_t> flags_;  // bit 0 success, bit 1 absorbing
  std::vector<PlanId> plan_ids_;
  std::vector<double> goals_;
  PlanStore plans_;
};

/// S^uni_n: n distinct resident plans drawn uniformly without replacement
/// (all of them if fewer are stored).
std::vector<PlanId> uniform_replay_plans(const PlanStore& store, std::size_t n, Rng& rng);

/// Sum of R_P over the episode's transitions under `plan`.
double episode_return(std::span<const Transition> episode, const Plan& plan,
                      const ShapingConfig& shaping);

struct ScoredPlan {
  PlanId id = kNoPlan;
  double score = 0.0;
};

/// S^bias_{n,m}: draws m plans as S^uni_m does, scores each by the return the
/// episode would have earned under it and keeps the n best. Ties keep the
/// sampling order. `scored`, if given, receives every candidate in sampling order.
std::vector<PlanId> biased_replay_plans(const PlanStore& store, std::span<const Transition> episode,
                                        std::size_t n, std::size_t m, const ShapingConfig& shaping,
                                        Rng& rng, std::vector<ScoredPlan>* scored = nullptr);

/// Copies of the episode's transitions conditioned on `plan` with rewards recomputed.
Episode relabel_episode(std::span<const Transition> episode, PlanId id, const Plan& plan,
                        const ShapingConfig& shaping);

enum class HerStrategy { Future, Episode };

struct HerReplayGoal {
  std::size_t transition = 0;  // relabeled transition t
  std::size_t source = 0;      // t' whose achieved goal ag(s'_t') is used
  Vec2 goal;
};

/// Future: k goals per transition from t' drawn uniformly in {t+1, ..., T-1}
/// (none for the last transition). Episode: t' uniform over the whole episode.
std::vector<HerReplayGoal> her_replay_goals(std::span<const Transition> episode,
                                            HerStrategy strategy, int k,
                                            const ShapingConfig& shaping, Rng& rng);

/// Copy of `t` conditioned on a bare goal, rewarded with the sparse reward.
Transition her_relabel(const Transition& t, Vec2 goal, const ShapingConfig& shaping);

}  // namespace l2e
