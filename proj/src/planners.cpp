#include "l2e/planners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>

namespace l2e {

namespace {

constexpr double kLegEpsilon = 1e-12;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string_view planner_name(PlannerKind k) { return k == PlannerKind::Rrt ? "rrt" : "manhattan"; }

PlannerKind parse_planner(std::string_view s) {
  if (s == "rrt") return PlannerKind::Rrt;
  if (s == "manhattan") return PlannerKind::Manhattan;
  throw std::invalid_argument("unknown planner: " + std::string(s));
}

/// Box positions visited by axis-aligned legs: x first, then y, per target.
std::vector<std::pair<Vec2, Vec2>> manhattan_legs(Vec2 from, std::span<const Vec2> targets) {
  std::vector<std::pair<Vec2, Vec2>> legs;
  Vec2 cur = from;
  for (const Vec2& t : targets) {
    const Vec2 corner{t.x, cur.y};
    legs.emplace_back(cur, corner);
    legs.emplace_back(corner, t);
    cur = t;
  }
  return legs;
}

Rect swept_box(Vec2 from, Vec2 to, double half) {
  return {(from + to) * 0.5,
          {0.5 * std::abs(to.x - from.x) + half, 0.5 * std::abs(to.y - from.y) + half}};
}

Plan build_manhattan(const State& start, std::span<const Vec2> targets, Vec2 goal,
                     const EnvConfig& env, const ManhattanOptions& options,
                     std::optional<Vec2> intermediate) {
  const Vec2 box0 = start.box();
  const double box_z = start[5];
  const PlanMeta meta{PlannerKind::Manhattan, box0, intermediate};

  std::vector<double> path;
  auto add = [&](Vec3 ee, Vec2 box) {
    path.insert(path.end(), {ee.x, ee.y, ee.z, box.x, box.y, box_z});
  };
  Vec3 ee = start.ee();
  Vec2 box = box0;
  add(ee, box);

  if (distance(box0, goal) > env.goal_tolerance) {
    const double standoff = env.box_half() + env.ee_radius;
    for (const auto& [from, to] : manhattan_legs(box0, targets)) {
      const Vec2 delta = to - from;
      const double len = delta.norm();
      if (len < kLegEpsilon) continue;
      const Vec2 dir = delta * (1.0 / len);
      const Vec2 push_start = from - dir * standoff;
      if (ee.z < options.lift_height) {
        ee.z = options.lift_height;
        add(ee, box);
      }
      ee = {push_start.x, push_start.y, options.lift_height};
      add(ee, box);
      ee.z = box_z;
      add(ee, box);
      const Vec2 push_end = push_start + delta;
      ee = {push_end.x, push_end.y, box_z};
      box = to;
      add(ee, box);
    }
  }
  // Arc length is measured on the end-effector path.
  std::vector<double> flat = resample_polyline(path, kPushingWaypointDim, 3, options.length);
  return Plan(intermediate ? Task::ObstaclePushing : env.task, kPushingWaypointDim,
              std::move(flat), goal, meta);
}

// --- RRT helpers -----------------------------------------------------------

std::vector<Vec2> grow_tree(Vec2 start, Vec2 goal, const ObstacleSet& obstacles, Rng& rng,
                            const RrtOptions& o) {
  std::vector<Vec2> nodes{start};
  std::vector<int> parent{-1};
  for (int it = 0; it < o.max_iterations; ++it) {
    const Vec2 q = bernoulli(rng, o.goal_bias) ? goal
                                               : Vec2{uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = distance(nodes[i], q);
      if (d < best) {
        best = d;
        nearest = i;
      }
    }
    if (best == 0.0) continue;
    const Vec2 from = nodes[nearest];
    const Vec2 next = best <= o.step ? q : from + (q - from) * (o.step / best);
    if (segment_intersects_any(from, next, obstacles)) continue;
    nodes.push_back(next);
    parent.push_back(static_cast<int>(nearest));
    if (distance(next, goal) <= o.step && !segment_intersects_any(next, goal, obstacles)) {
      std::vector<Vec2> path{goal};
      if (!(next == goal)) path.push_back(next);
      for (int p = parent.back(); p >= 0; p = parent[p]) path.push_back(nodes[p]);
      std::reverse(path.begin(), path.end());
      return path;
    }
  }
  return {};
}

void shortcut(std::vector<Vec2>& path, const ObstacleSet& obstacles, Rng& rng, int passes) {
  for (int pass = 0; pass < passes && path.size() > 2; ++pass) {
    std::uniform_int_distribution<std::size_t> pick_i(0, path.size() - 3);
    const std::size_t i = pick_i(rng);
    std::uniform_int_distribution<std::size_t> pick_j(i + 2, path.size() - 1);
    const std::size_t j = pick_j(rng);
    if (!segment_intersects_any(path[i], path[j], obstacles)) {
      path.erase(path.begin() + static_cast<std::ptrdiff_t>(i + 1),
                 path.begin() + static_cast<std::ptrdiff_t>(j));
    }
  }
  // Greedy pass: from each kept vertex jump to the farthest visible one.
  std::vector<Vec2> out{path.front()};
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    std::size_t j = path.size() - 1;
    while (j > i + 1 && segment_intersects_any(path[i], path[j], obstacles)) --j;
    out.push_back(path[j]);
    i = j;
  }
  path = std::move(out);
}

/// Places `count` points on the polyline, keeping every vertex and spreading
/// the remaining points over segments in proportion to their length.
std::vector<double> distribute_on_polyline(const std::vector<Vec2>& vertices, std::size_t count) {
  const std::size_t segments = vertices.size() - 1;
  const std::size_t spare = count - vertices.size();
  std::vector<double> lengths(segments);
  for (std::size_t s = 0; s < segments; ++s) lengths[s] = distance(vertices[s], vertices[s + 1]);
  const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);

  // Largest-remainder apportionment of the spare points.
  std::vector<std::size_t> per(segments, 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t used = 0;
  for (std::size_t s = 0; s < segments; ++s) {
    const double share = total > 0 ? lengths[s] / total * static_cast<double>(spare) : 0.0;
    per[s] = static_cast<std::size_t>(std::floor(share));
    used += per[s];
    remainders.emplace_back(share - std::floor(share), s);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; used < spare; ++r, ++used) ++per[remainders[r % segments].second];

  std::vector<double> flat;
  flat.reserve(2 * count);
  for (std::size_t s = 0; s < segments; ++s) {
    const Vec2 a = vertices[s];
    const Vec2 b = vertices[s + 1];
    flat.insert(flat.end(), {a.x, a.y});
    for (std::size_t k = 1; k <= per[s]; ++k) {
      const Vec2 p = a + (b - a) * (static_cast<double>(k) / static_cast<double>(per[s] + 1));
      flat.insert(flat.end(), {p.x, p.y});
    }
  }
  flat.insert(flat.end(), {vertices.back().x, vertices.back().y});
  return flat;
}

class ManhattanPlanner final : public Planner {
 public:
  ManhattanPlanner(EnvConfig env, int contacts, ManhattanOptions options)
      : env_(std::move(env)), contacts_(contacts), options_(options) {}

  Plan plan(const State& start, Vec2 goal, const ObstacleSet&, Rng& rng) const override {
    return manhattan_plan(start, goal, contacts_, env_, rng, options_);
  }

 private:
  EnvConfig env_;
  int contacts_;
  ManhattanOptions options_;
};

class RrtPlanner final : public Planner {
 public:
  explicit RrtPlanner(RrtOptions options) : options_(options) {}

  Plan plan(const State& start, Vec2 goal, const ObstacleSet& obstacles,
            Rng& rng) const override {
    return rrt_plan(start.agent(), goal, obstacles, rng, options_);
  }

 private:
  RrtOptions options_;
};

}  // namespace

// --- Plan ------------------------------------------------------------------

Plan::Plan(Task task, std::size_t dim, std::vector<double> flat, Vec2 goal, PlanMeta meta)
    : task_(task), dim_(dim), flat_(std::move(flat)), goal_(goal), meta_(meta) {
  if (dim_ == 0 || flat_.size() % dim_ != 0) {
    throw std::invalid_argument("Plan: waypoint data does not match dimension");
  }
}

Vec2 Plan::achieved(std::size_t i) const {
  const auto w = waypoint(i);
  return is_pushing(task_) ? Vec2{w[3], w[4]} : Vec2{w[0], w[1]};
}

std::uint64_t Plan::content_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  const auto task = static_cast<int>(task_);
  h = fnv1a(h, &task, sizeof task);
  h = fnv1a(h, &dim_, sizeof dim_);
  h = fnv1a(h, flat_.data(), flat_.size() * sizeof(double));
  h = fnv1a(h, &goal_, sizeof goal_);
  if (meta_.intermediate) h = fnv1a(h, &*meta_.intermediate, sizeof(Vec2));
  return h;
}

std::size_t default_plan_length(Task task) {
  switch (task) {
    case Task::BasicPushing:
      return kBasicPlanLength;
    case Task::ObstaclePushing:
      return kObstaclePlanLength;
    case Task::Maze:
      return kMazePlanLength;
  }
  return kBasicPlanLength;
}

std::vector<double> resample_polyline(std::span<const double> points, std::size_t dim,
                                      std::size_t arc_dims, std::size_t count) {
  const std::size_t n = points.size() / dim;
  if (n == 0 || count == 0) throw std::invalid_argument("resample_polyline: empty input");
  auto vertex = [&](std::size_t i) { return points.subspan(i * dim, dim); };

  std::vector<double> cumulative(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t d = 0; d < arc_dims; ++d) {
      const double diff = vertex(i)[d] - vertex(i - 1)[d];
      sq += diff * diff;
    }
    cumulative[i] = cumulative[i - 1] + std::sqrt(sq);
  }
  const double total = cumulative.back();

  std::vector<double> out;
  out.reserve(count * dim);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    if (total == 0.0 || k + 1 == count) {
      const auto v = total == 0.0 ? vertex(0) : vertex(n - 1);
      out.insert(out.end(), v.begin(), v.end());
      continue;
    }
    const double target = total * static_cast<double>(k) / static_cast<double>(count - 1);
    while (seg + 2 < n && cumulative[seg + 1] < target) ++seg;
    const double span_len = cumulative[seg + 1] - cumulative[seg];
    const double t = span_len > 0.0 ? std::clamp((target - cumulative[seg]) / span_len, 0.0, 1.0)
                                    : 0.0;
    const auto a = vertex(seg);
    const auto b = vertex(seg + 1);
    for (std::size_t d = 0; d < dim; ++d) out.push_back(a[d] + t * (b[d] - a[d]));
  }
  return out;
}

bool valid_intermediate(Vec2 box, Vec2 intermediate, Vec2 goal, const EnvConfig& env) {
  const double h = env.box_half();
  const double lim = env.half_table() - h;
  if (std::abs(intermediate.x) > lim || std::abs(intermediate.y) > lim) return false;
  const Rect& wall = env.pushing_obstacle;
  if (wall.distance_to(intermediate) < h * std::sqrt(2.0)) return false;
  const Vec2 targets[] = {intermediate, goal};
  for (const auto& [from, to] : manhattan_legs(box, targets)) {
    if (swept_box(from, to, h).overlaps(wall)) return false;
  }
  return true;
}

Plan manhattan_plan_via(const State& start, Vec2 intermediate, Vec2 goal, const EnvConfig& env,
                        const ManhattanOptions& options) {
  const Vec2 targets[] = {intermediate, goal};
  return build_manhattan(start, targets, goal, env, options, intermediate);
}

Plan manhattan_plan(const State& start, Vec2 goal, int contacts, const EnvConfig& env, Rng& rng,
                    const ManhattanOptions& options) {
  if (start.dim() != State::kPushingDim) {
    throw std::invalid_argument("manhattan_plan: pushing state required");
  }
  if (contacts == 2) {
    const Vec2 targets[] = {goal};
    return build_manhattan(start, targets, goal, env, options, std::nullopt);
  }
  if (contacts != 4) throw std::invalid_argument("manhattan_plan: contacts must be 2 or 4");

  const double lim = env.half_table() - env.box_half();
  for (int attempt = 0; attempt < options.intermediate_attempts; ++attempt) {
    const Vec2 m{uniform(rng, -lim, lim), uniform(rng, -lim, lim)};
    if (valid_intermediate(start.box(), m, goal, env)) {
      return manhattan_plan_via(start, m, goal, env, options);
    }
  }
  throw PlanningError("manhattan_plan: no collision-free intermediate box position found");
}

Plan rrt_plan(Vec2 start, Vec2 goal, const ObstacleSet& obstacles, Rng& rng,
              const RrtOptions& options) {
  if (options.length < 2) throw std::invalid_argument("rrt_plan: length must be at least 2");
  const PlanMeta meta{PlannerKind::Rrt, start, std::nullopt};
  if (start == goal) {
    std::vector<double> flat;
    for (std::size_t i = 0; i < options.length; ++i) flat.insert(flat.end(), {start.x, start.y});
    return Plan(Task::Maze, 2, std::move(flat), goal, meta);
  }
  for (int attempt = 0; attempt < options.attempts; ++attempt) {
    std::vector<Vec2> path = grow_tree(start, goal, obstacles, rng, options);
    if (path.empty()) continue;
    shortcut(path, obstacles, rng, options.shortcut_passes);
    if (path.size() > options.length) continue;
    return Plan(Task::Maze, 2, distribute_on_polyline(path, options.length), goal, meta);
  }
  throw PlanningError("rrt_plan: tree did not reach the goal");
}

std::vector<std::size_t> subsample_indices(std::size_t length, std::size_t n) {
  if (n < 2 || n > length) throw std::invalid_argument("subsample_plan: need 2 <= n <= L");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i * (length - 1) / (n - 1);
  return idx;
}

Plan subsample_plan(const Plan& plan, std::size_t n) {
  std::vector<double> flat;
  for (std::size_t i : subsample_indices(plan.size(), n)) {
    const auto w = plan.waypoint(i);
    flat.insert(flat.end(), w.begin(), w.end());
  }
  return Plan(plan.task(), plan.dim(), std::move(flat), plan.goal(), plan.meta());
}

std::string serialize_plan(const Plan& plan) {
  std::string out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  };
  out += std::to_string(plan.size()) + " " + std::to_string(plan.dim()) + " ";
  num(plan.goal().x);
  out += ' ';
  num(plan.goal().y);
  out += " " + std::string(task_name(plan.task())) + " " +
         std::string(planner_name(plan.meta().planner));
  if (plan.meta().intermediate) {
    out += ' ';
    num(plan.meta().intermediate->x);
    out += ' ';
    num(plan.meta().intermediate->y);
  }
  out += '\n';
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto w = plan.waypoint(i);
    for (std::size_t d = 0; d < w.size(); ++d) {
      if (d) out += ' ';
      num(w[d]);
    }
    out += '\n';
  }
  return out;
}

Plan parse_plan(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("parse_plan: missing header");
  std::istringstream h(header);
  std::size_t length = 0;
  std::size_t dim = 0;
  Vec2 goal;
  std::string task;
  std::string planner;
  if (!(h >> length >> dim >> goal.x >> goal.y >> task >> planner) || dim == 0) {
    throw std::invalid_argument("parse_plan: malformed header");
  }
  PlanMeta meta;
  meta.planner = parse_planner(planner);
  Vec2 mid;
  if (h >> mid.x >> mid.y) meta.intermediate = mid;

  std::vector<double> flat;
  flat.reserve(length * dim);
  double v = 0.0;
  while (in >> v) flat.push_back(v);
  if (flat.size() != length * dim) throw std::invalid_argument("parse_plan: waypoint count mismatch");
  const Task t = parse_task(task);
  meta.start = is_pushing(t) ? Vec2{flat[3], flat[4]} : Vec2{flat[0], flat[1]};
  return Plan(t, dim, std::move(flat), goal, meta);
}

std::unique_ptr<Planner> make_planner(const EnvConfig& env) {
  switch (env.task) {
    case Task::BasicPushing:
      return std::make_unique<ManhattanPlanner>(env, 2, ManhattanOptions{kBasicPlanLength});
    case Task::ObstaclePushing:
      return std::make_unique<ManhattanPlanner>(env, 4, ManhattanOptions{kObstaclePlanLength});
    case Task::Maze:
      return std::make_unique<RrtPlanner>(RrtOptions{});
  }
  throw std::invalid_argument("make_planner: unknown task");
}

}  // namespace l2e
