#pragma once

#include <chrono>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "dmp/collision.hpp"
#include "dmp/graph.hpp"

namespace dmp {

struct GoalSpec {
  Vec position;                                               // m, dim D
  double r_goal = 1.0;                                        // m
  double terminal_speed = std::numeric_limits<double>::max();  // m/s, Euclidean

  void validate() const {
    if (!(r_goal > 0.0)) throw std::invalid_argument("GoalSpec: r_goal must be > 0");
  }

  bool satisfied(const Vec& pos, const Vec& vel) const {
    return (pos - position).norm() <= r_goal && vel.norm() <= terminal_speed;
  }
};

// Wall-clock budget for flight, or an expansion-count budget in virtual-time
// mode, where runs must be bit-reproducible.
struct Budget {
  double wall_seconds = std::numeric_limits<double>::max();
  std::optional<std::int64_t> max_expansions;

  static Budget wall(double seconds) {
    Budget b;
    b.wall_seconds = seconds;
    return b;
  }
  static Budget expansions(std::int64_t n) {
    Budget b;
    b.max_expansions = n;
    return b;
  }

  // fraction of the budget a finished plan consumed, for the margin trigger
  double fraction_used(std::int64_t expansions, double wall_time) const {
    if (max_expansions)
      return *max_expansions > 0
                 ? static_cast<double>(expansions) / static_cast<double>(*max_expansions)
                 : std::numeric_limits<double>::max();
    return wall_seconds > 0.0 ? wall_time / wall_seconds : std::numeric_limits<double>::max();
  }
};

enum class PlanOutcome { kSuccess, kTimeout, kExhausted };

inline const char* to_string(PlanOutcome o) {
  switch (o) {
    case PlanOutcome::kSuccess: return "success";
    case PlanOutcome::kTimeout: return "timeout";
    default: return "exhausted";
  }
}

struct PlanStats {
  std::int64_t nodes_expanded = 0;
  std::int64_t collision_checks = 0;
  double wall_time = 0.0;  // s
};

struct PlanResult {
  PlanOutcome outcome = PlanOutcome::kExhausted;
  Trajectory trajectory;  // populated on success
  double cost = 0.0;
  PlanStats stats;
};

// Quantized state cell for duplicate detection on a continuous lattice.
struct StateKey {
  std::array<std::int64_t, 9> bins{};
  int used = 0;

  bool operator==(const StateKey& o) const {
    if (used != o.used) return false;
    for (int i = 0; i < used; ++i)
      if (bins[static_cast<std::size_t>(i)] != o.bins[static_cast<std::size_t>(i)]) return false;
    return true;
  }
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < k.used; ++i) {
      h ^= static_cast<std::uint64_t>(k.bins[static_cast<std::size_t>(i)]);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

struct Quantization {
  double pos_cell = 0.25;
  double vel_cell = 0.1;
  double acc_cell = 0.1;
};

inline StateKey state_key(const FullState& s, const Quantization& q) {
  if (!(q.pos_cell > 0.0) || !(q.vel_cell > 0.0) || !(q.acc_cell > 0.0))
    throw std::invalid_argument("state_key: quantization cells must be positive");
  StateKey key;
  const int d = s.dim();
  key.used = 3 * d;
  for (int a = 0; a < d; ++a) {
    key.bins[static_cast<std::size_t>(a)] =
        static_cast<std::int64_t>(std::floor(s.position[a] / q.pos_cell));
    key.bins[static_cast<std::size_t>(d + a)] =
        static_cast<std::int64_t>(std::floor(s.velocity[a] / q.vel_cell));
    key.bins[static_cast<std::size_t>(2 * d + a)] =
        static_cast<std::int64_t>(std::floor(s.acceleration[a] / q.acc_cell));
  }
  return key;
}

// Admissible cost-to-go: any trajectory covering the remaining distance needs
// at least dist / v_max_euclidean seconds, and jerk cost is nonnegative.
inline double heuristic_to_position(const Vec& pos, const GoalSpec& goal,
                                    const DynamicsLimits& limits) {
  const double dist = (goal.position - pos).norm();
  const double v = limits.v_max_euclidean(static_cast<int>(pos.size()));
  return limits.rho * std::max(0.0, dist - goal.r_goal) / v;
}

inline double heuristic(const FullState& state, const GoalSpec& goal,
                        const DynamicsLimits& limits) {
  return heuristic_to_position(state.position, goal, limits);
}

struct PlanOptions {
  int connect_k = 8;       // start connections attempted
  double dt_check = 0.0;   // 0: grid resolution / v_max
  double pos_quantum = 0.0;  // 0: grid resolution
  TimeSearchParams bvp;
};

struct StartConnection {
  int vertex = -1;
  MotionPrimitive primitive;
};

// Online BVPs from an off-graph start state onto the lattice anchored at the
// start position: vertex w is targeted at (start.pos + w.pos, w.vel, w.acc).
// The k vertices nearest by heuristic cost are tried; results sorted by cost.
inline std::vector<StartConnection> connect_start_vertices(const DispersionGraph& graph,
                                                           const FullState& start, int k,
                                                           const DynamicsLimits& limits,
                                                           const TimeSearchParams& params = {}) {
  if (k < 1) throw std::invalid_argument("connect_start: k must be >= 1");
  std::vector<std::pair<double, int>> by_heuristic;
  by_heuristic.reserve(graph.vertices.size());
  const double v = limits.v_max_euclidean(start.dim());
  for (int i = 0; i < static_cast<int>(graph.vertices.size()); ++i) {
    const double dist = graph.vertices[static_cast<std::size_t>(i)].position.norm();
    by_heuristic.push_back({limits.rho * dist / v, i});
  }
  std::sort(by_heuristic.begin(), by_heuristic.end());
  by_heuristic.resize(std::min<std::size_t>(by_heuristic.size(), static_cast<std::size_t>(k)));

  std::vector<StartConnection> out;
  out.reserve(by_heuristic.size());
  for (const auto& [h, i] : by_heuristic) {
    const FullState target = graph.vertices[static_cast<std::size_t>(i)].translated(start.position);
    out.push_back({i, optimize_primitive(start, target, limits, params)});
  }
  std::stable_sort(out.begin(), out.end(), [](const StartConnection& a, const StartConnection& b) {
    return a.primitive.cost < b.primitive.cost;
  });
  return out;
}

inline std::vector<MotionPrimitive> connect_start(const DispersionGraph& graph,
                                                  const FullState& start, int k,
                                                  const DynamicsLimits& limits,
                                                  const TimeSearchParams& params = {}) {
  std::vector<MotionPrimitive> out;
  for (auto& c : connect_start_vertices(graph, start, k, limits, params))
    out.push_back(std::move(c.primitive));
  return out;
}

namespace detail {

struct SearchNode {
  int vertex = -1;      // graph vertex id
  Vec position;         // world anchor of the vertex
  double g = 0.0;
  int parent = -1;      // index into the node arena; -1 for start connections
  int via_edge = -1;    // graph edge index, or -(1+i) for start connection i
};

struct OpenEntry {
  double f;
  double g;
  std::uint64_t seq;
  int node;
};

// f ascending; ties prefer larger g, then earlier insertion
struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.seq > b.seq;
  }
};

inline StateKey lattice_key(int vertex, const Vec& pos, double quantum) {
  StateKey key;
  key.used = static_cast<int>(pos.size()) + 1;
  key.bins[0] = vertex;
  for (int a = 0; a < pos.size(); ++a)
    key.bins[static_cast<std::size_t>(a + 1)] =
        static_cast<std::int64_t>(std::floor(pos[a] / quantum));
  return key;
}

}  // namespace detail

// A* over (vertex id, translated position) nodes. Successors are the graph's
// outgoing edges translated to the node's anchor, collision-checked before
// insertion. Timeout is only declared between expansions.
inline PlanResult plan(const DispersionGraph& graph, const OccupancyGrid& grid,
                       const FullState& start, const GoalSpec& goal, const Budget& budget,
                       const PlanOptions& options = {}) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  validate(start, "plan start");
  goal.validate();
  const DynamicsLimits& limits = graph.limits;
  if (!limits.state_within(start, 1e-9))
    throw InvalidStartError("plan: start state outside dynamic limits");
  if (grid.occupied_world(start.position))
    throw InvalidStartError("plan: start position in collision or outside the grid");

  PlanResult result;
  const double dt_check =
      options.dt_check > 0.0 ? options.dt_check : grid.resolution / limits.v_max;
  const double quantum = options.pos_quantum > 0.0 ? options.pos_quantum : grid.resolution;

  if (goal.satisfied(start.position, start.velocity)) {
    result.outcome = PlanOutcome::kSuccess;
    result.trajectory = detail::zero_primitive(start).trajectory;
    result.stats.wall_time = elapsed();
    return result;
  }

  const auto adjacency = graph.adjacency();
  std::vector<detail::SearchNode> arena;
  std::priority_queue<detail::OpenEntry, std::vector<detail::OpenEntry>, detail::OpenOrder> open;
  std::unordered_map<StateKey, double, StateKeyHash> best_g;
  std::unordered_set<StateKey, StateKeyHash> closed;
  std::uint64_t seq = 0;

  const auto connections =
      connect_start_vertices(graph, start, options.connect_k, limits, options.bvp);
  for (int i = 0; i < static_cast<int>(connections.size()); ++i) {
    const auto& prim = connections[static_cast<std::size_t>(i)].primitive;
    ++result.stats.collision_checks;
    if (!is_trajectory_free(grid, prim.trajectory, dt_check).free) continue;
    detail::SearchNode node;
    node.vertex = connections[static_cast<std::size_t>(i)].vertex;
    node.position = prim.end.position;
    node.g = prim.cost;
    node.parent = -1;
    node.via_edge = -(1 + i);
    const StateKey key = detail::lattice_key(node.vertex, node.position, quantum);
    const auto it = best_g.find(key);
    if (it != best_g.end() && it->second <= node.g) continue;
    best_g[key] = node.g;
    arena.push_back(node);
    open.push({node.g + heuristic_to_position(node.position, goal, limits), node.g, seq++,
               static_cast<int>(arena.size()) - 1});
  }

  while (!open.empty()) {
    if (budget.max_expansions && result.stats.nodes_expanded >= *budget.max_expansions) {
      result.outcome = PlanOutcome::kTimeout;
      result.stats.wall_time = elapsed();
      return result;
    }
    if (!budget.max_expansions && elapsed() >= budget.wall_seconds) {
      result.outcome = PlanOutcome::kTimeout;
      result.stats.wall_time = elapsed();
      return result;
    }

    const auto entry = open.top();
    open.pop();
    // copy: arena reallocates while successors are appended
    const detail::SearchNode node = arena[static_cast<std::size_t>(entry.node)];
    const StateKey key = detail::lattice_key(node.vertex, node.position, quantum);
    if (closed.count(key)) continue;
    closed.insert(key);
    ++result.stats.nodes_expanded;

    const auto& vstate = graph.vertices[static_cast<std::size_t>(node.vertex)];
    if (goal.satisfied(node.position, vstate.velocity)) {
      // reconstruct by walking parents, then translate edge trajectories
      std::vector<int> chain;
      int cursor = entry.node;
      while (cursor >= 0) {
        chain.push_back(cursor);
        cursor = arena[static_cast<std::size_t>(cursor)].parent;
      }
      std::reverse(chain.begin(), chain.end());
      Trajectory full;
      for (int idx : chain) {
        const auto& n = arena[static_cast<std::size_t>(idx)];
        if (n.via_edge < 0) {
          full.append(connections[static_cast<std::size_t>(-(n.via_edge) - 1)].primitive.trajectory);
        } else {
          const auto& e = graph.edges[static_cast<std::size_t>(n.via_edge)];
          const auto& u = graph.vertices[static_cast<std::size_t>(e.from)];
          const auto& p = arena[static_cast<std::size_t>(n.parent)];
          full.append(e.trajectory.translated(p.position - u.position));
        }
      }
      result.outcome = PlanOutcome::kSuccess;
      result.trajectory = std::move(full);
      result.cost = node.g;
      result.stats.wall_time = elapsed();
      return result;
    }

    for (int eidx : adjacency[static_cast<std::size_t>(node.vertex)]) {
      const auto& e = graph.edges[static_cast<std::size_t>(eidx)];
      const auto& u = graph.vertices[static_cast<std::size_t>(e.from)];
      const auto& v = graph.vertices[static_cast<std::size_t>(e.to)];
      Vec new_pos = node.position + (v.position - u.position);
      const StateKey succ_key = detail::lattice_key(e.to, new_pos, quantum);
      if (closed.count(succ_key)) continue;
      const double g2 = node.g + e.cost;
      const auto it = best_g.find(succ_key);
      if (it != best_g.end() && it->second <= g2) continue;
      ++result.stats.collision_checks;
      if (!is_trajectory_free(grid, e.trajectory.translated(node.position - u.position), dt_check)
               .free)
        continue;
      best_g[succ_key] = g2;
      detail::SearchNode succ;
      succ.vertex = e.to;
      succ.position = std::move(new_pos);
      succ.g = g2;
      succ.parent = entry.node;
      succ.via_edge = eidx;
      arena.push_back(std::move(succ));
      open.push({g2 + heuristic_to_position(arena.back().position, goal, limits), g2, seq++,
                 static_cast<int>(arena.size()) - 1});
    }
  }

  result.outcome = PlanOutcome::kExhausted;
  result.stats.wall_time = elapsed();
  return result;
}

}  // namespace dmp
