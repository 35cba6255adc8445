#pragma once

#include "dmp/search.hpp"

namespace dmp {

// Uniform input sampling benchmark: successors integrate a constant per-axis
// jerk from an odd n-point grid over a fixed duration tau.
struct BaselineConfig {
  int inputs_per_axis = 3;  // odd, includes zero input
  double u_max = 0.0;       // m/s^3; 0 derives a_max / tau
  double tau = 1.0;         // s
  int depth_limit = 64;

  void validate() const {
    if (inputs_per_axis < 1 || inputs_per_axis % 2 == 0)
      throw std::invalid_argument("BaselineConfig: inputs_per_axis must be odd and >= 1");
    if (!(tau > 0.0) || depth_limit < 1 || u_max < 0.0)
      throw std::invalid_argument("BaselineConfig: invalid tau/depth/u_max");
  }

  double effective_u_max(const DynamicsLimits& limits) const {
    return u_max > 0.0 ? u_max : limits.a_max / tau;
  }
};

namespace detail {

inline Trajectory constant_jerk_segment(const FullState& s, const Vec& u, double tau) {
  Segment seg;
  seg.duration = tau;
  seg.coeffs = Eigen::MatrixXd::Zero(s.dim(), 6);
  for (int a = 0; a < s.dim(); ++a) {
    seg.coeffs(a, 0) = s.position[a];
    seg.coeffs(a, 1) = s.velocity[a];
    seg.coeffs(a, 2) = 0.5 * s.acceleration[a];
    seg.coeffs(a, 3) = u[a] / 6.0;
  }
  return Trajectory({seg});
}

// exact per-axis |v|,|a| bound check for the constant-jerk segment
inline bool constant_jerk_within(const FullState& s, const Vec& u, double tau,
                                 const DynamicsLimits& lim, double tol = 1e-9) {
  for (int a = 0; a < s.dim(); ++a) {
    const double a0 = s.acceleration[a];
    const double a1 = a0 + u[a] * tau;
    if (std::abs(a1) > lim.a_max + tol) return false;
    const double v0 = s.velocity[a];
    const double v1 = v0 + a0 * tau + 0.5 * u[a] * tau * tau;
    if (std::abs(v1) > lim.v_max + tol) return false;
    if (u[a] != 0.0) {
      const double t_star = -a0 / u[a];  // acceleration zero crossing
      if (t_star > 0.0 && t_star < tau) {
        const double v_ext = v0 + a0 * t_star + 0.5 * u[a] * t_star * t_star;
        if (std::abs(v_ext) > lim.v_max + tol) return false;
      }
    }
  }
  return true;
}

}  // namespace detail

// Best-first search over the input lattice with the same goal acceptance,
// outcomes, budget semantics and cost metric as the dispersion planner.
inline PlanResult baseline_plan(const OccupancyGrid& grid, const FullState& start,
                                const GoalSpec& goal, const DynamicsLimits& limits,
                                const BaselineConfig& cfg, const Budget& budget,
                                double dt_check = 0.0) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  validate(start, "baseline_plan start");
  goal.validate();
  cfg.validate();
  limits.validate();
  if (!limits.state_within(start, 1e-9))
    throw InvalidStartError("baseline_plan: start state outside dynamic limits");
  if (grid.occupied_world(start.position))
    throw InvalidStartError("baseline_plan: start position in collision or outside the grid");

  PlanResult result;
  if (dt_check <= 0.0) dt_check = grid.resolution / limits.v_max;
  const double u_max = cfg.effective_u_max(limits);
  const int n = cfg.inputs_per_axis;
  const int dim = start.dim();

  Quantization quant;
  quant.pos_cell = grid.resolution;
  quant.acc_cell = std::max(1e-9, u_max * cfg.tau / std::max(1, n - 1));
  quant.vel_cell = std::max(1e-9, 0.5 * u_max * cfg.tau * cfg.tau / std::max(1, n - 1));

  if (goal.satisfied(start.position, start.velocity)) {
    result.outcome = PlanOutcome::kSuccess;
    result.trajectory = detail::zero_primitive(start).trajectory;
    result.stats.wall_time = elapsed();
    return result;
  }

  // enumerate the n^dim input combinations once
  std::vector<Vec> inputs;
  {
    std::vector<double> levels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      levels[static_cast<std::size_t>(i)] =
          n == 1 ? 0.0 : -u_max + 2.0 * u_max * i / static_cast<double>(n - 1);
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    while (true) {
      Vec u(dim);
      for (int a = 0; a < dim; ++a) u[a] = levels[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      inputs.push_back(std::move(u));
      int axis = 0;
      while (axis < dim && ++idx[static_cast<std::size_t>(axis)] == n) {
        idx[static_cast<std::size_t>(axis)] = 0;
        ++axis;
      }
      if (axis == dim) break;
    }
  }

  struct Node {
    FullState state;
    double g;
    int parent;
    int depth;
    Trajectory arrival;  // empty for the root
  };
  struct Entry {
    double f;
    double g;
    std::uint64_t seq;
    int node;
  };
  struct Order {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.f != b.f) return a.f > b.f;
      if (a.g != b.g) return a.g < b.g;
      return a.seq > b.seq;
    }
  };

  std::vector<Node> arena;
  std::priority_queue<Entry, std::vector<Entry>, Order> open;
  std::unordered_map<StateKey, double, StateKeyHash> best_g;
  std::unordered_set<StateKey, StateKeyHash> closed;
  std::uint64_t seq = 0;

  arena.push_back({start, 0.0, -1, 0, Trajectory{}});
  best_g[state_key(start, quant)] = 0.0;
  open.push({heuristic(start, goal, limits), 0.0, seq++, 0});

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
    const StateKey key = state_key(arena[static_cast<std::size_t>(entry.node)].state, quant);
    if (closed.count(key)) continue;
    closed.insert(key);
    ++result.stats.nodes_expanded;

    {
      const auto& node = arena[static_cast<std::size_t>(entry.node)];
      if (goal.satisfied(node.state.position, node.state.velocity)) {
        Trajectory full;
        std::vector<int> chain;
        int cursor = entry.node;
        while (cursor >= 0) {
          chain.push_back(cursor);
          cursor = arena[static_cast<std::size_t>(cursor)].parent;
        }
        std::reverse(chain.begin(), chain.end());
        for (int idx : chain)
          if (!arena[static_cast<std::size_t>(idx)].arrival.empty())
            full.append(arena[static_cast<std::size_t>(idx)].arrival);
        if (full.empty()) full = detail::zero_primitive(start).trajectory;
        result.outcome = PlanOutcome::kSuccess;
        result.trajectory = std::move(full);
        result.cost = node.g;
        result.stats.wall_time = elapsed();
        return result;
      }
      if (node.depth >= cfg.depth_limit) continue;
    }

    for (const auto& u : inputs) {
      const FullState state = arena[static_cast<std::size_t>(entry.node)].state;
      if (!detail::constant_jerk_within(state, u, cfg.tau, limits)) continue;
      Trajectory seg = detail::constant_jerk_segment(state, u, cfg.tau);
      FullState succ = seg.state_at(cfg.tau);
      const StateKey succ_key = state_key(succ, quant);
      if (closed.count(succ_key)) continue;
      const double g2 =
          arena[static_cast<std::size_t>(entry.node)].g + limits.rho * cfg.tau + u.squaredNorm() * cfg.tau;
      const auto it = best_g.find(succ_key);
      if (it != best_g.end() && it->second <= g2) continue;
      ++result.stats.collision_checks;
      if (!is_trajectory_free(grid, seg, dt_check).free) continue;
      best_g[succ_key] = g2;
      const double h = heuristic(succ, goal, limits);
      arena.push_back({std::move(succ), g2, entry.node,
                       arena[static_cast<std::size_t>(entry.node)].depth + 1, std::move(seg)});
      open.push({g2 + h, g2, seq++, static_cast<int>(arena.size()) - 1});
    }
  }

  result.outcome = PlanOutcome::kExhausted;
  result.stats.wall_time = elapsed();
  return result;
}

}  // namespace dmp
