#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "dmp/trajectory.hpp"

namespace dmp {

namespace detail {

// Quintic x(t) = sum c[k] t^k for one axis, fitted to six boundary
// conditions over [0, T]. Among all C^2 interpolants of those conditions it
// minimizes the squared-jerk integral.
struct AxisQuintic {
  std::array<double, 6> c{};

  static AxisQuintic fit(double p0, double v0, double a0, double p1, double v1, double a1,
                         double T) {
    AxisQuintic q;
    q.c[0] = p0;
    q.c[1] = v0;
    q.c[2] = 0.5 * a0;
    const double T2 = T * T;
    const double T3 = T2 * T;
    const double dp = p1 - p0 - v0 * T - 0.5 * a0 * T2;
    const double dv = v1 - v0 - a0 * T;
    const double da = a1 - a0;
    q.c[3] = (20.0 * dp - 8.0 * dv * T + da * T2) / (2.0 * T3);
    q.c[4] = (-30.0 * dp + 14.0 * dv * T - 2.0 * da * T2) / (2.0 * T3 * T);
    q.c[5] = (12.0 * dp - 6.0 * dv * T + da * T2) / (2.0 * T3 * T2);
    return q;
  }

  double eval(double t, int order) const {
    double v = 0.0;
    for (int k = 5; k >= order; --k) {
      double factor = 1.0;
      for (int j = 0; j < order; ++j) factor *= static_cast<double>(k - j);
      v = v * t + factor * c[static_cast<std::size_t>(k)];
    }
    return v;
  }

  // Closed form of the integral of jerk^2 over [0, T]; jerk is the quadratic
  // A + B t + C t^2 below.
  double jerk_sq_integral(double T) const {
    const double A = 6.0 * c[3];
    const double B = 24.0 * c[4];
    const double C = 60.0 * c[5];
    const double T2 = T * T;
    const double T3 = T2 * T;
    return A * A * T + A * B * T2 + (B * B / 3.0 + 2.0 * A * C / 3.0) * T3 +
           0.5 * B * C * T2 * T2 + 0.2 * C * C * T2 * T3;
  }
};

inline std::array<AxisQuintic, 3> fit_axes(const FullState& a, const FullState& b, double T) {
  std::array<AxisQuintic, 3> axes{};
  for (int i = 0; i < a.dim(); ++i)
    axes[static_cast<std::size_t>(i)] =
        AxisQuintic::fit(a.position[i], a.velocity[i], a.acceleration[i], b.position[i],
                         b.velocity[i], b.acceleration[i], T);
  return axes;
}

inline double jerk_cost(const std::array<AxisQuintic, 3>& axes, int dim, double T) {
  double j = 0.0;
  for (int i = 0; i < dim; ++i) j += axes[static_cast<std::size_t>(i)].jerk_sq_integral(T);
  return j;
}

// Per-axis |v|, |a| bound check on a uniform time grid including both
// endpoints; early exit on the first violation.
inline bool axes_within_limits(const std::array<AxisQuintic, 3>& axes, int dim, double T,
                               const DynamicsLimits& lim, int samples, double tol) {
  const int n = std::max(2, samples);
  const double vb = lim.v_max + tol;
  const double ab = lim.a_max + tol;
  // derivative coefficient rows, highest power first for Horner
  double vc[3][5];
  double ac[3][4];
  for (int i = 0; i < dim; ++i) {
    const auto& c = axes[static_cast<std::size_t>(i)].c;
    for (int k = 0; k < 5; ++k) vc[i][k] = c[static_cast<std::size_t>(5 - k)] * (5.0 - k);
    for (int k = 0; k < 4; ++k)
      ac[i][k] = c[static_cast<std::size_t>(5 - k)] * (5.0 - k) * (4.0 - k);
  }
  const double dt = T / static_cast<double>(n);
  for (int k = 0; k <= n; ++k) {
    const double t = (k == n) ? T : dt * static_cast<double>(k);
    for (int i = 0; i < dim; ++i) {
      double v = vc[i][0];
      for (int j = 1; j < 5; ++j) v = v * t + vc[i][j];
      if (std::abs(v) > vb) return false;
      double a = ac[i][0];
      for (int j = 1; j < 4; ++j) a = a * t + ac[i][j];
      if (std::abs(a) > ab) return false;
    }
  }
  return true;
}

inline Trajectory axes_to_trajectory(const std::array<AxisQuintic, 3>& axes, int dim, double T) {
  Segment s;
  s.duration = T;
  s.coeffs = Eigen::MatrixXd::Zero(dim, 6);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < 6; ++k)
      s.coeffs(i, k) = axes[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(k)];
  return Trajectory({s});
}

}  // namespace detail

// A solved two-point BVP: the directed graph edge.
struct MotionPrimitive {
  FullState start;
  FullState end;
  Trajectory trajectory;
  double cost = 0.0;  // rho * T + integral of ||jerk||^2
};

// Knobs of the free-duration search in optimize_primitive. The sampled
// feasibility resolution is a tunable; 1000 keeps sub-sample peaks inside the
// +1e-6 slack at the speeds used here.
struct TimeSearchParams {
  int feasibility_samples = 1000;
  double t_floor = 1e-3;       // s, lower bound on any nonzero duration
  double rel_tol = 1e-6;       // golden-section termination on the bracket
  double dilation = 1.2;       // geometric step while infeasible
  double boundary_tol = 1e-9;  // slack for boundary states sitting on a limit
};

// Minimum-jerk quintic meeting all six boundary conditions per axis over
// exactly [0, T].
inline Trajectory solve_fixed_time_bvp(const FullState& start, const FullState& end, double T) {
  validate(start, "solve_fixed_time_bvp start");
  validate(end, "solve_fixed_time_bvp end");
  if (start.dim() != end.dim())
    throw std::invalid_argument("solve_fixed_time_bvp: dimension mismatch");
  if (!(T > 0.0) || !std::isfinite(T))
    throw std::invalid_argument("solve_fixed_time_bvp: T must be positive and finite");
  return detail::axes_to_trajectory(detail::fit_axes(start, end, T), start.dim(), T);
}

// Closed-form integral of ||jerk||^2 over the whole trajectory.
inline double jerk_squared_integral(const Trajectory& traj) {
  double total = 0.0;
  for (const auto& s : traj.segments()) {
    for (int axis = 0; axis < s.dim(); ++axis) {
      detail::AxisQuintic q;
      for (int k = 0; k < 6; ++k) q.c[static_cast<std::size_t>(k)] = s.coeffs(axis, k);
      total += q.jerk_sq_integral(s.duration);
    }
  }
  return total;
}

inline double trajectory_cost(const Trajectory& traj, double rho) {
  return rho * traj.total_duration() + jerk_squared_integral(traj);
}

// Sampled per-axis limit check used by tests and by the planners.
inline bool within_limits(const Trajectory& traj, const DynamicsLimits& lim, int samples = 1000,
                          double tol = 1e-6) {
  const double T = traj.total_duration();
  if (T <= 0.0) return true;
  const int n = std::max(2, samples);
  for (int k = 0; k <= n; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(n);
    const Vec v = traj.eval(t, 1);
    const Vec a = traj.eval(t, 2);
    if ((v.array().abs() > lim.v_max + tol).any()) return false;
    if ((a.array().abs() > lim.a_max + tol).any()) return false;
  }
  return true;
}

namespace detail {

// J(T) for the quintic family between two fixed states.
inline double duration_cost(const FullState& a, const FullState& b, double T,
                            const DynamicsLimits& lim) {
  const auto axes = fit_axes(a, b, T);
  return lim.rho * T + jerk_cost(axes, a.dim(), T);
}

inline bool duration_feasible(const FullState& a, const FullState& b, double T,
                              const DynamicsLimits& lim, const TimeSearchParams& p) {
  const auto axes = fit_axes(a, b, T);
  return axes_within_limits(axes, a.dim(), T, lim, p.feasibility_samples, p.boundary_tol);
}

}  // namespace detail

namespace detail {

// Best feasible duration for the single-quintic family, or a negative value
// when the multiplicative scan finds no feasible duration at all. The scan
// starts at the mean-speed lower bound max_i |dp_i| / v_max (durations below
// it are infeasible for the axis realizing the max); both feasibility edges
// are tightened by bisection because the feasible set is an interval only
// for benign boundary states.
inline double search_duration(const FullState& start, const FullState& end,
                              const DynamicsLimits& limits, const TimeSearchParams& params) {
  const auto feasible = [&](double T) {
    return duration_feasible(start, end, T, limits, params);
  };
  const auto J = [&](double T) { return duration_cost(start, end, T, limits); };

  const double displacement = (end.position - start.position).cwiseAbs().maxCoeff();
  const double t_lo = std::max(params.t_floor, displacement / limits.v_max);

  // Multiplicative scan for the first feasible duration.
  static constexpr int kMaxScan = 100;
  double left = -1.0;
  double prev = t_lo;
  double probe = t_lo;
  for (int k = 0; k <= kMaxScan; ++k) {
    if (feasible(probe)) {
      left = probe;
      if (k > 0) {
        double bad = prev, good = probe;
        while (good - bad > 1e-4 * good) {
          const double mid = 0.5 * (bad + good);
          (feasible(mid) ? good : bad) = mid;
        }
        left = good;
      }
      break;
    }
    prev = probe;
    probe *= params.dilation;
  }
  if (left < 0.0) return -1.0;

  // Bracket the minimum by doubling from the left edge.
  double lo = left;
  double a = left, fa = J(a);
  double b = 2.0 * a, fb = J(b);
  while (fb < fa && b < 1e12) {
    lo = a;
    a = b;
    fa = fb;
    b *= 2.0;
    fb = J(b);
  }
  double hi = b;

  // Golden section; collapses onto the constrained left edge when J is
  // monotone increasing over the bracket.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = J(x1), f2 = J(x2);
  while (hi - lo > params.rel_tol * hi && hi - lo > 1e-12) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = J(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = J(x2);
    }
  }
  double t_best = std::max(left, 0.5 * (lo + hi));

  // If the minimizer overshot the upper feasibility edge, walk back to it.
  if (!feasible(t_best)) {
    double good = left, bad = t_best;
    while (bad - good > 1e-4 * bad) {
      const double mid = 0.5 * (good + bad);
      (feasible(mid) ? good : bad) = mid;
    }
    t_best = good;
  }
  return t_best;
}

inline MotionPrimitive make_primitive(const FullState& start, const FullState& end, double T,
                                      const DynamicsLimits& limits) {
  const auto axes = fit_axes(start, end, T);
  Trajectory traj = axes_to_trajectory(axes, start.dim(), T);
  const double cost = limits.rho * T + jerk_cost(axes, start.dim(), T);
  return {start, end, std::move(traj), cost};
}

inline MotionPrimitive zero_primitive(const FullState& s) {
  Segment seg;
  seg.duration = 0.0;
  seg.coeffs = Eigen::MatrixXd::Zero(s.dim(), 6);
  for (int i = 0; i < s.dim(); ++i) {
    seg.coeffs(i, 0) = s.position[i];
    seg.coeffs(i, 1) = s.velocity[i];
    seg.coeffs(i, 2) = 0.5 * s.acceleration[i];
  }
  return {s, s, Trajectory({seg}), 0.0};
}

inline Vec stop_point(const FullState& s, double a_max) {
  const double speed = s.velocity.norm();
  if (speed <= 0.0) return s.position;
  return s.position + s.velocity * (speed / (2.0 * a_max));
}

}  // namespace detail

// Free-duration minimum of J(T) = rho T + integral ||jerk||^2 subject to the
// per-axis velocity/acceleration box, over the fixed-T quintic family.
//
// For a small class of boundary pairs (near-opposed velocities with a
// contradictory displacement, or pinned accelerations) that family has no
// feasible duration whatsoever: stretching T makes the interpolant integrate
// the pinned boundary rates into ever larger velocity excursions. Those pairs
// fall back to a three-leg route through the constant-deceleration rest
// points of both endpoints, which always admits feasible durations and keeps
// every invariant of the returned primitive (boundary exactness, box
// feasibility, cost == rho T + jerk integral of the stored trajectory).
inline MotionPrimitive optimize_primitive(const FullState& start, const FullState& end,
                                          const DynamicsLimits& limits,
                                          const TimeSearchParams& params = {}) {
  validate(start, "optimize_primitive start");
  validate(end, "optimize_primitive end");
  limits.validate();
  if (start.dim() != end.dim())
    throw std::invalid_argument("optimize_primitive: dimension mismatch");
  if (!limits.state_within(start, params.boundary_tol) ||
      !limits.state_within(end, params.boundary_tol))
    throw InfeasibleBoundaryError("optimize_primitive: boundary state violates v_max/a_max");

  if (start.same_as(end)) return detail::zero_primitive(start);

  const double t_direct = detail::search_duration(start, end, limits, params);
  if (t_direct > 0.0) return detail::make_primitive(start, end, t_direct, limits);

  // Fallback: start -> rest -> rest -> end.
  const FullState rest_a = FullState::rest(detail::stop_point(start, limits.a_max));
  FullState reversed_end = end;
  reversed_end.velocity = -end.velocity;
  const FullState rest_b = FullState::rest(detail::stop_point(reversed_end, limits.a_max));

  MotionPrimitive out{start, end, Trajectory{}, 0.0};
  const FullState* legs[4] = {&start, &rest_a, &rest_b, &end};
  for (int leg = 0; leg < 3; ++leg) {
    const FullState& a = *legs[leg];
    const FullState& b = *legs[leg + 1];
    if (a.same_as(b)) continue;
    const double t = detail::search_duration(a, b, limits, params);
    if (t <= 0.0) throw std::runtime_error("optimize_primitive: no feasible duration");
    const auto prim = detail::make_primitive(a, b, t, limits);
    out.trajectory.append(prim.trajectory);
    out.cost += prim.cost;
  }
  if (out.trajectory.empty()) return detail::zero_primitive(start);
  return out;
}

// Time-optimized BVP to the rest state at the constant-deceleration stopping
// point: p_stop = p + v_hat |v|^2 / (2 a_max).
inline Trajectory stopping_primitive(const FullState& state, const DynamicsLimits& limits,
                                     const TimeSearchParams& params = {}) {
  validate(state, "stopping_primitive state");
  limits.validate();
  const double speed = state.velocity.norm();
  Vec target = state.position;
  if (speed > 0.0) target += state.velocity * (speed / (2.0 * limits.a_max));
  return optimize_primitive(state, FullState::rest(target), limits, params).trajectory;
}

}  // namespace dmp
