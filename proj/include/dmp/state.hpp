#pragma once

#include <Eigen/Core>
#include <cmath>

#include "dmp/common.hpp"

namespace dmp {

using Vec = Eigen::VectorXd;

// One element of the planning state space: position, velocity and
// acceleration per axis, all of the same dimension D in {1, 2, 3}.
struct FullState {
  Vec position;
  Vec velocity;
  Vec acceleration;

  int dim() const { return static_cast<int>(position.size()); }

  static FullState zero(int dim) {
    return {Vec::Zero(dim), Vec::Zero(dim), Vec::Zero(dim)};
  }

  static FullState rest(const Vec& pos) {
    return {pos, Vec::Zero(pos.size()), Vec::Zero(pos.size())};
  }

  FullState translated(const Vec& offset) const {
    return {position + offset, velocity, acceleration};
  }

  bool same_as(const FullState& o) const {
    return position.size() == o.position.size() &&
           (position.array() == o.position.array()).all() &&
           (velocity.array() == o.velocity.array()).all() &&
           (acceleration.array() == o.acceleration.array()).all();
  }
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

inline void validate(const FullState& s, const char* what = "state") {
  const auto d = s.position.size();
  if (d < 1 || d > 3 || s.velocity.size() != d || s.acceleration.size() != d)
    throw std::invalid_argument(std::string(what) + ": dimensions must agree and lie in {1,2,3}");
  if (!all_finite(s.position) || !all_finite(s.velocity) || !all_finite(s.acceleration))
    throw std::invalid_argument(std::string(what) + ": non-finite component");
}

// Per-axis box limits on velocity and acceleration plus the weight that
// converts trajectory time into cost units.
struct DynamicsLimits {
  double v_max = 0.0;  // m/s, per axis
  double a_max = 0.0;  // m/s^2, per axis
  double rho = 10.0;   // cost per second of trajectory time

  void validate() const {
    if (!(v_max > 0.0) || !(a_max > 0.0) || !(rho > 0.0))
      throw std::invalid_argument("DynamicsLimits: v_max, a_max, rho must be > 0");
  }

  // Largest achievable speed under the per-axis bound, used by the heuristic.
  double v_max_euclidean(int dim) const { return v_max * std::sqrt(static_cast<double>(dim)); }

  bool state_within(const FullState& s, double tol = 1e-9) const {
    return (s.velocity.array().abs() <= v_max + tol).all() &&
           (s.acceleration.array().abs() <= a_max + tol).all();
  }
};

// Symmetric sampling bounds around the origin rest state.
struct StateBox {
  int dim = 2;
  Vec pos_extent;           // half extents per axis, m
  double vel_extent = 0.0;  // |v_i| bound, m/s
  double acc_extent = 0.0;  // |a_i| bound, m/s^2

  void validate() const {
    if (dim < 1 || dim > 3 || pos_extent.size() != dim)
      throw std::invalid_argument("StateBox: dim must be in {1,2,3} and match pos_extent");
    if (!(pos_extent.minCoeff() > 0.0) || !(vel_extent > 0.0) || !(acc_extent > 0.0))
      throw std::invalid_argument("StateBox: extents must be > 0");
  }

  bool contains(const FullState& s, double tol = 1e-9) const {
    return (s.position.array().abs() <= pos_extent.array() + tol).all() &&
           (s.velocity.array().abs() <= vel_extent + tol).all() &&
           (s.acceleration.array().abs() <= acc_extent + tol).all();
  }
};

}  // namespace dmp
