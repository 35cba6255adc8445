#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <vector>

#include "dmp/state.hpp"

namespace dmp {

// One polynomial piece. coeffs(axis, k) multiplies t^k with t the local
// segment time in [0, duration]; degree at most 5.
struct Segment {
  double duration = 0.0;
  Eigen::MatrixXd coeffs;  // D x 6

  int dim() const { return static_cast<int>(coeffs.rows()); }

  // order 0..3: position, velocity, acceleration, jerk
  Vec eval(double t, int order) const {
    const int d = dim();
    Vec out = Vec::Zero(d);
    for (int axis = 0; axis < d; ++axis) {
      double v = 0.0;
      for (int k = 5; k >= order; --k) {
        double factor = 1.0;
        for (int j = 0; j < order; ++j) factor *= static_cast<double>(k - j);
        v = v * t + factor * coeffs(axis, k);
      }
      out[axis] = v;
    }
    return out;
  }
};

// Piecewise per-axis polynomial, C^2 across junctions by construction of the
// solvers that produce it.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<Segment> segments) : segments_(std::move(segments)) {
    for (const auto& s : segments_) total_duration_ += s.duration;
  }

  bool empty() const { return segments_.empty(); }
  int dim() const { return segments_.empty() ? 0 : segments_.front().dim(); }
  double total_duration() const { return total_duration_; }
  const std::vector<Segment>& segments() const { return segments_; }

  // Throws std::domain_error for t outside [0, total_duration] beyond a tiny
  // rounding slack; junction times may be evaluated from either side.
  Vec eval(double t, int order = 0) const {
    static constexpr double kSlack = 1e-9;
    if (segments_.empty()) throw std::domain_error("Trajectory::eval: empty trajectory");
    if (t < -kSlack || t > total_duration_ + kSlack)
      throw std::domain_error("Trajectory::eval: t outside [0, duration]");
    double local = std::clamp(t, 0.0, total_duration_);
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const double T = segments_[i].duration;
      if (local <= T || i + 1 == segments_.size()) return segments_[i].eval(std::min(local, T), order);
      local -= T;
    }
    return segments_.back().eval(segments_.back().duration, order);
  }

  FullState state_at(double t) const { return {eval(t, 0), eval(t, 1), eval(t, 2)}; }

  void append(const Trajectory& tail) {
    segments_.insert(segments_.end(), tail.segments_.begin(), tail.segments_.end());
    total_duration_ += tail.total_duration_;
  }

  Trajectory translated(const Vec& offset) const {
    Trajectory out = *this;
    for (auto& s : out.segments_)
      for (int axis = 0; axis < s.dim(); ++axis) s.coeffs(axis, 0) += offset[axis];
    return out;
  }

  // Sampled path length, step dt plus the final endpoint.
  double arc_length(double dt) const {
    if (segments_.empty() || total_duration_ <= 0.0) return 0.0;
    double len = 0.0;
    Vec prev = eval(0.0, 0);
    for (double t = dt; t < total_duration_; t += dt) {
      Vec p = eval(t, 0);
      len += (p - prev).norm();
      prev = p;
    }
    len += (eval(total_duration_, 0) - prev).norm();
    return len;
  }

  nlohmann::json to_json() const {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : segments_) {
      nlohmann::json coeffs = nlohmann::json::array();
      for (int axis = 0; axis < s.dim(); ++axis) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < 6; ++k) row.push_back(s.coeffs(axis, k));
        coeffs.push_back(row);
      }
      segs.push_back({{"duration", s.duration}, {"coeffs", coeffs}});
    }
    return {{"segments", segs}};
  }

  static Trajectory from_json(const nlohmann::json& j) {
    if (!j.contains("segments") || !j["segments"].is_array())
      throw FormatError("trajectory: missing segments array");
    std::vector<Segment> segs;
    for (const auto& js : j["segments"]) {
      Segment s;
      s.duration = js.at("duration").get<double>();
      const auto& rows = js.at("coeffs");
      s.coeffs = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), 6);
      for (int axis = 0; axis < static_cast<int>(rows.size()); ++axis) {
        if (rows[axis].size() != 6) throw FormatError("trajectory: coeff row must have 6 entries");
        for (int k = 0; k < 6; ++k) s.coeffs(axis, k) = rows[axis][k].get<double>();
      }
      if (s.duration < 0.0) throw FormatError("trajectory: negative duration");
      segs.push_back(std::move(s));
    }
    return Trajectory(std::move(segs));
  }

 private:
  std::vector<Segment> segments_;
  double total_duration_ = 0.0;
};

}  // namespace dmp
