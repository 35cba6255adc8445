#pragma once

#include <algorithm>
#include <limits>
#include <optional>

#include "dmp/bvp.hpp"
#include "dmp/sampling.hpp"

namespace dmp {

// Which drift-aware dispersion is minimized. kRoundTrip scores a candidate by
// the best worst-direction round trip to a single vertex; kTwoSided lets the
// cheapest source vertex and the cheapest destination vertex differ.
enum class DispersionMode { kRoundTrip, kTwoSided };

inline const char* to_string(DispersionMode m) {
  return m == DispersionMode::kRoundTrip ? "round_trip" : "two_sided";
}

inline DispersionMode dispersion_mode_from_string(const std::string& s) {
  if (s == "round_trip") return DispersionMode::kRoundTrip;
  if (s == "two_sided") return DispersionMode::kTwoSided;
  throw FormatError("unknown dispersion mode: " + s);
}

namespace detail {

// Per-candidate running minima over the current vertex set.
struct CandidateScores {
  std::vector<double> min_to;    // min_v J(x -> v)
  std::vector<double> min_from;  // min_v J(v -> x)
  std::vector<double> min_rt;    // min_v max(J(x,v), J(v,x))

  explicit CandidateScores(std::size_t n)
      : min_to(n, std::numeric_limits<double>::infinity()),
        min_from(n, std::numeric_limits<double>::infinity()),
        min_rt(n, std::numeric_limits<double>::infinity()) {}

  double score(std::size_t i, DispersionMode mode) const {
    return mode == DispersionMode::kRoundTrip ? min_rt[i] : std::max(min_to[i], min_from[i]);
  }
};

}  // namespace detail

// Brute-force dispersion of a vertex set over a candidate set: the worst
// candidate score under the mode, with the sup over the state space
// approximated by the max over the candidates. Returns the attaining
// candidate as witness (lowest index on ties).
inline std::pair<double, FullState> dispersion(const std::vector<FullState>& vertices,
                                               const CandidateSet& candidates,
                                               DispersionMode mode, const DynamicsLimits& limits,
                                               const TimeSearchParams& params = {},
                                               unsigned threads = 0) {
  if (vertices.empty() || candidates.states.empty())
    throw std::invalid_argument("dispersion: vertices and candidates must be nonempty");

  const std::size_t n = candidates.states.size();
  detail::CandidateScores scores(n);
  for (const auto& v : vertices) {
    parallel_for(
        n,
        [&](std::size_t i) {
          const auto& x = candidates.states[i];
          const double to = optimize_primitive(x, v, limits, params).cost;
          const double from = optimize_primitive(v, x, limits, params).cost;
          scores.min_to[i] = std::min(scores.min_to[i], to);
          scores.min_from[i] = std::min(scores.min_from[i], from);
          scores.min_rt[i] = std::min(scores.min_rt[i], std::max(to, from));
        },
        threads);
  }
  std::size_t witness = 0;
  double d = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = scores.score(i, mode);
    if (s > d) {
      d = s;
      witness = i;
    }
  }
  return {d, candidates.states[witness]};
}

// Stop rule for the greedy selection: exactly one of the two must be set.
struct GreedyStop {
  std::optional<double> target_dispersion;
  std::optional<int> target_vertex_count;
};

struct GreedyResult {
  std::vector<int> vertex_ids;           // candidate indices, insertion order; [0] == 0
  std::vector<double> dispersion_trace;  // trace[k] = dispersion of the first k+1 vertices
  bool target_reached = true;
  std::int64_t bvp_solves = 0;

  std::vector<FullState> vertex_states(const CandidateSet& c) const {
    std::vector<FullState> out;
    out.reserve(vertex_ids.size());
    for (int id : vertex_ids) out.push_back(c.states[static_cast<std::size_t>(id)]);
    return out;
  }
};

// Greedy minimum-dispersion vertex selection: seed with the origin rest state
// (candidate 0), then repeatedly insert the current dispersion witness. Each
// round only evaluates BVPs against the newly inserted vertex, so the whole
// run costs O(|V| * |C|) solves. Ties in the witness argmax break to the
// lowest candidate index; already-inserted candidates (score 0) are skipped.
inline GreedyResult greedy_min_dispersion(const CandidateSet& candidates, const GreedyStop& stop,
                                          DispersionMode mode, const DynamicsLimits& limits,
                                          const TimeSearchParams& params = {},
                                          unsigned threads = 0) {
  const std::size_t n = candidates.states.size();
  if (n < 1) throw std::invalid_argument("greedy_min_dispersion: empty candidate set");
  if (stop.target_dispersion.has_value() == stop.target_vertex_count.has_value())
    throw std::invalid_argument("greedy_min_dispersion: set exactly one stop criterion");
  if (stop.target_vertex_count && (*stop.target_vertex_count < 1 ||
                                   *stop.target_vertex_count > static_cast<int>(n)))
    throw std::invalid_argument("greedy_min_dispersion: target vertex count out of range");

  GreedyResult result;
  detail::CandidateScores scores(n);
  std::vector<char> is_vertex(n, 0);

  int next_vertex = 0;  // origin rest state
  while (true) {
    // fold the newly inserted vertex into every candidate's minima
    const FullState& u = candidates.states[static_cast<std::size_t>(next_vertex)];
    result.vertex_ids.push_back(next_vertex);
    is_vertex[static_cast<std::size_t>(next_vertex)] = 1;
    parallel_for(
        n,
        [&](std::size_t i) {
          const auto& x = candidates.states[i];
          const double to = optimize_primitive(x, u, limits, params).cost;
          const double from = optimize_primitive(u, x, limits, params).cost;
          scores.min_to[i] = std::min(scores.min_to[i], to);
          scores.min_from[i] = std::min(scores.min_from[i], from);
          scores.min_rt[i] = std::min(scores.min_rt[i], std::max(to, from));
        },
        threads);
    result.bvp_solves += 2 * static_cast<std::int64_t>(n);

    // Reported dispersion is the max over all candidates; the witness to
    // insert next is the argmax among non-vertex candidates (vertices score
    // exactly 0 through their self-cost, so the two agree whenever d > 0).
    double d = 0.0;
    std::size_t witness = 0;
    bool witness_found = false;
    double best_nonvertex = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = scores.score(i, mode);
      d = std::max(d, s);
      if (!is_vertex[i] && s > best_nonvertex) {
        best_nonvertex = s;
        witness = i;
        witness_found = true;
      }
    }
    result.dispersion_trace.push_back(d);

    if (stop.target_vertex_count &&
        static_cast<int>(result.vertex_ids.size()) >= *stop.target_vertex_count)
      break;
    if (stop.target_dispersion && d <= *stop.target_dispersion) break;
    if (!witness_found) break;  // every candidate is a vertex
    next_vertex = static_cast<int>(witness);
  }

  if (stop.target_dispersion)
    result.target_reached = result.dispersion_trace.back() <= *stop.target_dispersion;
  return result;
}

}  // namespace dmp
