#pragma once

#include <string>
#include <vector>

#include "dmp/halton.hpp"
#include "dmp/state.hpp"

namespace dmp {

// Dense low-discrepancy state set the greedy vertex selection draws from.
struct CandidateSet {
  std::vector<FullState> states;  // states[0] is always the origin rest state
  std::string method = "halton";
  std::uint64_t seed = 0;
  int requested = 0;

  std::size_t size() const { return states.size(); }
};

// n states for the box: the origin rest state plus n-1 Halton points mapped
// affinely into the box. Deterministic in (n, seed); the seed offsets the
// start index of the sequence so distinct seeds give distinct sets that are
// each still low-discrepancy.
inline CandidateSet sample_candidates(const StateBox& box, int n, std::uint64_t seed) {
  box.validate();
  if (n < 2) throw std::invalid_argument("sample_candidates: n must be >= 2");

  CandidateSet set;
  set.seed = seed;
  set.requested = n;
  set.states.reserve(static_cast<std::size_t>(n));
  set.states.push_back(FullState::zero(box.dim));

  const int dims = 3 * box.dim;
  std::array<double, 9> u{};
  for (int i = 1; i < n; ++i) {
    // index 0 of the raw sequence is the all-zero point; skip it
    const std::uint64_t index = static_cast<std::uint64_t>(i) + seed * 7919ull;
    halton_point(index, dims, u.begin());
    FullState s = FullState::zero(box.dim);
    for (int axis = 0; axis < box.dim; ++axis) {
      s.position[axis] = (2.0 * u[static_cast<std::size_t>(axis)] - 1.0) * box.pos_extent[axis];
      s.velocity[axis] =
          (2.0 * u[static_cast<std::size_t>(box.dim + axis)] - 1.0) * box.vel_extent;
      s.acceleration[axis] =
          (2.0 * u[static_cast<std::size_t>(2 * box.dim + axis)] - 1.0) * box.acc_extent;
    }
    set.states.push_back(std::move(s));
  }
  return set;
}

}  // namespace dmp
