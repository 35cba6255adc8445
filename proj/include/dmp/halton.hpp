#pragma once

#include <array>
#include <cstdint>

namespace dmp {

// Radical-inverse Halton point in up to 9 dimensions (enough for three
// derivative levels of a 3-axis state).
inline double radical_inverse(std::uint64_t index, unsigned base) {
  double inv_base = 1.0 / static_cast<double>(base);
  double scale = inv_base;
  double value = 0.0;
  while (index > 0) {
    value += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv_base;
  }
  return value;
}

inline constexpr std::array<unsigned, 9> kHaltonBases = {2, 3, 5, 7, 11, 13, 17, 19, 23};

// dims consecutive coordinates of the Halton sequence at the given index.
template <typename OutIt>
void halton_point(std::uint64_t index, int dims, OutIt out) {
  for (int d = 0; d < dims; ++d)
    *out++ = radical_inverse(index, kHaltonBases[static_cast<std::size_t>(d)]);
}

}  // namespace dmp
