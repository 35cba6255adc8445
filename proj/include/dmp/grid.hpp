#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dmp/state.hpp"

namespace dmp {

inline constexpr int kMapFormatVersion = 1;

// Axis-aligned voxel map, 2D or 3D. Cell (0,..,0) has its lower corner at
// origin; world positions outside the stored block count as occupied, which
// is the conservative convention for robot-centric local maps.
struct OccupancyGrid {
  int dim = 2;
  Vec origin;  // lower corner, size dim
  double resolution = 1.0;
  std::array<int, 3> dims = {1, 1, 1};  // dims[2] stays 1 for 2D
  std::vector<std::uint8_t> occ;
  double inflation_radius = 0.0;  // total applied so far

  static OccupancyGrid make(int dim, const Vec& origin, double resolution,
                            std::array<int, 3> dims) {
    if (dim < 2 || dim > 3) throw std::invalid_argument("OccupancyGrid: dim must be 2 or 3");
    if (!(resolution > 0.0)) throw std::invalid_argument("OccupancyGrid: resolution must be > 0");
    OccupancyGrid g;
    g.dim = dim;
    g.origin = origin;
    g.resolution = resolution;
    g.dims = dims;
    if (dim == 2) g.dims[2] = 1;
    for (int a = 0; a < 3; ++a)
      if (g.dims[static_cast<std::size_t>(a)] < 1)
        throw std::invalid_argument("OccupancyGrid: dims must be positive");
    g.occ.assign(g.cell_count(), 0);
    return g;
  }

  std::size_t cell_count() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
  }

  std::size_t index(int ix, int iy, int iz = 0) const {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(iy) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(iz));
  }

  bool in_bounds(int ix, int iy, int iz = 0) const {
    return ix >= 0 && iy >= 0 && iz >= 0 && ix < dims[0] && iy < dims[1] && iz < dims[2];
  }

  bool occupied_cell(int ix, int iy, int iz = 0) const { return occ[index(ix, iy, iz)] != 0; }
  void set_cell(int ix, int iy, int iz, bool value) { occ[index(ix, iy, iz)] = value ? 1 : 0; }

  std::array<int, 3> cell_of(const Vec& p) const {
    std::array<int, 3> c = {0, 0, 0};
    for (int a = 0; a < dim; ++a)
      c[static_cast<std::size_t>(a)] =
          static_cast<int>(std::floor((p[a] - origin[a]) / resolution));
    return c;
  }

  Vec center_of(const std::array<int, 3>& cell) const {
    Vec p(dim);
    for (int a = 0; a < dim; ++a)
      p[a] = origin[a] + (static_cast<double>(cell[static_cast<std::size_t>(a)]) + 0.5) * resolution;
    return p;
  }

  // out of bounds counts as occupied
  bool occupied_world(const Vec& p) const {
    const auto c = cell_of(p);
    if (!in_bounds(c[0], c[1], c[2])) return true;
    return occupied_cell(c[0], c[1], c[2]);
  }

  Vec max_corner() const {
    Vec p(dim);
    for (int a = 0; a < dim; ++a)
      p[a] = origin[a] + dims[static_cast<std::size_t>(a)] * resolution;
    return p;
  }
};

// Morphological dilation by a Euclidean ball of the given radius (measured
// between voxel centers). Tracks the cumulative radius; dilating by zero is
// the identity.
inline OccupancyGrid inflate(const OccupancyGrid& grid, double robot_radius) {
  if (robot_radius < 0.0) throw std::invalid_argument("inflate: radius must be >= 0");
  OccupancyGrid out = grid;
  out.inflation_radius = grid.inflation_radius + robot_radius;
  if (robot_radius == 0.0) return out;

  const int reach = static_cast<int>(std::floor(robot_radius / grid.resolution + 1e-9));
  std::vector<std::array<int, 3>> offsets;
  const int zreach = grid.dim == 3 ? reach : 0;
  for (int dz = -zreach; dz <= zreach; ++dz)
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx) {
        const double dist = grid.resolution * std::sqrt(static_cast<double>(dx * dx + dy * dy + dz * dz));
        if (dist <= robot_radius + 1e-9) offsets.push_back({dx, dy, dz});
      }

  for (int iz = 0; iz < grid.dims[2]; ++iz)
    for (int iy = 0; iy < grid.dims[1]; ++iy)
      for (int ix = 0; ix < grid.dims[0]; ++ix) {
        if (!grid.occupied_cell(ix, iy, iz)) continue;
        for (const auto& o : offsets) {
          const int jx = ix + o[0], jy = iy + o[1], jz = iz + o[2];
          if (out.in_bounds(jx, jy, jz)) out.occ[out.index(jx, jy, jz)] = 1;
        }
      }
  return out;
}

// Coarse copy for the global planner: a coarse cell is occupied iff any of
// the fine cells under it is.
inline OccupancyGrid downsample(const OccupancyGrid& grid, int factor) {
  if (factor < 1) throw std::invalid_argument("downsample: factor must be >= 1");
  OccupancyGrid out;
  out.dim = grid.dim;
  out.origin = grid.origin;
  out.resolution = grid.resolution * factor;
  out.inflation_radius = grid.inflation_radius;
  for (int a = 0; a < 3; ++a)
    out.dims[static_cast<std::size_t>(a)] =
        a < grid.dim ? (grid.dims[static_cast<std::size_t>(a)] + factor - 1) / factor : 1;
  out.occ.assign(out.cell_count(), 0);
  for (int iz = 0; iz < grid.dims[2]; ++iz)
    for (int iy = 0; iy < grid.dims[1]; ++iy)
      for (int ix = 0; ix < grid.dims[0]; ++ix)
        if (grid.occupied_cell(ix, iy, iz))
          out.occ[out.index(ix / factor, iy / factor, grid.dim == 3 ? iz / factor : 0)] = 1;
  return out;
}

// Robot-centric window cut from a larger map; cells of the window that fall
// outside the source map are marked occupied.
inline OccupancyGrid crop(const OccupancyGrid& grid, const Vec& center, double half_size) {
  const int cells = std::max(1, static_cast<int>(std::ceil(2.0 * half_size / grid.resolution)));
  OccupancyGrid out;
  out.dim = grid.dim;
  out.resolution = grid.resolution;
  out.inflation_radius = grid.inflation_radius;
  out.origin = Vec(grid.dim);
  // snap the window onto the source lattice so cropped cells coincide
  std::array<int, 3> base = {0, 0, 0};
  for (int a = 0; a < grid.dim; ++a) {
    base[static_cast<std::size_t>(a)] = static_cast<int>(
        std::floor((center[a] - half_size - grid.origin[a]) / grid.resolution));
    out.origin[a] = grid.origin[a] + base[static_cast<std::size_t>(a)] * grid.resolution;
    out.dims[static_cast<std::size_t>(a)] = cells;
  }
  if (grid.dim == 2) out.dims[2] = 1;
  out.occ.assign(out.cell_count(), 0);
  for (int iz = 0; iz < out.dims[2]; ++iz)
    for (int iy = 0; iy < out.dims[1]; ++iy)
      for (int ix = 0; ix < out.dims[0]; ++ix) {
        const int sx = base[0] + ix, sy = base[1] + iy, sz = grid.dim == 3 ? base[2] + iz : 0;
        const bool occ = grid.in_bounds(sx, sy, sz) ? grid.occupied_cell(sx, sy, sz) : true;
        out.occ[out.index(ix, iy, iz)] = occ ? 1 : 0;
      }
  return out;
}

// ---- map files ---------------------------------------------------------

// JSON header plus run-length encoded occupancy (alternating free/occupied
// run lengths, starting with free).
inline void save_map(const OccupancyGrid& grid, const std::filesystem::path& path) {
  nlohmann::json rle = nlohmann::json::array();
  std::size_t i = 0;
  std::uint8_t current = 0;
  std::size_t run = 0;
  for (i = 0; i < grid.occ.size(); ++i) {
    if ((grid.occ[i] != 0) == (current != 0)) {
      ++run;
    } else {
      rle.push_back(run);
      current = current ? 0 : 1;
      run = 1;
    }
  }
  rle.push_back(run);
  nlohmann::json j = {{"format_version", kMapFormatVersion},
                      {"D", grid.dim},
                      {"origin", std::vector<double>(grid.origin.data(), grid.origin.data() + grid.dim)},
                      {"resolution", grid.resolution},
                      {"dims", std::vector<int>(grid.dims.begin(), grid.dims.begin() + grid.dim)},
                      {"inflation_radius", grid.inflation_radius},
                      {"rle", rle}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_map: cannot open " + path.string());
  out << j.dump() << "\n";
}

// Hand-authored ASCII maps: rows of '.' (free) and '#' (occupied), first text
// line is the top row (highest y); resolution 1 m, origin at (0, 0).
inline OccupancyGrid load_ascii_map(std::istream& in) {
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.empty()) throw FormatError("ascii map: empty");
  const std::size_t width = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != width) throw FormatError("ascii map: ragged rows");
    for (char ch : r)
      if (ch != '.' && ch != '#') throw FormatError("ascii map: expected '.' or '#'");
  }
  auto g = OccupancyGrid::make(2, Vec::Zero(2), 1.0,
                               {static_cast<int>(width), static_cast<int>(rows.size()), 1});
  for (int iy = 0; iy < g.dims[1]; ++iy) {
    const std::string& row = rows[static_cast<std::size_t>(g.dims[1] - 1 - iy)];
    for (int ix = 0; ix < g.dims[0]; ++ix)
      g.set_cell(ix, iy, 0, row[static_cast<std::size_t>(ix)] == '#');
  }
  return g;
}

inline OccupancyGrid load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("load_map: cannot open " + path.string());
  // autodetect: JSON object vs ASCII grid
  const int first = in.peek();
  if (first != '{') return load_ascii_map(in);

  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("load_map: parse failure: ") + ex.what());
  }
  try {
    if (j.at("format_version").get<int>() != kMapFormatVersion)
      throw FormatError("load_map: unsupported format_version");
    const int dim = j.at("D").get<int>();
    const auto origin_v = j.at("origin").get<std::vector<double>>();
    const auto dims_v = j.at("dims").get<std::vector<int>>();
    if (static_cast<int>(origin_v.size()) != dim || static_cast<int>(dims_v.size()) != dim)
      throw FormatError("load_map: origin/dims arity mismatch");
    Vec origin(dim);
    for (int a = 0; a < dim; ++a) origin[a] = origin_v[static_cast<std::size_t>(a)];
    std::array<int, 3> dims = {1, 1, 1};
    for (int a = 0; a < dim; ++a) dims[static_cast<std::size_t>(a)] = dims_v[static_cast<std::size_t>(a)];
    auto g = OccupancyGrid::make(dim, origin, j.at("resolution").get<double>(), dims);
    g.inflation_radius = j.value("inflation_radius", 0.0);
    std::size_t i = 0;
    std::uint8_t current = 0;
    for (const auto& jr : j.at("rle")) {
      const std::size_t run = jr.get<std::size_t>();
      if (i + run > g.occ.size()) throw FormatError("load_map: rle overruns grid");
      std::fill(g.occ.begin() + static_cast<long>(i), g.occ.begin() + static_cast<long>(i + run), current);
      i += run;
      current = current ? 0 : 1;
    }
    if (i != g.occ.size()) throw FormatError("load_map: rle underruns grid");
    return g;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("load_map: malformed file: ") + ex.what());
  }
}

}  // namespace dmp
