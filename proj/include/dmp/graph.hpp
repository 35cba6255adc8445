#pragma once

#include <filesystem>
#include <fstream>

#include "dmp/dispersion.hpp"

namespace dmp {

inline constexpr int kGraphFormatVersion = 1;

struct GraphEdge {
  int from = 0;
  int to = 0;
  double cost = 0.0;
  Trajectory trajectory;
};

// A translation-invariant motion-primitive lattice: vertex states around the
// origin rest state plus every directed BVP edge whose cost clears the
// beta * dispersion gate.
struct DispersionGraph {
  int dim = 2;
  DispersionMode mode = DispersionMode::kTwoSided;
  DynamicsLimits limits;
  StateBox box;
  double beta = 3.0;
  int candidate_count = 0;
  std::uint64_t seed = 0;
  double dispersion = 0.0;
  std::vector<FullState> vertices;  // vertices[0] is the origin rest state
  std::vector<GraphEdge> edges;     // sorted by (from, to)

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> out(vertices.size());
    for (int e = 0; e < static_cast<int>(edges.size()); ++e)
      out[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].from)].push_back(e);
    return out;
  }
};

// Directed edge (u -> v) exists iff u != v and the optimal BVP cost is at
// most beta * d. Pairs are solved in parallel; output order is by (from, to).
inline std::vector<GraphEdge> build_edges(const std::vector<FullState>& vertices, double d,
                                          double beta, const DynamicsLimits& limits,
                                          const TimeSearchParams& params = {},
                                          unsigned threads = 0) {
  if (!(beta > 0.0)) throw std::invalid_argument("build_edges: beta must be > 0");
  const std::size_t n = vertices.size();
  const double gate = beta * d;
  std::vector<std::optional<GraphEdge>> slots(n * n);
  parallel_for(
      n * n,
      [&](std::size_t k) {
        const std::size_t u = k / n;
        const std::size_t v = k % n;
        if (u == v) return;
        auto prim = optimize_primitive(vertices[u], vertices[v], limits, params);
        if (prim.cost <= gate)
          slots[k] = GraphEdge{static_cast<int>(u), static_cast<int>(v), prim.cost,
                               std::move(prim.trajectory)};
      },
      threads);
  std::vector<GraphEdge> edges;
  for (auto& s : slots)
    if (s) edges.push_back(std::move(*s));
  return edges;
}

struct GraphFamily {
  StateBox box;
  DynamicsLimits limits;
  std::vector<double> ladder;  // requested dispersions, strictly decreasing
  std::vector<DispersionGraph> graphs;

  std::size_t size() const { return graphs.size(); }
};

struct FamilyBuildReport {
  std::vector<double> dispersion_trace;
  std::int64_t bvp_solves = 0;
  bool ladder_reached = true;
};

// One graph per ladder entry, all prefixes of a single greedy run over a
// shared candidate set. Prefix lengths are advanced so that achieved
// dispersions strictly decrease and vertex counts strictly increase even when
// one greedy insertion clears several rungs at once.
inline GraphFamily build_family(const StateBox& box, const DynamicsLimits& limits,
                                const std::vector<double>& ladder, int candidate_count,
                                std::uint64_t seed,
                                DispersionMode mode = DispersionMode::kTwoSided,
                                double beta = 3.0, const TimeSearchParams& params = {},
                                unsigned threads = 0, FamilyBuildReport* report = nullptr) {
  box.validate();
  limits.validate();
  if (ladder.empty()) throw std::invalid_argument("build_family: empty ladder");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] < ladder[i - 1]))
      throw std::invalid_argument("build_family: ladder must be strictly decreasing");
  if (box.vel_extent > limits.v_max + 1e-9 || box.acc_extent > limits.a_max + 1e-9)
    throw std::invalid_argument("build_family: state box exceeds dynamic limits");

  const CandidateSet candidates = sample_candidates(box, candidate_count, seed);
  GreedyStop stop;
  stop.target_dispersion = ladder.back();
  const GreedyResult greedy = greedy_min_dispersion(candidates, stop, mode, limits, params, threads);

  GraphFamily family;
  family.box = box;
  family.limits = limits;
  family.ladder = ladder;
  if (report) {
    report->dispersion_trace = greedy.dispersion_trace;
    report->bvp_solves = greedy.bvp_solves;
    report->ladder_reached = greedy.target_reached;
  }

  const auto& trace = greedy.dispersion_trace;
  const auto vertex_states = greedy.vertex_states(candidates);
  std::size_t start = 0;
  double prev_achieved = std::numeric_limits<double>::infinity();
  for (double rung : ladder) {
    std::size_t pick = trace.size();
    for (std::size_t i = start; i < trace.size(); ++i) {
      if (trace[i] <= rung && trace[i] < prev_achieved) {
        pick = i;
        break;
      }
    }
    if (pick == trace.size()) {
      if (!greedy.target_reached && !family.graphs.empty()) break;
      pick = trace.size() - 1;
      if (trace[pick] >= prev_achieved) break;
    }

    DispersionGraph g;
    g.dim = box.dim;
    g.mode = mode;
    g.limits = limits;
    g.box = box;
    g.beta = beta;
    g.candidate_count = candidate_count;
    g.seed = seed;
    g.dispersion = trace[pick];
    g.vertices.assign(vertex_states.begin(), vertex_states.begin() + static_cast<long>(pick) + 1);
    g.edges = build_edges(g.vertices, g.dispersion, beta, limits, params, threads);
    family.graphs.push_back(std::move(g));
    prev_achieved = trace[pick];
    start = pick + 1;
  }
  return family;
}

// ---- serialization ----------------------------------------------------

namespace detail {

inline nlohmann::json vec_to_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Vec vec_from_json(const nlohmann::json& j) {
  Vec v(static_cast<long>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<long>(i)] = j[i].get<double>();
  return v;
}

inline nlohmann::json state_to_json(const FullState& s) {
  return {{"p", vec_to_json(s.position)},
          {"v", vec_to_json(s.velocity)},
          {"a", vec_to_json(s.acceleration)}};
}

inline FullState state_from_json(const nlohmann::json& j) {
  return {vec_from_json(j.at("p")), vec_from_json(j.at("v")), vec_from_json(j.at("a"))};
}

}  // namespace detail

inline nlohmann::json graph_to_json(const DispersionGraph& g) {
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : g.vertices) verts.push_back(detail::state_to_json(v));
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"from_id", e.from},
                     {"to_id", e.to},
                     {"cost", e.cost},
                     {"trajectory", e.trajectory.to_json()}});
  return {{"format_version", kGraphFormatVersion},
          {"D", g.dim},
          {"mode", to_string(g.mode)},
          {"rho", g.limits.rho},
          {"v_max", g.limits.v_max},
          {"a_max", g.limits.a_max},
          {"beta", g.beta},
          {"candidate_count", g.candidate_count},
          {"seed", g.seed},
          {"dispersion", g.dispersion},
          {"box", {{"pos_extent", detail::vec_to_json(g.box.pos_extent)},
                   {"vel_extent", g.box.vel_extent},
                   {"acc_extent", g.box.acc_extent}}},
          {"vertices", verts},
          {"edges", edges}};
}

inline DispersionGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("format_version")) throw FormatError("graph: not a graph file");
  const int version = j.at("format_version").get<int>();
  if (version != kGraphFormatVersion)
    throw FormatError("graph: unsupported format_version " + std::to_string(version));
  DispersionGraph g;
  try {
    g.dim = j.at("D").get<int>();
    g.mode = dispersion_mode_from_string(j.at("mode").get<std::string>());
    g.limits.rho = j.at("rho").get<double>();
    g.limits.v_max = j.at("v_max").get<double>();
    g.limits.a_max = j.at("a_max").get<double>();
    g.beta = j.at("beta").get<double>();
    g.candidate_count = j.at("candidate_count").get<int>();
    g.seed = j.at("seed").get<std::uint64_t>();
    g.dispersion = j.at("dispersion").get<double>();
    g.box.dim = g.dim;
    g.box.pos_extent = detail::vec_from_json(j.at("box").at("pos_extent"));
    g.box.vel_extent = j.at("box").at("vel_extent").get<double>();
    g.box.acc_extent = j.at("box").at("acc_extent").get<double>();
    for (const auto& jv : j.at("vertices")) g.vertices.push_back(detail::state_from_json(jv));
    for (const auto& je : j.at("edges")) {
      GraphEdge e;
      e.from = je.at("from_id").get<int>();
      e.to = je.at("to_id").get<int>();
      e.cost = je.at("cost").get<double>();
      e.trajectory = Trajectory::from_json(je.at("trajectory"));
      if (e.from < 0 || e.to < 0 || e.from >= static_cast<int>(g.vertices.size()) ||
          e.to >= static_cast<int>(g.vertices.size()))
        throw FormatError("graph: edge endpoint outside vertex table");
      g.edges.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("graph: malformed file: ") + ex.what());
  }
  return g;
}

inline void save_graph(const DispersionGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_graph: cannot open " + path.string());
  out << graph_to_json(g).dump(1) << "\n";
}

inline DispersionGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("load_graph: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("load_graph: parse failure: ") + ex.what());
  }
  return graph_from_json(j);
}

// Family file: ladder metadata plus relative references to the graph files.
inline void save_family(const GraphFamily& family, const std::filesystem::path& dir,
                        const std::string& stem = "graph") {
  std::filesystem::create_directories(dir);
  nlohmann::json refs = nlohmann::json::array();
  for (std::size_t i = 0; i < family.graphs.size(); ++i) {
    const std::string name = stem + "_" + std::to_string(i) + ".json";
    save_graph(family.graphs[i], dir / name);
    refs.push_back({{"file", name}, {"dispersion", family.graphs[i].dispersion}});
  }
  nlohmann::json j = {{"format_version", kGraphFormatVersion},
                      {"ladder", family.ladder},
                      {"rho", family.limits.rho},
                      {"v_max", family.limits.v_max},
                      {"a_max", family.limits.a_max},
                      {"graphs", refs}};
  std::ofstream out(dir / "family.json");
  if (!out) throw std::runtime_error("save_family: cannot open " + (dir / "family.json").string());
  out << j.dump(1) << "\n";
}

inline GraphFamily load_family(const std::filesystem::path& family_file) {
  std::ifstream in(family_file);
  if (!in) throw FormatError("load_family: cannot open " + family_file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("load_family: parse failure: ") + ex.what());
  }
  if (j.at("format_version").get<int>() != kGraphFormatVersion)
    throw FormatError("load_family: unsupported format_version");
  GraphFamily family;
  try {
    family.ladder = j.at("ladder").get<std::vector<double>>();
    for (const auto& ref : j.at("graphs"))
      family.graphs.push_back(
          load_graph(family_file.parent_path() / ref.at("file").get<std::string>()));
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("load_family: malformed file: ") + ex.what());
  }
  if (!family.graphs.empty()) {
    family.limits = family.graphs.front().limits;
    family.box = family.graphs.front().box;
  }
  return family;
}

}  // namespace dmp
