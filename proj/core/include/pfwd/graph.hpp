#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pfwd {

using VertexId = std::uint32_t;

struct GridKind {
  int m;
};
struct TreeKind {
  int arity;
  int height;
};
struct RggKind {
  int count;
  double side;
  double radius;
};
struct RegularKind {
  int count;
  int degree;
};
// Hand-built or loaded graphs (paths, stars, edge-list files).
struct EdgeListKind {};

using GraphKind = std::variant<GridKind, TreeKind, RggKind, RegularKind, EdgeListKind>;

std::string describe(const GraphKind& kind);

/// Immutable undirected simple graph with a designated source vertex.
///
/// Adjacency is stored in compressed sparse row form. Trees additionally
/// carry a per-vertex level (hop distance from the root).
class Graph {
 public:
  /// Builds from an undirected edge list. Rejects self-loops, duplicate
  /// edges, out-of-range endpoints and an out-of-range source.
  static Graph from_edges(VertexId vertex_count, std::span<const std::pair<VertexId, VertexId>> edges,
                          VertexId source, GraphKind kind = EdgeListKind{},
                          std::vector<int> levels = {});

  VertexId vertex_count() const noexcept { return static_cast<VertexId>(offsets_.size() - 1); }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }
  VertexId source() const noexcept { return source_; }
  const GraphKind& kind() const noexcept { return kind_; }

  std::span<const VertexId> neighbors(VertexId v) const noexcept {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  bool is_tree() const noexcept { return std::holds_alternative<TreeKind>(kind_); }
  bool has_levels() const noexcept { return !levels_.empty(); }
  int level(VertexId v) const { return levels_.at(v); }
  std::span<const int> levels() const noexcept { return levels_; }
  // Height of a tree graph; nullopt for every other kind.
  std::optional<int> tree_height() const;

  std::vector<std::pair<VertexId, VertexId>> edges() const;

 private:
  Graph() = default;

  std::vector<std::size_t> offsets_;
  std::vector<VertexId> targets_;
  VertexId source_ = 0;
  GraphKind kind_ = EdgeListKind{};
  std::vector<int> levels_;
};

/// m x m lattice with 4-neighbour adjacency, row-major indexing, source at the centre.
Graph build_grid(int m);

/// Rooted complete d-ary tree of height H in level order; the root is the source.
Graph build_tree(int arity, int height);

/// N uniform points in [0,side]^2 joined when at most `radius` apart. The
/// source is the point nearest the centre of the square (lowest index on ties).
Graph build_rgg(int count, double side, double radius, std::uint64_t seed);

/// Like build_rgg, but walks seed, seed+1, ... until the graph is connected.
/// Returns the graph together with the seed that produced it.
std::pair<Graph, std::uint64_t> build_connected_rgg(int count, double side, double radius,
                                                    std::uint64_t seed, int max_attempts = 10000);

/// Simple d-regular graph from the configuration model, rejecting whole
/// pairings that contain a loop or a multi-edge. Source is vertex 0.
Graph build_random_regular(int count, int degree, std::uint64_t seed, int max_attempts = 100000);

/// Index of the centre site of an odd m x m grid.
constexpr VertexId grid_center(int m) noexcept {
  return static_cast<VertexId>((m / 2) * m + m / 2);
}

bool is_connected(const Graph& g);

/// Edge-list dump: header "#N <count> source <index>", then one "u v" per line (u < v).
void write_edge_list(const Graph& g, std::ostream& out);
Graph read_edge_list(std::istream& in);

}  // namespace pfwd
