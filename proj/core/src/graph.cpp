#include "pfwd/graph.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "pfwd/error.hpp"
#include "pfwd/random.hpp"

namespace pfwd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string describe(const GraphKind& kind) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const GridKind& k) { out << "grid(" << k.m << ")"; },
                 [&](const TreeKind& k) { out << "tree(" << k.arity << "," << k.height << ")"; },
                 [&](const RggKind& k) { out << "rgg(" << k.count << "," << k.side << "," << k.radius << ")"; },
                 [&](const RegularKind& k) { out << "regular(" << k.count << "," << k.degree << ")"; },
                 [&](const EdgeListKind&) { out << "edges"; },
             },
             kind);
  return out.str();
}

Graph Graph::from_edges(VertexId vertex_count, std::span<const std::pair<VertexId, VertexId>> edges,
                        VertexId source, GraphKind kind, std::vector<int> levels) {
  detail::require(vertex_count >= 1, "graph needs at least one vertex");
  detail::require(source < vertex_count, "source index out of range");
  detail::require(levels.empty() || levels.size() == vertex_count, "level array size mismatch");

  std::vector<std::size_t> degree(vertex_count, 0);
  for (const auto& [u, v] : edges) {
    detail::require(u < vertex_count && v < vertex_count, "edge endpoint out of range");
    detail::require(u != v, "self-loop on vertex " + std::to_string(u));
    ++degree[u];
    ++degree[v];
  }

  Graph g;
  g.offsets_.assign(vertex_count + 1, 0);
  for (VertexId v = 0; v < vertex_count; ++v) g.offsets_[v + 1] = g.offsets_[v] + degree[v];
  g.targets_.resize(g.offsets_.back());
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    g.targets_[fill[u]++] = v;
    g.targets_[fill[v]++] = u;
  }
  for (VertexId v = 0; v < vertex_count; ++v) {
    auto first = g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
    auto last = g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last) {
      throw InvalidArgument("duplicate edge at vertex " + std::to_string(v));
    }
  }
  g.source_ = source;
  g.kind_ = kind;
  g.levels_ = std::move(levels);
  return g;
}

std::optional<int> Graph::tree_height() const {
  if (const auto* t = std::get_if<TreeKind>(&kind_)) return t->height;
  return std::nullopt;
}

std::vector<std::pair<VertexId, VertexId>> Graph::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(edge_count());
  for (VertexId u = 0; u < vertex_count(); ++u) {
    for (VertexId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph build_grid(int m) {
  if (m < 1 || m % 2 == 0) throw InvalidArgument("grid side m must be a positive odd integer, got " + std::to_string(m));
  const auto side = static_cast<VertexId>(m);
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(2 * side * (side - 1));
  for (VertexId r = 0; r < side; ++r) {
    for (VertexId c = 0; c < side; ++c) {
      const VertexId v = r * side + c;
      if (c + 1 < side) edges.emplace_back(v, v + 1);
      if (r + 1 < side) edges.emplace_back(v, v + side);
    }
  }
  return Graph::from_edges(side * side, edges, grid_center(m), GridKind{m});
}

Graph build_tree(int arity, int height) {
  if (arity < 2) throw InvalidArgument("tree arity d must be >= 2, got " + std::to_string(arity));
  if (height < 0) throw InvalidArgument("tree height H must be >= 0, got " + std::to_string(height));
  std::uint64_t count = 0;
  std::uint64_t width = 1;
  for (int l = 0; l <= height; ++l) {
    count += width;
    if (count > (1ULL << 31)) throw TooLarge("tree with d=" + std::to_string(arity) + ", H=" + std::to_string(height) + " is too large");
    width *= static_cast<std::uint64_t>(arity);
  }
  const auto n = static_cast<VertexId>(count);
  std::vector<int> levels(n, 0);
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(n - 1);
  for (VertexId child = 1; child < n; ++child) {
    const VertexId parent = (child - 1) / static_cast<VertexId>(arity);
    edges.emplace_back(parent, child);
    levels[child] = levels[parent] + 1;
  }
  return Graph::from_edges(n, edges, 0, TreeKind{arity, height}, std::move(levels));
}

Graph build_rgg(int count, double side, double radius, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("RGG needs N >= 1");
  if (!(side > 0.0)) throw InvalidArgument("RGG side must be positive");
  if (!(radius >= 0.0)) throw InvalidArgument("RGG radius must be nonnegative");

  std::mt19937_64 rng(seed);
  std::vector<double> x(static_cast<std::size_t>(count));
  std::vector<double> y(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    x[i] = side * uniform01(rng);
    y[i] = side * uniform01(rng);
  }

  const double r2 = radius * radius;
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx * dx + dy * dy <= r2) edges.emplace_back(i, j);
    }
  }

  const double c = side / 2.0;
  VertexId source = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    const double d2 = (x[i] - c) * (x[i] - c) + (y[i] - c) * (y[i] - c);
    if (d2 < best) {
      best = d2;
      source = static_cast<VertexId>(i);
    }
  }
  return Graph::from_edges(static_cast<VertexId>(count), edges, source, RggKind{count, side, radius});
}

std::pair<Graph, std::uint64_t> build_connected_rgg(int count, double side, double radius, std::uint64_t seed,
                                                    int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Graph g = build_rgg(count, side, radius, seed + static_cast<std::uint64_t>(attempt));
    if (is_connected(g)) return {std::move(g), seed + static_cast<std::uint64_t>(attempt)};
  }
  throw GenerationFailure("no connected RGG found within " + std::to_string(max_attempts) + " seeds");
}

Graph build_random_regular(int count, int degree, std::uint64_t seed, int max_attempts) {
  if (count < 1) throw InvalidArgument("random regular graph needs N >= 1");
  if (degree < 0 || degree >= count) throw InvalidArgument("random regular graph needs 0 <= d < N");
  if ((static_cast<long long>(count) * degree) % 2 != 0) throw InvalidArgument("N*d must be even for a d-regular graph");

  std::mt19937_64 rng(seed);
  std::vector<VertexId> stubs;
  stubs.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(degree));
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::vector<std::uint64_t> keys;

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    stubs.clear();
    for (int v = 0; v < count; ++v) stubs.insert(stubs.end(), static_cast<std::size_t>(degree), static_cast<VertexId>(v));
    // Fisher-Yates with an explicit bounded draw so the result is library independent.
    for (std::size_t i = stubs.size(); i > 1; --i) {
      std::uint64_t bound = i;
      std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
      std::uint64_t draw = rng();
      while (draw >= limit) draw = rng();
      std::swap(stubs[i - 1], stubs[draw % bound]);
    }

    edges.clear();
    keys.clear();
    bool simple = true;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      VertexId u = stubs[i];
      VertexId v = stubs[i + 1];
      if (u == v) {
        simple = false;
        break;
      }
      if (u > v) std::swap(u, v);
      edges.emplace_back(u, v);
      keys.push_back((static_cast<std::uint64_t>(u) << 32) | v);
    }
    if (!simple) continue;
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) continue;
    return Graph::from_edges(static_cast<VertexId>(count), edges, 0, RegularKind{count, degree});
  }
  throw GenerationFailure("configuration model produced no simple graph in " + std::to_string(max_attempts) + " attempts");
}

bool is_connected(const Graph& g) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<VertexId> stack{g.source()};
  seen[g.source()] = 1;
  VertexId reached = 1;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    for (VertexId w : g.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == g.vertex_count();
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << "#N " << g.vertex_count() << " source " << g.source() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("edge list is empty");
  std::istringstream header(line);
  std::string tag;
  std::string source_word;
  long long count = 0;
  long long source = 0;
  if (!(header >> tag >> count >> source_word >> source) || tag != "#N" || source_word != "source" || count < 1 ||
      source < 0) {
    throw IoError("malformed edge list header: '" + line + "'");
  }
  std::vector<std::pair<VertexId, VertexId>> edges;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    long long u = 0;
    long long v = 0;
    if (!(row >> u >> v) || u < 0 || v < 0) throw IoError("malformed edge line: '" + line + "'");
    edges.emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
  }
  return Graph::from_edges(static_cast<VertexId>(count), edges, static_cast<VertexId>(source));
}

}  // namespace pfwd
