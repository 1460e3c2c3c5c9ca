#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "pfwd/graph.hpp"

namespace pfwd {

struct ForwardingOptions {
  // Vertices on the deepest tree level never forward. Only meaningful for trees.
  bool leaves_mute = false;
};

/// leaves_mute on for trees, off for every other topology.
ForwardingOptions default_forwarding(const Graph& g);

/// Per-vertex flag: true when the vertex never forwards under `options`.
std::vector<char> mute_mask(const Graph& g, const ForwardingOptions& options);

inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// Uniform thresholds u[v][j], one per (non-source vertex, packet). Vertex v
/// forwards packet j at probability p iff u[v][j] <= p, which couples every
/// (p, n) pair on a single realisation.
///
/// Seeded fields are counter based: values are computed on demand from
/// (seed, packet, vertex), so nothing of size N x n is ever stored.
class ThresholdField {
 public:
  static ThresholdField from_seed(std::uint64_t seed, VertexId vertex_count, VertexId source, int packets);
  /// Explicit values, row-major over non-source vertices in index order, `packets` per row.
  static ThresholdField from_values(VertexId vertex_count, VertexId source, int packets, std::vector<double> values);

  double at(VertexId v, int packet) const;
  /// Fills out[v] = u[v][packet] for all v (out[source] = 0).
  void fill_packet(int packet, std::span<double> out) const;

  VertexId rows() const noexcept { return vertex_count_ - 1; }
  int packets() const noexcept { return packets_; }
  VertexId vertex_count() const noexcept { return vertex_count_; }
  VertexId source() const noexcept { return source_; }

 private:
  ThresholdField() = default;

  std::uint64_t seed_ = 0;
  VertexId vertex_count_ = 0;
  VertexId source_ = 0;
  int packets_ = 0;
  std::vector<double> values_;
};

/// One packet's outcome. Both lists are sorted ascending.
struct PacketSpread {
  std::vector<VertexId> forwarders;
  std::vector<VertexId> receivers;
};

/// Breadth-first spread of a single packet. `forwards(v)` is asked exactly
/// once per non-source vertex, on first reception; muted vertices are never asked.
PacketSpread run_single_packet(const Graph& g, const std::function<bool(VertexId)>& forwards,
                               const ForwardingOptions& options);

/// Same, with vertex v forwarding iff u <= p for its entry in a seeded stream.
PacketSpread run_single_packet(const Graph& g, double p, std::uint64_t packet_seed, const ForwardingOptions& options);

struct TrialOutcome {
  std::vector<int> receive_counts;  // source fixed at n
  std::int64_t successful_receivers = 0;
  std::int64_t transmissions = 0;
};

/// n independent packets at forwarding probability p. Packet j of the trial
/// uses the thresholds of ThresholdField::from_seed(seed, ...).
TrialOutcome run_trial(const Graph& g, int n, int k, double p, std::uint64_t seed, const ForwardingOptions& options);

/// Per-(p, n) receiver and transmission counts from one shared field.
class CoupledOutcome {
 public:
  CoupledOutcome(std::vector<double> p_grid, int n_max);

  std::int64_t receivers(std::size_t p_index, int n) const { return receivers_.at(slot(p_index, n)); }
  std::int64_t transmissions(std::size_t p_index, int n) const { return transmissions_.at(slot(p_index, n)); }
  const std::vector<double>& p_grid() const noexcept { return p_grid_; }
  int n_max() const noexcept { return n_max_; }

 private:
  friend CoupledOutcome run_trial_coupled(const Graph&, int, int, std::span<const double>, const ThresholdField&,
                                          const ForwardingOptions&);
  std::size_t slot(std::size_t p_index, int n) const;

  std::vector<double> p_grid_;
  int n_max_;
  std::vector<std::int64_t> receivers_;
  std::vector<std::int64_t> transmissions_;
};

CoupledOutcome run_trial_coupled(const Graph& g, int n_max, int k, std::span<const double> p_grid,
                                 const ThresholdField& field, const ForwardingOptions& options);

/// For one packet: forward_at[v] is the smallest p at which v forwards
/// (the minimax threshold over source paths, 0 at the source, kNever for
/// muted or unreachable vertices); receive_at[v] is the smallest p at which
/// v hears the packet, i.e. the minimum of forward_at over its neighbours
/// (0 at the source).
struct PacketThresholds {
  std::vector<double> forward_at;
  std::vector<double> receive_at;
};

/// Reusable bottleneck-path solver producing PacketThresholds.
class ThresholdSolver {
 public:
  ThresholdSolver(const Graph& g, const ForwardingOptions& options);

  void solve(const ThresholdField& field, int packet, PacketThresholds& out);

 private:
  const Graph* graph_;
  std::vector<char> mute_;
  std::vector<double> u_;
  std::vector<std::pair<double, VertexId>> heap_;
};

}  // namespace pfwd
