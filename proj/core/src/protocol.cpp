#include "pfwd/protocol.hpp"

#include <algorithm>
#include <string>

#include "pfwd/error.hpp"
#include "pfwd/random.hpp"

namespace pfwd {

namespace {

constexpr std::uint64_t kVertexStride = 0x9E3779B97F4A7C15ULL;

std::uint64_t packet_key(std::uint64_t seed, int packet) {
  return derive_seed(seed, static_cast<std::uint64_t>(packet));
}

double seeded_threshold(std::uint64_t key, VertexId v) {
  return to_open_unit(mix64(key + static_cast<std::uint64_t>(v) * kVertexStride));
}

// Breadth-first spread with epoch stamps so repeated packets need no clearing.
class Propagator {
 public:
  Propagator(const Graph& g, const ForwardingOptions& options)
      : graph_(g), mute_(mute_mask(g, options)), stamp_(g.vertex_count(), 0) {
    queue_.reserve(g.vertex_count());
  }

  // Returns the number of forwarders; on_receive(v) fires on the first
  // reception by every non-source vertex, on_forward(v) for every forwarder.
  template <class Decide, class OnReceive, class OnForward>
  std::int64_t spread(Decide&& decide, OnReceive&& on_receive, OnForward&& on_forward) {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    const VertexId s = graph_.source();
    queue_.clear();
    queue_.push_back(s);
    stamp_[s] = epoch_;
    on_forward(s);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      for (VertexId w : graph_.neighbors(queue_[head])) {
        if (stamp_[w] == epoch_) continue;
        stamp_[w] = epoch_;
        on_receive(w);
        if (!mute_[w] && decide(w)) {
          queue_.push_back(w);
          on_forward(w);
        }
      }
    }
    return static_cast<std::int64_t>(queue_.size());
  }

 private:
  const Graph& graph_;
  std::vector<char> mute_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<VertexId> queue_;
};

PacketSpread finish_spread(const Graph& g, std::vector<VertexId> forwarders) {
  std::vector<char> hears(g.vertex_count(), 0);
  hears[g.source()] = 1;
  for (VertexId f : forwarders) {
    for (VertexId w : g.neighbors(f)) hears[w] = 1;
  }
  PacketSpread out;
  std::sort(forwarders.begin(), forwarders.end());
  out.forwarders = std::move(forwarders);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (hears[v]) out.receivers.push_back(v);
  }
  return out;
}

void check_k_n(int n, int k) {
  if (n < 1) throw InvalidArgument("packet count n must be >= 1, got " + std::to_string(n));
  if (k < 1) throw InvalidArgument("threshold k must be >= 1, got " + std::to_string(k));
  if (k > n) throw InvalidArgument("k must not exceed n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
}

}  // namespace

ForwardingOptions default_forwarding(const Graph& g) { return ForwardingOptions{g.is_tree()}; }

std::vector<char> mute_mask(const Graph& g, const ForwardingOptions& options) {
  std::vector<char> mute(g.vertex_count(), 0);
  const auto height = g.tree_height();
  if (options.leaves_mute && height && g.has_levels()) {
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (g.level(v) == *height && v != g.source()) mute[v] = 1;
    }
  }
  return mute;
}

ThresholdField ThresholdField::from_seed(std::uint64_t seed, VertexId vertex_count, VertexId source, int packets) {
  detail::require(vertex_count >= 1 && source < vertex_count, "threshold field: bad vertex count or source");
  detail::require(packets >= 0, "threshold field: negative packet count");
  ThresholdField f;
  f.seed_ = seed;
  f.vertex_count_ = vertex_count;
  f.source_ = source;
  f.packets_ = packets;
  return f;
}

ThresholdField ThresholdField::from_values(VertexId vertex_count, VertexId source, int packets,
                                           std::vector<double> values) {
  detail::require(vertex_count >= 1 && source < vertex_count, "threshold field: bad vertex count or source");
  detail::require(packets >= 0, "threshold field: negative packet count");
  detail::require(values.size() == static_cast<std::size_t>(vertex_count - 1) * static_cast<std::size_t>(packets),
                  "threshold field: expected (vertex_count-1) x packets values");
  for (double u : values) detail::require_probability(u, "threshold value");
  ThresholdField f;
  f.vertex_count_ = vertex_count;
  f.source_ = source;
  f.packets_ = packets;
  f.values_ = std::move(values);
  return f;
}

double ThresholdField::at(VertexId v, int packet) const {
  if (v == source_) return 0.0;
  if (values_.empty()) return seeded_threshold(packet_key(seed_, packet), v);
  const std::size_t row = v < source_ ? v : v - 1;
  return values_[row * static_cast<std::size_t>(packets_) + static_cast<std::size_t>(packet)];
}

void ThresholdField::fill_packet(int packet, std::span<double> out) const {
  if (values_.empty()) {
    const std::uint64_t key = packet_key(seed_, packet);
    for (VertexId v = 0; v < vertex_count_; ++v) out[v] = seeded_threshold(key, v);
    out[source_] = 0.0;
  } else {
    for (VertexId v = 0; v < vertex_count_; ++v) out[v] = at(v, packet);
  }
}

PacketSpread run_single_packet(const Graph& g, const std::function<bool(VertexId)>& forwards,
                               const ForwardingOptions& options) {
  Propagator prop(g, options);
  std::vector<VertexId> forwarders;
  prop.spread(forwards, [](VertexId) {}, [&](VertexId v) { forwarders.push_back(v); });
  return finish_spread(g, std::move(forwarders));
}

PacketSpread run_single_packet(const Graph& g, double p, std::uint64_t packet_seed, const ForwardingOptions& options) {
  detail::require_probability(p, "forwarding probability p");
  return run_single_packet(
      g, [&](VertexId v) { return seeded_threshold(packet_seed, v) <= p; }, options);
}

TrialOutcome run_trial(const Graph& g, int n, int k, double p, std::uint64_t seed, const ForwardingOptions& options) {
  check_k_n(n, k);
  detail::require_probability(p, "forwarding probability p");

  TrialOutcome out;
  out.receive_counts.assign(g.vertex_count(), 0);
  Propagator prop(g, options);
  for (int j = 0; j < n; ++j) {
    const std::uint64_t key = packet_key(seed, j);
    out.transmissions += prop.spread([&](VertexId v) { return seeded_threshold(key, v) <= p; },
                                     [&](VertexId v) { ++out.receive_counts[v]; }, [](VertexId) {});
  }
  out.receive_counts[g.source()] = n;
  for (int c : out.receive_counts) {
    if (c >= k) ++out.successful_receivers;
  }
  return out;
}

CoupledOutcome::CoupledOutcome(std::vector<double> p_grid, int n_max)
    : p_grid_(std::move(p_grid)),
      n_max_(n_max),
      receivers_(p_grid_.size() * static_cast<std::size_t>(n_max), 0),
      transmissions_(p_grid_.size() * static_cast<std::size_t>(n_max), 0) {}

std::size_t CoupledOutcome::slot(std::size_t p_index, int n) const {
  if (p_index >= p_grid_.size() || n < 1 || n > n_max_) throw InvalidArgument("coupled outcome index out of range");
  return p_index * static_cast<std::size_t>(n_max_) + static_cast<std::size_t>(n - 1);
}

CoupledOutcome run_trial_coupled(const Graph& g, int n_max, int k, std::span<const double> p_grid,
                                 const ThresholdField& field, const ForwardingOptions& options) {
  check_k_n(n_max, k);
  for (double p : p_grid) detail::require_probability(p, "p_grid entry");
  if (!std::is_sorted(p_grid.begin(), p_grid.end())) throw InvalidArgument("p_grid must be ascending");
  detail::require(field.vertex_count() == g.vertex_count() && field.source() == g.source(),
                  "threshold field does not match the graph");
  detail::require(field.packets() >= n_max, "threshold field has fewer packets than n_max");

  const VertexId nv = g.vertex_count();
  const VertexId s = g.source();
  CoupledOutcome out(std::vector<double>(p_grid.begin(), p_grid.end()), n_max);
  ThresholdSolver solver(g, options);
  PacketThresholds th;
  std::vector<int> counts(p_grid.size() * nv, 0);
  std::vector<std::int64_t> sent(p_grid.size(), 0);

  for (int j = 0; j < n_max; ++j) {
    solver.solve(field, j, th);
    for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
      const double p = p_grid[pi];
      int* row = counts.data() + pi * nv;
      std::int64_t success = 1;
      for (VertexId v = 0; v < nv; ++v) {
        if (th.forward_at[v] <= p) ++sent[pi];
        if (v == s) continue;
        if (th.receive_at[v] <= p) ++row[v];
        if (row[v] >= k) ++success;
      }
      const std::size_t at = pi * static_cast<std::size_t>(n_max) + static_cast<std::size_t>(j);
      out.receivers_[at] = success;
      out.transmissions_[at] = sent[pi];
    }
  }
  return out;
}

ThresholdSolver::ThresholdSolver(const Graph& g, const ForwardingOptions& options)
    : graph_(&g), mute_(mute_mask(g, options)), u_(g.vertex_count(), 0.0) {
  heap_.reserve(g.vertex_count());
}

void ThresholdSolver::solve(const ThresholdField& field, int packet, PacketThresholds& out) {
  const Graph& g = *graph_;
  const VertexId nv = g.vertex_count();
  const VertexId s = g.source();
  field.fill_packet(packet, u_);
  out.forward_at.assign(nv, kNever);
  out.receive_at.assign(nv, kNever);

  // Minimax Dijkstra: the cost of a path is the largest threshold on it.
  auto cmp = [](const std::pair<double, VertexId>& a, const std::pair<double, VertexId>& b) { return a.first > b.first; };
  heap_.clear();
  out.forward_at[s] = 0.0;
  heap_.emplace_back(0.0, s);
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), cmp);
    const auto [d, x] = heap_.back();
    heap_.pop_back();
    if (d > out.forward_at[x]) continue;
    for (VertexId w : g.neighbors(x)) {
      if (mute_[w]) continue;
      const double cand = std::max(d, u_[w]);
      if (cand < out.forward_at[w]) {
        out.forward_at[w] = cand;
        heap_.emplace_back(cand, w);
        std::push_heap(heap_.begin(), heap_.end(), cmp);
      }
    }
  }
  for (VertexId v = 0; v < nv; ++v) {
    double best = kNever;
    for (VertexId w : g.neighbors(v)) best = std::min(best, out.forward_at[w]);
    out.receive_at[v] = best;
  }
  out.receive_at[s] = 0.0;
}

}  // namespace pfwd
