#include "pfwd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "pfwd/binom.hpp"
#include "pfwd/error.hpp"
#include "pfwd/parallel.hpp"
#include "pfwd/percolation.hpp"
#include "pfwd/random.hpp"

namespace pfwd {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::uint64_t kTauStream = 0x7461755F73747265ULL;

void check_common(int k, int n, long long trials) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (n < k) throw InvalidArgument("k must not exceed n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  if (trials < 2) throw InvalidArgument("trials must be >= 2");
}

__extension__ using Wide = __int128;

// Exact integer moments, so identical samples give stderr 0 and a mean with
// a single rounding; `scale` divides both mean and stderr.
McEstimate summarize_counts(const std::vector<std::int64_t>& xs, double scale, std::uint64_t seed) {
  McEstimate e;
  e.trials = static_cast<long long>(xs.size());
  e.seed = seed;
  Wide sum = 0;
  Wide sum_sq = 0;
  for (std::int64_t x : xs) {
    sum += x;
    sum_sq += static_cast<Wide>(x) * x;
  }
  const auto t = static_cast<Wide>(xs.size());
  // T * sum(x^2) - (sum x)^2 = T (T-1) * sample variance.
  const Wide spread = t * sum_sq - sum * sum;
  const double td = static_cast<double>(xs.size());
  e.mean = static_cast<double>(sum) / td / scale;
  e.stderr = std::sqrt(static_cast<double>(spread) / (td * (td - 1.0)) / td) / scale;
  return e;
}

struct TrialSeries {
  std::vector<std::int64_t> receivers;
  std::vector<std::int64_t> transmissions;
};

TrialSeries simulate(const Graph& g, int k, int n, double p, long long trials, std::uint64_t seed,
                     const EstimatorOptions& options) {
  check_common(k, n, trials);
  detail::require_probability(p, "forwarding probability p");
  const ForwardingOptions fwd = options.forwarding(g);
  TrialSeries out;
  out.receivers.resize(static_cast<std::size_t>(trials));
  out.transmissions.resize(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), options.workers, [&](std::size_t t, int) {
    const TrialOutcome o = run_trial(g, n, k, p, trial_seed(seed, static_cast<long long>(t)), fwd);
    out.receivers[t] = o.successful_receivers;
    out.transmissions[t] = o.transmissions;
  });
  return out;
}

// Per-vertex bounded max-heaps holding the k smallest receive thresholds seen
// so far; the heap top is the vertex's success threshold once k are present.
class KthSmallest {
 public:
  KthSmallest(std::size_t vertices, int k) : k_(static_cast<std::size_t>(k)), data_(vertices * k_), size_(vertices, 0) {}

  void reset() { std::fill(size_.begin(), size_.end(), 0); }

  void push(std::size_t v, double x) {
    double* h = data_.data() + v * k_;
    std::size_t& sz = size_[v];
    if (sz < k_) {
      h[sz++] = x;
      std::push_heap(h, h + sz);
    } else if (x < h[0]) {
      std::pop_heap(h, h + k_);
      h[k_ - 1] = x;
      std::push_heap(h, h + k_);
    }
  }

  // kNever until k finite thresholds have been pushed.
  double threshold(std::size_t v) const { return size_[v] == k_ ? data_[v * k_] : kNever; }

 private:
  std::size_t k_;
  std::vector<double> data_;
  std::vector<std::size_t> size_;
};

// Replays one trial and reports, after every packet count in n_values, each
// non-source vertex's success threshold.
class TrialReplayer {
 public:
  TrialReplayer(const Graph& g, const ForwardingOptions& fwd, int k)
      : graph_(g), solver_(g, fwd), heaps_(g.vertex_count(), k) {}

  template <class Visit>  // visit(n_index, vertex, threshold)
  void run(std::uint64_t seed, std::span<const int> n_values, Visit&& visit) {
    const VertexId nv = graph_.vertex_count();
    const VertexId s = graph_.source();
    const ThresholdField field = ThresholdField::from_seed(seed, nv, s, n_values.back());
    heaps_.reset();
    std::size_t next = 0;
    for (int j = 0; j < n_values.back(); ++j) {
      solver_.solve(field, j, th_);
      for (VertexId v = 0; v < nv; ++v) {
        if (v != s && th_.receive_at[v] != kNever) heaps_.push(v, th_.receive_at[v]);
      }
      while (next < n_values.size() && n_values[next] == j + 1) {
        for (VertexId v = 0; v < nv; ++v) {
          if (v != s) visit(next, v, heaps_.threshold(v));
        }
        ++next;
      }
    }
  }

 private:
  const Graph& graph_;
  ThresholdSolver solver_;
  PacketThresholds th_;
  KthSmallest heaps_;
};

// Smallest p at which at least `needed` (trial, vertex) successes have
// occurred. cumulative[0] counts thresholds exactly 0 (neighbours of the
// source); cumulative[b] for b >= 1 adds every threshold below b / bins, so
// the answer is 0 or the upper edge of the crossing bin.
double crossing(const std::vector<std::int64_t>& cumulative, double needed) {
  if (needed <= 0.0) return 0.0;
  const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), needed,
                                   [](std::int64_t c, double x) { return static_cast<double>(c) < x; });
  if (it == cumulative.end()) return kNever;
  const auto bins = static_cast<double>(cumulative.size() - 1);
  return std::min(1.0, static_cast<double>(it - cumulative.begin()) / bins);
}

}  // namespace

ForwardingOptions EstimatorOptions::forwarding(const Graph& g) const {
  ForwardingOptions fwd = default_forwarding(g);
  if (leaves_mute) fwd.leaves_mute = *leaves_mute;
  return fwd;
}

std::uint64_t trial_seed(std::uint64_t seed, long long trial) {
  return derive_seed(seed, static_cast<std::uint64_t>(trial));
}

McEstimate mc_expected_fraction(const Graph& g, int k, int n, double p, long long trials, std::uint64_t seed,
                                const EstimatorOptions& options) {
  const TrialSeries series = simulate(g, k, n, p, trials, seed, options);
  return summarize_counts(series.receivers, g.vertex_count(), seed);
}

McEstimate mc_tau(const Graph& g, int k, int n, double p, long long trials, std::uint64_t seed,
                  const EstimatorOptions& options) {
  return summarize_counts(simulate(g, k, n, p, trials, seed, options).transmissions, 1.0, seed);
}

ExactMoments exact_small_graph(const Graph& g, int k, int n, double p, const EstimatorOptions& options) {
  if (k < 1 || n < k) throw InvalidArgument("exact oracle needs 1 <= k <= n");
  detail::require_probability(p, "forwarding probability p");
  const VertexId nv = g.vertex_count();
  if (nv > kExactVertexCap) {
    throw TooLarge("exact oracle supports at most " + std::to_string(kExactVertexCap) + " vertices, got " +
                   std::to_string(nv));
  }
  const VertexId s = g.source();
  const std::vector<char> mute = mute_mask(g, options.forwarding(g));

  // Only vertices that can forward carry a random bit.
  std::vector<VertexId> free_vertices;
  for (VertexId v = 0; v < nv; ++v) {
    if (v != s && !mute[v]) free_vertices.push_back(v);
  }
  const std::size_t bits = free_vertices.size();

  std::vector<double> hear(nv, 0.0);
  double forwarders_mean = 0.0;
  std::vector<char> open(nv, 0);
  std::vector<char> in_cluster(nv, 0);
  std::vector<char> hears(nv, 0);
  std::vector<VertexId> stack;

  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << bits); ++pattern) {
    double weight = 1.0;
    std::fill(open.begin(), open.end(), 0);
    for (std::size_t b = 0; b < bits; ++b) {
      const bool on = (pattern >> b) & 1U;
      open[free_vertices[b]] = on ? 1 : 0;
      weight *= on ? p : 1.0 - p;
    }
    if (weight == 0.0) continue;
    open[s] = 1;

    std::fill(in_cluster.begin(), in_cluster.end(), 0);
    std::fill(hears.begin(), hears.end(), 0);
    stack.assign(1, s);
    in_cluster[s] = 1;
    int cluster = 0;
    while (!stack.empty()) {
      const VertexId x = stack.back();
      stack.pop_back();
      ++cluster;
      for (VertexId w : g.neighbors(x)) {
        hears[w] = 1;
        if (open[w] && !in_cluster[w]) {
          in_cluster[w] = 1;
          stack.push_back(w);
        }
      }
    }
    forwarders_mean += weight * cluster;
    for (VertexId v = 0; v < nv; ++v) {
      if (hears[v]) hear[v] += weight;
    }
  }

  ExactMoments out;
  out.expected_receivers = 1.0;
  for (VertexId v = 0; v < nv; ++v) {
    if (v != s) out.expected_receivers += binom_tail(n, std::clamp(hear[v], 0.0, 1.0), k);
  }
  out.expected_transmissions = n * forwarders_mean;
  return out;
}

std::vector<PminEstimate> mc_pmin_sweep(const Graph& g, int k, double delta, std::span<const int> n_values,
                                        long long trials, double tol, std::uint64_t seed,
                                        const EstimatorOptions& options) {
  if (n_values.empty()) throw InvalidArgument("n range must not be empty");
  if (!std::is_sorted(n_values.begin(), n_values.end()) ||
      std::adjacent_find(n_values.begin(), n_values.end()) != n_values.end()) {
    throw InvalidArgument("n range must be strictly ascending");
  }
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (n_values.front() < k) throw NoSolution("n < k: a vertex can never collect k packets");
  if (trials < 2) throw InvalidArgument("trials must be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
  if (!(tol >= 1e-4 && tol <= 1.0)) throw InvalidArgument("tol must lie in [1e-4, 1]");

  const ForwardingOptions fwd = options.forwarding(g);
  const auto bins = static_cast<std::size_t>(std::ceil(1.0 / tol - 1e-9));
  const std::size_t ns = n_values.size();
  const int pool = resolve_workers(options.workers);
  const double nv = g.vertex_count();
  const double t_count = static_cast<double>(trials);

  // Pass 1: histogram of success thresholds per n, summed over trials.
  const std::size_t slots = bins + 1;
  std::vector<std::vector<std::int64_t>> hist(static_cast<std::size_t>(pool), std::vector<std::int64_t>(ns * slots, 0));
  {
    std::vector<std::optional<TrialReplayer>> replayers(static_cast<std::size_t>(pool));
    parallel_for(static_cast<std::size_t>(trials), options.workers, [&](std::size_t t, int w) {
      auto& rep = replayers[static_cast<std::size_t>(w)];
      if (!rep) rep.emplace(g, fwd, k);
      std::int64_t* h = hist[static_cast<std::size_t>(w)].data();
      rep->run(trial_seed(seed, static_cast<long long>(t)), n_values, [&](std::size_t i, VertexId, double x) {
        if (x == kNever) return;
        const std::size_t b = x == 0.0 ? 0 : 1 + std::min(bins - 1, static_cast<std::size_t>(x * static_cast<double>(bins)));
        ++h[i * slots + b];
      });
    });
  }
  std::vector<std::vector<std::int64_t>> cumulative(ns, std::vector<std::int64_t>(slots, 0));
  for (std::size_t i = 0; i < ns; ++i) {
    std::int64_t running = 0;
    for (std::size_t b = 0; b < slots; ++b) {
      for (const auto& h : hist) running += h[i * slots + b];
      cumulative[i][b] = running;
    }
  }

  // Mean fraction >= level  <=>  non-source successes >= level*T*N - T.
  auto needed = [&](double level) { return std::ceil(level * t_count * nv - t_count - 1e-7); };

  std::vector<PminEstimate> out(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    out[i].n = n_values[i];
    out[i].p_min = crossing(cumulative[i], needed(1.0 - delta));
    if (out[i].p_min == kNever) {
      throw NoSolution("receiver fraction 1-delta unreachable even at p = 1 (n=" + std::to_string(n_values[i]) + ")");
    }
  }

  // Pass 2: per-trial fractions at each p_min for the standard error.
  std::vector<std::vector<std::int64_t>> successes(ns, std::vector<std::int64_t>(static_cast<std::size_t>(trials), 1));
  {
    std::vector<std::optional<TrialReplayer>> replayers(static_cast<std::size_t>(pool));
    parallel_for(static_cast<std::size_t>(trials), options.workers, [&](std::size_t t, int w) {
      auto& rep = replayers[static_cast<std::size_t>(w)];
      if (!rep) rep.emplace(g, fwd, k);
      rep->run(trial_seed(seed, static_cast<long long>(t)), n_values, [&](std::size_t i, VertexId, double x) {
        if (x <= out[i].p_min) ++successes[i][t];
      });
    });
  }
  for (std::size_t i = 0; i < ns; ++i) {
    const McEstimate e = summarize_counts(successes[i], nv, seed);
    out[i].fraction_stderr = e.stderr;
    const double lo = crossing(cumulative[i], needed(1.0 - delta - kZ95 * e.stderr));
    double hi = crossing(cumulative[i], needed(1.0 - delta + kZ95 * e.stderr));
    if (hi == kNever) hi = 1.0;
    out[i].ci_half_width = 0.5 * (hi - lo);
  }
  return out;
}

PminEstimate mc_pmin(const Graph& g, int k, int n, double delta, long long trials, double tol, std::uint64_t seed,
                     const EstimatorOptions& options) {
  const int ns[] = {n};
  return mc_pmin_sweep(g, k, delta, ns, trials, tol, seed, options).front();
}

std::vector<CurvePoint> sweep_n(const Graph& g, int k, double delta, std::span<const int> n_values, long long trials,
                                std::uint64_t seed, const EstimatorOptions& options, double tol) {
  const std::vector<PminEstimate> pmins = mc_pmin_sweep(g, k, delta, n_values, trials, tol, seed, options);
  std::vector<CurvePoint> out;
  out.reserve(pmins.size());
  for (const PminEstimate& pm : pmins) {
    const std::uint64_t tau_seed = derive_seed(seed, kTauStream, static_cast<std::uint64_t>(pm.n));
    const McEstimate centre = mc_tau(g, k, pm.n, pm.p_min, trials, tau_seed, options);
    double spread = 0.0;
    if (pm.ci_half_width > 0.0) {
      const double lo_p = std::max(0.0, pm.p_min - pm.ci_half_width);
      const double hi_p = std::min(1.0, pm.p_min + pm.ci_half_width);
      const double lo = mc_tau(g, k, pm.n, lo_p, trials, tau_seed, options).mean;
      const double hi = mc_tau(g, k, pm.n, hi_p, trials, tau_seed, options).mean;
      spread = (hi - lo) / (2.0 * kZ95);
    }
    CurvePoint cp;
    cp.n = pm.n;
    cp.p_min = pm.p_min;
    cp.p_min_ci = pm.ci_half_width;
    cp.tau = centre.mean;
    cp.tau_stderr = std::sqrt(centre.stderr * centre.stderr + spread * spread);
    out.push_back(cp);
  }
  return out;
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> points, std::string_view comment) {
  if (!comment.empty()) {
    std::istringstream lines{std::string(comment)};
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << '\n';
  }
  out << "n,p_min,p_min_ci,tau,tau_stderr\n";
  for (const CurvePoint& c : points) {
    out << c.n << ',' << format_double(c.p_min) << ',' << format_double(c.p_min_ci) << ',' << format_double(c.tau)
        << ',' << format_double(c.tau_stderr) << '\n';
  }
}

}  // namespace pfwd
