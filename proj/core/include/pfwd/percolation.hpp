#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pfwd {

/// Believed critical probability for site percolation on Z^2.
inline constexpr double kCriticalProbability = 0.59;

/// An m x m realisation of i.i.d. Bernoulli(p) sites, row-major, free boundary.
struct PercField {
  int m = 0;
  double p = 0.0;
  std::vector<std::uint8_t> open;

  std::size_t site(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(m) + static_cast<std::size_t>(col);
  }
  std::size_t center() const noexcept { return site(m / 2, m / 2); }
};

PercField sample_field(int m, double p, std::uint64_t seed);

/// Wraps explicit site states (1 = open) as a field; m must be odd.
PercField make_field(int m, std::vector<std::uint8_t> open, double p = 0.0);

/// Weighted quick-union with path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t size);
  std::size_t find(std::size_t x) noexcept;
  // Returns the surviving root.
  std::size_t unite(std::size_t a, std::size_t b) noexcept;
  std::size_t size_of(std::size_t x) noexcept { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

struct ClusterLabels {
  static constexpr std::int32_t kClosed = -1;

  std::vector<std::int32_t> label;  // per site; kClosed for closed sites
  std::vector<std::int64_t> sizes;  // per cluster id, ids numbered in row-major order of first site

  int cluster_count() const noexcept { return static_cast<int>(sizes.size()); }
  /// Id of the largest cluster (lowest id on ties), or -1 when no site is open.
  int largest() const noexcept;
};

/// 4-neighbour open clusters inside the m x m box.
ClusterLabels label_clusters(const PercField& f);

/// Cluster `id` together with its closed boundary sites, as sorted site indices.
std::vector<std::size_t> extended_cluster(const PercField& f, const ClusterLabels& labels, int id);

struct SampleEstimate {
  double mean = 0.0;
  double stderr = 0.0;
  int reps = 0;
  bool subcritical = false;  // p <= kCriticalProbability; finite-size values only
};

/// Mean largest-cluster fraction over `reps` fields; reps >= 2.
SampleEstimate estimate_theta(int m, double p, int reps, std::uint64_t seed, int workers = 1);

enum class ThetaPlusMethod { ratio, direct };

/// ratio: theta / p. direct: mean fraction covered by the extended cluster of the largest open cluster.
SampleEstimate estimate_theta_plus(int m, double p, int reps, std::uint64_t seed, ThetaPlusMethod method,
                                   int workers = 1);

/// Mean of |C_0| / m^2 over fields whose centre site is forced open.
SampleEstimate conditioned_origin_density(int m, double p, int reps, std::uint64_t seed, int workers = 1);

/// Pool-adjacent-violators projection onto nondecreasing sequences (equal weights).
std::vector<double> isotonic_regression(std::span<const double> values);

struct ThetaRow {
  double p = 0.0;
  double theta = 0.0;
  double theta_stderr = 0.0;
  double theta_plus = 0.0;  // theta / p
  int m = 0;
  int reps = 0;
  std::uint64_t seed = 0;
};

/// Empirical percolation curve. Queries interpolate linearly on the isotonic
/// projections; beyond the last grid point the curve is joined to the exact
/// value theta(1) = theta_plus(1) = 1, and below the first point it is flat.
class ThetaTable {
 public:
  explicit ThetaTable(std::vector<ThetaRow> rows);

  const std::vector<ThetaRow>& rows() const noexcept { return rows_; }
  const std::vector<double>& monotone_theta() const noexcept { return monotone_theta_; }
  const std::vector<double>& monotone_theta_plus() const noexcept { return monotone_theta_plus_; }

  double theta_at(double p) const;
  double theta_plus_at(double p) const;

  /// Header "p,theta,theta_stderr,theta_plus,m,reps,seed"; each comment line is prefixed with '#'.
  void write_csv(std::ostream& out, std::string_view comment = {}) const;
  static ThetaTable read_csv(std::istream& in);

 private:
  double interpolate(const std::vector<double>& curve, double p) const;

  std::vector<ThetaRow> rows_;
  std::vector<double> monotone_theta_;
  std::vector<double> monotone_theta_plus_;
};

/// One row per grid point; row i equals estimate_theta(m, p_grid[i], reps, seed).
ThetaTable build_theta_table(int m, std::span<const double> p_grid, int reps, std::uint64_t seed, int workers = 1);

/// Cache file name encoding (m, reps, seed, grid hash).
std::string theta_cache_name(int m, int reps, std::uint64_t seed, std::span<const double> p_grid);

/// Shortest round-trip decimal text for a double.
std::string format_double(double x);

}  // namespace pfwd
