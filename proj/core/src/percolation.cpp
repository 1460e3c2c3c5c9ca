#include "pfwd/percolation.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "pfwd/error.hpp"
#include "pfwd/parallel.hpp"
#include "pfwd/random.hpp"

namespace pfwd {

namespace {

void check_side(int m) {
  if (m < 1 || m % 2 == 0) throw InvalidArgument("grid side m must be a positive odd integer, got " + std::to_string(m));
}

std::uint64_t rep_seed(std::uint64_t seed, double p, int rep) {
  return derive_seed(seed, std::bit_cast<std::uint64_t>(p), static_cast<std::uint64_t>(rep));
}

SampleEstimate summarize(const std::vector<double>& xs, double p) {
  SampleEstimate e;
  e.reps = static_cast<int>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  e.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  e.stderr = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  e.subcritical = p <= kCriticalProbability;
  return e;
}

void check_reps(int reps) {
  if (reps < 2) throw InvalidArgument("reps must be >= 2 (standard error undefined for fewer)");
}

// Largest cluster size and the size of its extended cluster.
std::pair<std::int64_t, std::int64_t> largest_sizes(const PercField& f) {
  const ClusterLabels labels = label_clusters(f);
  const int id = labels.largest();
  if (id < 0) return {0, 0};
  std::int64_t extended = 0;
  const int m = f.m;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const std::size_t s = f.site(r, c);
      if (labels.label[s] == id) {
        ++extended;
      } else if (!f.open[s]) {
        const bool touches = (r > 0 && labels.label[f.site(r - 1, c)] == id) ||
                             (r + 1 < m && labels.label[f.site(r + 1, c)] == id) ||
                             (c > 0 && labels.label[f.site(r, c - 1)] == id) ||
                             (c + 1 < m && labels.label[f.site(r, c + 1)] == id);
        if (touches) ++extended;
      }
    }
  }
  return {labels.sizes[static_cast<std::size_t>(id)], extended};
}

std::int64_t origin_cluster_size(const PercField& f) {
  const std::size_t start = f.center();
  if (!f.open[start]) return 0;
  std::vector<std::uint8_t> seen(f.open.size(), 0);
  std::vector<std::size_t> stack{start};
  seen[start] = 1;
  std::int64_t count = 0;
  const auto m = static_cast<std::size_t>(f.m);
  while (!stack.empty()) {
    const std::size_t s = stack.back();
    stack.pop_back();
    ++count;
    const std::size_t r = s / m;
    const std::size_t c = s % m;
    auto visit = [&](std::size_t t) {
      if (f.open[t] && !seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
    };
    if (r > 0) visit(s - m);
    if (r + 1 < m) visit(s + m);
    if (c > 0) visit(s - 1);
    if (c + 1 < m) visit(s + 1);
  }
  return count;
}

double parse_double(std::string_view text) {
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw IoError("bad number in theta table: '" + std::string(text) + "'");
  }
  return x;
}

}  // namespace

PercField sample_field(int m, double p, std::uint64_t seed) {
  check_side(m);
  detail::require_probability(p, "site probability p");
  PercField f;
  f.m = m;
  f.p = p;
  f.open.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  std::mt19937_64 rng(seed);
  for (auto& site : f.open) site = static_cast<double>(rng() >> 11) * 0x1.0p-53 < p ? 1 : 0;
  return f;
}

PercField make_field(int m, std::vector<std::uint8_t> open, double p) {
  check_side(m);
  detail::require(open.size() == static_cast<std::size_t>(m) * static_cast<std::size_t>(m), "field must have m*m sites");
  PercField f;
  f.m = m;
  f.p = p;
  f.open = std::move(open);
  return f;
}

UnionFind::UnionFind(std::size_t size) : parent_(size), size_(size, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) noexcept {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

std::size_t UnionFind::unite(std::size_t a, std::size_t b) noexcept {
  a = find(a);
  b = find(b);
  if (a == b) return a;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return a;
}

int ClusterLabels::largest() const noexcept {
  if (sizes.empty()) return -1;
  return static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
}

ClusterLabels label_clusters(const PercField& f) {
  const auto m = static_cast<std::size_t>(f.m);
  const std::size_t total = m * m;
  UnionFind uf(total);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t s = r * m + c;
      if (!f.open[s]) continue;
      if (c + 1 < m && f.open[s + 1]) uf.unite(s, s + 1);
      if (r + 1 < m && f.open[s + m]) uf.unite(s, s + m);
    }
  }
  ClusterLabels out;
  out.label.assign(total, ClusterLabels::kClosed);
  std::vector<std::int32_t> id_of_root(total, ClusterLabels::kClosed);
  for (std::size_t s = 0; s < total; ++s) {
    if (!f.open[s]) continue;
    const std::size_t root = uf.find(s);
    if (id_of_root[root] == ClusterLabels::kClosed) {
      id_of_root[root] = static_cast<std::int32_t>(out.sizes.size());
      out.sizes.push_back(0);
    }
    out.label[s] = id_of_root[root];
    ++out.sizes[static_cast<std::size_t>(id_of_root[root])];
  }
  return out;
}

std::vector<std::size_t> extended_cluster(const PercField& f, const ClusterLabels& labels, int id) {
  if (id < 0 || id >= labels.cluster_count()) throw InvalidArgument("unknown cluster id " + std::to_string(id));
  const auto m = static_cast<std::size_t>(f.m);
  std::vector<std::uint8_t> member(m * m, 0);
  for (std::size_t s = 0; s < m * m; ++s) {
    if (labels.label[s] != id) continue;
    member[s] = 1;
    const std::size_t r = s / m;
    const std::size_t c = s % m;
    if (r > 0 && !f.open[s - m]) member[s - m] = 1;
    if (r + 1 < m && !f.open[s + m]) member[s + m] = 1;
    if (c > 0 && !f.open[s - 1]) member[s - 1] = 1;
    if (c + 1 < m && !f.open[s + 1]) member[s + 1] = 1;
  }
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < m * m; ++s) {
    if (member[s]) out.push_back(s);
  }
  return out;
}

SampleEstimate estimate_theta(int m, double p, int reps, std::uint64_t seed, int workers) {
  check_side(m);
  detail::require_probability(p, "p");
  check_reps(reps);
  const double area = static_cast<double>(m) * m;
  std::vector<double> fractions(static_cast<std::size_t>(reps));
  parallel_for(fractions.size(), workers, [&](std::size_t i, int) {
    const PercField f = sample_field(m, p, rep_seed(seed, p, static_cast<int>(i)));
    fractions[i] = static_cast<double>(largest_sizes(f).first) / area;
  });
  return summarize(fractions, p);
}

SampleEstimate estimate_theta_plus(int m, double p, int reps, std::uint64_t seed, ThetaPlusMethod method,
                                   int workers) {
  if (method == ThetaPlusMethod::ratio) {
    if (!(p > 0.0)) throw InvalidArgument("ratio estimate of theta_plus needs p > 0");
    SampleEstimate e = estimate_theta(m, p, reps, seed, workers);
    e.mean /= p;
    e.stderr /= p;
    return e;
  }
  check_side(m);
  detail::require_probability(p, "p");
  check_reps(reps);
  const double area = static_cast<double>(m) * m;
  std::vector<double> fractions(static_cast<std::size_t>(reps));
  parallel_for(fractions.size(), workers, [&](std::size_t i, int) {
    const PercField f = sample_field(m, p, rep_seed(seed, p, static_cast<int>(i)));
    fractions[i] = static_cast<double>(largest_sizes(f).second) / area;
  });
  return summarize(fractions, p);
}

SampleEstimate conditioned_origin_density(int m, double p, int reps, std::uint64_t seed, int workers) {
  check_side(m);
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("conditioned origin density needs p in (0,1]");
  check_reps(reps);
  const double area = static_cast<double>(m) * m;
  std::vector<double> fractions(static_cast<std::size_t>(reps));
  parallel_for(fractions.size(), workers, [&](std::size_t i, int) {
    PercField f = sample_field(m, p, rep_seed(derive_seed(seed, 1), p, static_cast<int>(i)));
    f.open[f.center()] = 1;
    fractions[i] = static_cast<double>(origin_cluster_size(f)) / area;
  });
  return summarize(fractions, p);
}

std::vector<double> isotonic_regression(std::span<const double> values) {
  struct Block {
    double sum;
    std::size_t count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum += top.sum;
      blocks.back().count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean());
  return out;
}

ThetaTable::ThetaTable(std::vector<ThetaRow> rows) : rows_(std::move(rows)) {
  detail::require(!rows_.empty(), "theta table needs at least one row");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    detail::require_probability(rows_[i].p, "theta table p");
    if (i > 0 && !(rows_[i].p > rows_[i - 1].p)) throw InvalidArgument("theta table p values must be strictly ascending");
  }
  std::vector<double> theta;
  theta.reserve(rows_.size());
  for (const auto& r : rows_) theta.push_back(std::clamp(r.theta, 0.0, 1.0));
  monotone_theta_ = isotonic_regression(theta);

  std::vector<double> plus;
  plus.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    plus.push_back(rows_[i].p > 0.0 ? std::min(1.0, monotone_theta_[i] / rows_[i].p) : 0.0);
  }
  monotone_theta_plus_ = isotonic_regression(plus);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    monotone_theta_plus_[i] = std::max(monotone_theta_plus_[i], monotone_theta_[i]);
  }
}

double ThetaTable::interpolate(const std::vector<double>& curve, double p) const {
  if (p <= rows_.front().p) return curve.front();
  if (p >= rows_.back().p) {
    const double last_p = rows_.back().p;
    if (last_p >= 1.0) return curve.back();
    const double w = (std::min(p, 1.0) - last_p) / (1.0 - last_p);
    return curve.back() + w * (1.0 - curve.back());
  }
  const auto it = std::upper_bound(rows_.begin(), rows_.end(), p, [](double x, const ThetaRow& r) { return x < r.p; });
  const std::size_t hi = static_cast<std::size_t>(it - rows_.begin());
  const std::size_t lo = hi - 1;
  const double w = (p - rows_[lo].p) / (rows_[hi].p - rows_[lo].p);
  return curve[lo] + w * (curve[hi] - curve[lo]);
}

double ThetaTable::theta_at(double p) const { return interpolate(monotone_theta_, p); }

double ThetaTable::theta_plus_at(double p) const { return interpolate(monotone_theta_plus_, p); }

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void ThetaTable::write_csv(std::ostream& out, std::string_view comment) const {
  if (!comment.empty()) {
    std::istringstream lines{std::string(comment)};
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << '\n';
  }
  out << "p,theta,theta_stderr,theta_plus,m,reps,seed\n";
  for (const auto& r : rows_) {
    out << format_double(r.p) << ',' << format_double(r.theta) << ',' << format_double(r.theta_stderr) << ','
        << format_double(r.theta_plus) << ',' << r.m << ',' << r.reps << ',' << r.seed << '\n';
  }
}

ThetaTable ThetaTable::read_csv(std::istream& in) {
  std::string line;
  bool header_seen = false;
  std::vector<ThetaRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "p,theta,theta_stderr,theta_plus,m,reps,seed") throw IoError("unexpected theta table header: '" + line + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (std::size_t pos = rest.find(','); pos != std::string_view::npos; pos = rest.find(',')) {
      cells.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    cells.push_back(rest);
    if (cells.size() != 7) throw IoError("theta table row needs 7 columns: '" + line + "'");
    ThetaRow r;
    r.p = parse_double(cells[0]);
    r.theta = parse_double(cells[1]);
    r.theta_stderr = parse_double(cells[2]);
    r.theta_plus = parse_double(cells[3]);
    r.m = static_cast<int>(parse_double(cells[4]));
    r.reps = static_cast<int>(parse_double(cells[5]));
    std::uint64_t seed = 0;
    const auto res = std::from_chars(cells[6].data(), cells[6].data() + cells[6].size(), seed);
    if (res.ec != std::errc{}) throw IoError("bad seed in theta table: '" + std::string(cells[6]) + "'");
    r.seed = seed;
    rows.push_back(r);
  }
  if (!header_seen) throw IoError("theta table has no header");
  return ThetaTable(std::move(rows));
}

ThetaTable build_theta_table(int m, std::span<const double> p_grid, int reps, std::uint64_t seed, int workers) {
  check_side(m);
  check_reps(reps);
  detail::require(!p_grid.empty(), "p grid must not be empty");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    detail::require_probability(p_grid[i], "p grid entry");
    if (i > 0 && !(p_grid[i] > p_grid[i - 1])) throw InvalidArgument("p grid must be strictly ascending");
  }
  const auto r = static_cast<std::size_t>(reps);
  const double area = static_cast<double>(m) * m;
  std::vector<double> fractions(p_grid.size() * r);
  parallel_for(fractions.size(), workers, [&](std::size_t i, int) {
    const double p = p_grid[i / r];
    const PercField f = sample_field(m, p, rep_seed(seed, p, static_cast<int>(i % r)));
    fractions[i] = static_cast<double>(largest_sizes(f).first) / area;
  });

  std::vector<ThetaRow> rows;
  rows.reserve(p_grid.size());
  for (std::size_t g = 0; g < p_grid.size(); ++g) {
    const std::vector<double> slice(fractions.begin() + static_cast<std::ptrdiff_t>(g * r),
                                    fractions.begin() + static_cast<std::ptrdiff_t>((g + 1) * r));
    const SampleEstimate e = summarize(slice, p_grid[g]);
    ThetaRow row;
    row.p = p_grid[g];
    row.theta = e.mean;
    row.theta_stderr = e.stderr;
    row.theta_plus = p_grid[g] > 0.0 ? std::min(1.0, e.mean / p_grid[g]) : 0.0;
    row.m = m;
    row.reps = reps;
    row.seed = seed;
    rows.push_back(row);
  }
  return ThetaTable(std::move(rows));
}

std::string theta_cache_name(int m, int reps, std::uint64_t seed, std::span<const double> p_grid) {
  // FNV-1a over the exact bit patterns of the grid.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (double p : p_grid) {
    const auto bits = std::bit_cast<std::uint64_t>(p);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFFU;
      h *= 0x100000001B3ULL;
    }
  }
  char hex[17];
  const auto res = std::to_chars(hex, hex + 16, h, 16);
  const std::string digits(hex, res.ptr);
  return "theta_m" + std::to_string(m) + "_r" + std::to_string(reps) + "_s" + std::to_string(seed) + "_g" +
         std::string(16 - digits.size(), '0') + digits + ".csv";
}

}  // namespace pfwd
