#include <gtest/gtest.h>

#include <algorithm>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "pfwd/error.hpp"
#include "pfwd/percolation.hpp"

using namespace pfwd;

namespace {

// Flood fill, ids assigned in row-major order of each cluster's first site.
std::vector<std::int32_t> flood_labels(const PercField& f) {
  const int m = f.m;
  std::vector<std::int32_t> label(f.open.size(), -1);
  std::int32_t next = 0;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const std::size_t s = f.site(r, c);
      if (!f.open[s] || label[s] != -1) continue;
      std::queue<std::pair<int, int>> q;
      q.emplace(r, c);
      label[s] = next;
      while (!q.empty()) {
        const auto [y, x] = q.front();
        q.pop();
        const int dy[] = {-1, 1, 0, 0};
        const int dx[] = {0, 0, -1, 1};
        for (int d = 0; d < 4; ++d) {
          const int ny = y + dy[d];
          const int nx = x + dx[d];
          if (ny < 0 || nx < 0 || ny >= m || nx >= m) continue;
          const std::size_t t = f.site(ny, nx);
          if (f.open[t] && label[t] == -1) {
            label[t] = next;
            q.emplace(ny, nx);
          }
        }
      }
      ++next;
    }
  }
  return label;
}

}  // namespace

TEST(Percolation, SampleFieldIsSeededBernoulli) {
  const PercField a = sample_field(51, 0.6, 9);
  const PercField b = sample_field(51, 0.6, 9);
  EXPECT_EQ(a.open, b.open);
  EXPECT_EQ(a.open.size(), 51u * 51u);
  const double frac = static_cast<double>(std::count(a.open.begin(), a.open.end(), 1)) / (51.0 * 51.0);
  EXPECT_NEAR(frac, 0.6, 4 * std::sqrt(0.24 / 2601.0));
  const PercField none = sample_field(11, 0.0, 1);
  EXPECT_EQ(std::count(none.open.begin(), none.open.end(), 1), 0);
  const PercField all = sample_field(11, 1.0, 1);
  EXPECT_EQ(std::count(all.open.begin(), all.open.end(), 1), 121);
}

TEST(Percolation, LabelsMatchFloodFill) {
  for (double p : {0.3, 0.55, 0.6, 0.75}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const PercField f = sample_field(41, p, seed);
      const ClusterLabels got = label_clusters(f);
      const std::vector<std::int32_t> want = flood_labels(f);
      EXPECT_EQ(got.label, want);
      std::vector<std::int64_t> sizes(static_cast<std::size_t>(got.cluster_count()), 0);
      for (auto l : want) {
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
      }
      EXPECT_EQ(got.sizes, sizes);
      if (!sizes.empty()) {
        const auto it = std::max_element(sizes.begin(), sizes.end());
        EXPECT_EQ(got.largest(), static_cast<int>(it - sizes.begin()));
      }
    }
  }
}

TEST(Percolation, ExtendedClusterAddsClosedBoundary) {
  // 3x3: open cross in the middle column.
  const PercField f = make_field(3, {0, 1, 0, 0, 1, 0, 0, 1, 0});
  const ClusterLabels l = label_clusters(f);
  ASSERT_EQ(l.cluster_count(), 1);
  const std::vector<std::size_t> ext = extended_cluster(f, l, 0);
  EXPECT_EQ(ext.size(), 9u);
  const PercField g = make_field(3, {1, 0, 0, 0, 0, 0, 0, 0, 1});
  const ClusterLabels lg = label_clusters(g);
  EXPECT_EQ(lg.cluster_count(), 2);
  EXPECT_EQ(extended_cluster(g, lg, 0), (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(extended_cluster(g, lg, 1), (std::vector<std::size_t>{5, 7, 8}));
  EXPECT_EQ(label_clusters(make_field(3, std::vector<std::uint8_t>(9, 0))).largest(), -1);
  EXPECT_THROW(make_field(4, std::vector<std::uint8_t>(16, 0)), InvalidArgument);
}

TEST(Percolation, UnionFindBasics) {
  UnionFind uf(6);
  uf.unite(0, 1);
  uf.unite(2, 3);
  uf.unite(1, 3);
  EXPECT_EQ(uf.find(0), uf.find(2));
  EXPECT_NE(uf.find(0), uf.find(4));
  EXPECT_EQ(uf.size_of(3), 4u);
  EXPECT_EQ(uf.size_of(5), 1u);
}

TEST(Percolation, ThetaExtremes) {
  const SampleEstimate one = estimate_theta(21, 1.0, 3, 1);
  EXPECT_EQ(one.mean, 1.0);
  EXPECT_EQ(one.stderr, 0.0);
  EXPECT_FALSE(one.subcritical);
  const SampleEstimate zero = estimate_theta(21, 0.0, 3, 1);
  EXPECT_EQ(zero.mean, 0.0);
  EXPECT_TRUE(zero.subcritical);
  EXPECT_THROW(estimate_theta(21, 0.5, 1, 1), InvalidArgument);
  EXPECT_THROW(estimate_theta(20, 0.5, 3, 1), InvalidArgument);
}

TEST(Percolation, ThetaIsDeterministicAcrossWorkers) {
  const SampleEstimate a = estimate_theta(61, 0.7, 6, 5, 1);
  const SampleEstimate b = estimate_theta(61, 0.7, 6, 5, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stderr, b.stderr);
}

TEST(Percolation, ThetaPlusMethodsBracketTheta) {
  const SampleEstimate th = estimate_theta(61, 0.8, 6, 2);
  const SampleEstimate ratio = estimate_theta_plus(61, 0.8, 6, 2, ThetaPlusMethod::ratio);
  const SampleEstimate direct = estimate_theta_plus(61, 0.8, 6, 2, ThetaPlusMethod::direct);
  EXPECT_DOUBLE_EQ(ratio.mean, th.mean / 0.8);
  EXPECT_GE(direct.mean, th.mean);
  EXPECT_LE(direct.mean, 1.0);
  EXPECT_EQ(estimate_theta_plus(21, 1.0, 2, 1, ThetaPlusMethod::direct).mean, 1.0);
}

TEST(Percolation, ConditionedDensityAtFullOccupancy) {
  EXPECT_EQ(conditioned_origin_density(21, 1.0, 2, 1).mean, 1.0);
  // Only the forced centre is open.
  EXPECT_THROW(conditioned_origin_density(21, 0.0, 2, 1), InvalidArgument);
  const SampleEstimate tiny = conditioned_origin_density(21, 1e-12, 2, 1);
  EXPECT_DOUBLE_EQ(tiny.mean, 1.0 / 441.0);
}

TEST(Percolation, IsotonicRegression) {
  const std::vector<double> in{1, 3, 2, 4, 3.5, 5};
  const std::vector<double> out = isotonic_regression(in);
  const std::vector<double> want{1, 2.5, 2.5, 3.75, 3.75, 5};
  ASSERT_EQ(out.size(), want.size());
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_DOUBLE_EQ(out[i], want[i]);
  const std::vector<double> mono{0.1, 0.2, 0.2, 0.9};
  EXPECT_EQ(isotonic_regression(mono), mono);
  const std::vector<double> down{3, 2, 1};
  EXPECT_EQ(isotonic_regression(down), (std::vector<double>{2, 2, 2}));
}

TEST(Percolation, IsotonicRegressionProperties) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v(30);
    for (double& x : v) x = u(rng);
    const std::vector<double> out = isotonic_regression(v);
    EXPECT_TRUE(std::is_sorted(out.begin(), out.end()));
    double s_in = 0, s_out = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      s_in += v[i];
      s_out += out[i];
    }
    EXPECT_NEAR(s_in, s_out, 1e-12);
  }
}

TEST(Percolation, ThetaTableInterpolationAndMonotonicity) {
  std::vector<ThetaRow> rows;
  const double ps[] = {0.6, 0.7, 0.8, 0.9};
  const double th[] = {0.40, 0.65, 0.60, 0.88};
  for (int i = 0; i < 4; ++i) rows.push_back({ps[i], th[i], 0.01, th[i] / ps[i], 11, 2, 3});
  const ThetaTable t(rows);
  EXPECT_TRUE(std::is_sorted(t.monotone_theta().begin(), t.monotone_theta().end()));
  EXPECT_TRUE(std::is_sorted(t.monotone_theta_plus().begin(), t.monotone_theta_plus().end()));
  EXPECT_DOUBLE_EQ(t.theta_at(0.7), 0.625);
  EXPECT_DOUBLE_EQ(t.theta_at(0.75), 0.625);
  EXPECT_DOUBLE_EQ(t.theta_at(0.65), 0.5125);
  EXPECT_DOUBLE_EQ(t.theta_at(0.5), 0.40);
  EXPECT_DOUBLE_EQ(t.theta_at(1.0), 1.0);
  EXPECT_DOUBLE_EQ(t.theta_plus_at(1.0), 1.0);
  EXPECT_DOUBLE_EQ(t.theta_at(0.95), 0.94);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_GE(t.monotone_theta_plus()[i], t.monotone_theta()[i]);
  double prev = 0.0;
  for (double p = 0.5; p <= 1.0; p += 0.01) {
    EXPECT_GE(t.theta_plus_at(p), prev);
    prev = t.theta_plus_at(p);
  }
  EXPECT_THROW(ThetaTable(std::vector<ThetaRow>{}), InvalidArgument);
  std::vector<ThetaRow> bad{rows[1], rows[0]};
  EXPECT_THROW(ThetaTable{bad}, InvalidArgument);
}

TEST(Percolation, ThetaTableCsvRoundTrip) {
  const std::vector<double> grid{0.6, 0.8, 1.0};
  const ThetaTable t = build_theta_table(31, grid, 3, 17);
  std::stringstream buf;
  t.write_csv(buf, "hello\nworld");
  const std::string text = buf.str();
  EXPECT_EQ(text.rfind("# hello\n# world\np,theta,theta_stderr,theta_plus,m,reps,seed\n", 0), 0u);
  const ThetaTable back = ThetaTable::read_csv(buf);
  ASSERT_EQ(back.rows().size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.rows()[i].p, t.rows()[i].p);
    EXPECT_EQ(back.rows()[i].theta, t.rows()[i].theta);
    EXPECT_EQ(back.rows()[i].theta_stderr, t.rows()[i].theta_stderr);
    EXPECT_EQ(back.rows()[i].seed, 17u);
  }
  EXPECT_EQ(t.rows()[2].theta, 1.0);
  std::stringstream again;
  back.write_csv(again, "hello\nworld");
  EXPECT_EQ(again.str(), text);
  std::stringstream junk("p,theta\n0.5,x\n");
  EXPECT_THROW(ThetaTable::read_csv(junk), IoError);
}

TEST(Percolation, TableRowsEqualPointEstimates) {
  const std::vector<double> grid{0.65, 0.75};
  const ThetaTable t = build_theta_table(41, grid, 4, 23, 2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SampleEstimate e = estimate_theta(41, grid[i], 4, 23);
    EXPECT_EQ(t.rows()[i].theta, e.mean);
    EXPECT_EQ(t.rows()[i].theta_stderr, e.stderr);
  }
}

TEST(Percolation, CacheNameEncodesConfig) {
  const std::vector<double> a{0.6, 0.7};
  const std::vector<double> b{0.6, 0.71};
  const std::string na = theta_cache_name(501, 20, 7, a);
  EXPECT_EQ(na.rfind("theta_m501_r20_s7_g", 0), 0u);
  EXPECT_EQ(na.size(), std::string("theta_m501_r20_s7_g").size() + 16 + 4);
  EXPECT_NE(na, theta_cache_name(501, 20, 7, b));
  EXPECT_EQ(na, theta_cache_name(501, 20, 7, a));
}

TEST(Percolation, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 0.593, 1e-300, 12345.678}) EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_EQ(format_double(0.5), "0.5");
}
