#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pfwd/binom.hpp"
#include "pfwd/error.hpp"
#include "pfwd/grid_analysis.hpp"

using namespace pfwd;

namespace {

// Smooth stand-in for the percolation curve: theta rises steeply above 0.59.
ThetaTable synthetic_table() {
  std::vector<ThetaRow> rows;
  for (int i = 0; i <= 81; ++i) {
    const double p = std::round((0.593 + 0.005 * i) * 1e9) / 1e9;
    const double theta = p * std::pow((p - 0.59) / 0.41, 0.12);
    rows.push_back({p, theta, 0.0, theta / p, 0, 0, 0});
  }
  return ThetaTable(rows);
}

}  // namespace

TEST(GridLimit, ThetaPlusKn) {
  EXPECT_EQ(theta_plus_kn(3, 7, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(theta_plus_kn(1, 1, 0.37), 0.37);
  EXPECT_NEAR(theta_plus_kn(2, 3, 0.5), 0.5, 1e-15);
  EXPECT_THROW(theta_plus_kn(4, 3, 0.5), InvalidArgument);
  EXPECT_THROW(theta_plus_kn(1, 3, 1.5), InvalidArgument);
}

TEST(GridLimit, ReceiverFractionEndpoints) {
  for (int n = 1; n <= 6; ++n) {
    for (int k = 1; k <= n; ++k) {
      EXPECT_EQ(grid_limit_receiver_fraction(k, n, 1.0), 1.0);
      EXPECT_EQ(grid_limit_receiver_fraction(k, n, 0.0), 0.0);
    }
  }
}

TEST(GridLimit, DoubleSumSpecialCases) {
  EXPECT_NEAR(grid_limit_double_sum(1, 1, 0.6), 0.36, 1e-15);
  for (int n : {1, 4, 9}) {
    EXPECT_NEAR(grid_limit_double_sum(n, n, 0.7), std::pow(0.7, 2 * n), 1e-14);
    EXPECT_NEAR(grid_limit_double_sum(1, n, 1.0), 1.0, 1e-12);
    EXPECT_EQ(grid_limit_double_sum(1, n, 0.0), 0.0);
  }
}

TEST(GridLimit, DoubleSumIdentity) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const int n = std::uniform_int_distribution<int>(1, 100)(rng);
    const int k = std::uniform_int_distribution<int>(1, n)(rng);
    const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    EXPECT_NEAR(grid_limit_double_sum(k, n, t), grid_limit_receiver_fraction(k, n, t), 1e-10) << k << ' ' << n << ' ' << t;
  }
  for (int step = 0; step <= 10; ++step) {
    const double t = step / 10.0;
    for (int n = 1; n <= 200; n += 13) {
      for (int k = 1; k <= n; k += 7) {
        EXPECT_NEAR(grid_limit_double_sum(k, n, t), grid_limit_receiver_fraction(k, n, t), 1e-10);
      }
    }
  }
}

TEST(GridLimit, ReceiverFractionMonotonicity) {
  for (int n = 1; n <= 30; ++n) {
    for (int k = 1; k <= n; ++k) {
      double prev = -1.0;
      for (int s = 0; s <= 50; ++s) {
        const double v = grid_limit_receiver_fraction(k, n, s / 50.0);
        EXPECT_GE(v, prev - 1e-15);
        prev = v;
        if (n < 30) EXPECT_LE(v, grid_limit_receiver_fraction(k, n + 1, s / 50.0) + 1e-15);
        if (k < n) EXPECT_GE(v, grid_limit_receiver_fraction(k + 1, n, s / 50.0) - 1e-15);
      }
    }
  }
}

TEST(GridPmin, SolvesConstraintToTolerance) {
  const ThetaTable table = synthetic_table();
  for (int n : {20, 30, 50}) {
    const GridLimitSpec spec{20, n, 0.1, &table};
    const GridPmin pm = grid_pmin(spec);
    ASSERT_FALSE(pm.clamped);
    EXPECT_GE(grid_limit_receiver_fraction(20, n, table.theta_plus_at(pm.p)), 0.9);
    EXPECT_LT(grid_limit_receiver_fraction(20, n, table.theta_plus_at(pm.p - 1e-4)), 0.9);
  }
}

TEST(GridPmin, NonincreasingInN) {
  const ThetaTable table = synthetic_table();
  double prev = 1.0;
  for (int n = 100; n <= 300; n += 5) {
    const GridPmin pm = grid_pmin({100, n, 0.1, &table});
    EXPECT_LE(pm.p, prev);
    prev = pm.p;
  }
}

TEST(GridPmin, ClampsAtFloor) {
  const ThetaTable table = synthetic_table();
  const GridPmin pm = grid_pmin({2, 5, 1.0 - 1e-9, &table});
  EXPECT_TRUE(pm.clamped);
  EXPECT_EQ(pm.p, kDefaultPFloor);
  const GridTau tau = grid_tau_normalized({2, 5, 1.0 - 1e-9, &table});
  EXPECT_TRUE(tau.unreliable);
}

TEST(GridPmin, Errors) {
  const ThetaTable table = synthetic_table();
  EXPECT_THROW(grid_pmin({5, 4, 0.1, &table}), NoSolution);
  EXPECT_THROW(grid_pmin({1, 4, 0.1, nullptr}), InvalidArgument);
  EXPECT_THROW(grid_pmin({1, 4, 0.0, &table}), InvalidArgument);
  EXPECT_THROW(grid_pmin({1, 4, 0.1, &table, 0.5}), InvalidArgument);
}

TEST(GridTau, FullFloodingLimit) {
  const ThetaTable table = synthetic_table();
  const GridTau tau = grid_tau_normalized({1, 1, 1e-12, &table});
  EXPECT_FALSE(tau.unreliable);
  EXPECT_NEAR(tau.p, 1.0, 1e-4);
  EXPECT_NEAR(tau.value, 1.0, 1e-3);
}

TEST(GridTau, SinglePacketDensity) {
  const ThetaTable table = synthetic_table();
  const GridTau tau = grid_tau_normalized({1, 1, 0.3, &table});
  const double th = table.theta_at(tau.p);
  EXPECT_DOUBLE_EQ(tau.value, th * th / tau.p);
}

TEST(GridCurve, RowsAndCsv) {
  const ThetaTable table = synthetic_table();
  const std::vector<int> ns{10, 20, 30};
  const auto curve = grid_curve({10, 10, 0.1, &table}, ns);
  ASSERT_EQ(curve.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(curve[i].n, ns[i]);
    const GridTau t = grid_tau_normalized({10, ns[i], 0.1, &table});
    EXPECT_EQ(curve[i].p_min, t.p);
    EXPECT_EQ(curve[i].tau_normalized, t.value);
  }
  std::ostringstream out;
  write_grid_curve_csv(out, curve);
  EXPECT_EQ(out.str().rfind("n,p_min,tau_normalized,clamped_flag\n10,", 0), 0u);
}

TEST(Conjecture, GapIsReportedWithFlags) {
  const ThetaTable table = synthetic_table();
  const GapResult r = conjecture1_gap(5, 8, 0.1, 15, 20, 3, table, {}, 1e-3);
  EXPECT_FALSE(r.outside_regime);
  EXPECT_DOUBLE_EQ(r.gap, r.mc_p_min - r.limit_p_min);
  EXPECT_GE(r.ci_half_width, 0.0);
  const GapResult wide = conjecture1_gap(5, 8, 0.2, 15, 20, 3, table, {}, 1e-3);
  EXPECT_TRUE(wide.outside_regime);
}
