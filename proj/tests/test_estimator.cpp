#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "pfwd/binom.hpp"
#include "pfwd/error.hpp"
#include "pfwd/estimator.hpp"
#include "pfwd/graph.hpp"
#include "pfwd/protocol.hpp"
#include "pfwd/tree_analysis.hpp"

using namespace pfwd;

namespace {

Graph path3() {
  const std::vector<std::pair<VertexId, VertexId>> e{{0, 1}, {1, 2}};
  return Graph::from_edges(3, e, 0);
}

Graph star5() {
  const std::vector<std::pair<VertexId, VertexId>> e{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
  return Graph::from_edges(5, e, 0);
}

// Second oracle: sum over connected forwarder sets S containing the source,
// P(S) = p^{|S|-1} (1-p)^{|forwarding-capable boundary of S|}.
ExactMoments forwarder_set_oracle(const Graph& g, int k, int n, double p, bool leaves_mute) {
  const VertexId nv = g.vertex_count();
  const VertexId s = g.source();
  const std::vector<char> mute = mute_mask(g, ForwardingOptions{leaves_mute});
  std::vector<double> q(nv, 0.0);
  double mean_size = 0.0;
  for (std::uint32_t set = 0; set < (1U << nv); ++set) {
    if (!((set >> s) & 1U)) continue;
    bool valid = true;
    for (VertexId v = 0; v < nv; ++v) {
      if (((set >> v) & 1U) && v != s && mute[v]) valid = false;
    }
    if (!valid) continue;
    // Connectivity of S from the source.
    std::uint32_t seen = 1U << s;
    for (bool grew = true; grew;) {
      grew = false;
      for (VertexId v = 0; v < nv; ++v) {
        if (!((seen >> v) & 1U)) continue;
        for (VertexId w : g.neighbors(v)) {
          if (((set >> w) & 1U) && !((seen >> w) & 1U)) {
            seen |= 1U << w;
            grew = true;
          }
        }
      }
    }
    if (seen != set) continue;
    int size = 0;
    int boundary = 0;
    std::uint32_t hears = set;
    for (VertexId v = 0; v < nv; ++v) {
      if ((set >> v) & 1U) {
        ++size;
        for (VertexId w : g.neighbors(v)) hears |= 1U << w;
      }
    }
    for (VertexId v = 0; v < nv; ++v) {
      if (((hears >> v) & 1U) && !((set >> v) & 1U) && !mute[v]) ++boundary;
    }
    const double prob = std::pow(p, size - 1) * std::pow(1.0 - p, boundary);
    mean_size += prob * size;
    for (VertexId v = 0; v < nv; ++v) {
      if ((hears >> v) & 1U) q[v] += prob;
    }
  }
  ExactMoments out;
  out.expected_receivers = 1.0;
  for (VertexId v = 0; v < nv; ++v) {
    if (v != s) out.expected_receivers += binom_tail(n, std::min(1.0, q[v]), k);
  }
  out.expected_transmissions = n * mean_size;
  return out;
}

}  // namespace

TEST(Exact, PathClosedForm) {
  for (double p : {0.0, 0.3, 0.7, 1.0}) {
    for (int n : {1, 3}) {
      const ExactMoments e = exact_small_graph(path3(), 1, n, p);
      EXPECT_NEAR(e.expected_transmissions, n * (1 + p + p * p), 1e-14);
      if (n == 1) EXPECT_NEAR(e.expected_receivers, 2 + p, 1e-14);
    }
  }
}

TEST(Exact, AgreesWithForwarderSetOracle) {
  const Graph graphs[] = {build_grid(3), path3(), star5(), build_tree(2, 3), build_rgg(12, 4.0, 1.6, 5)};
  for (const Graph& g : graphs) {
    const bool mute = default_forwarding(g).leaves_mute;
    for (int n : {1, 2, 3, 5}) {
      for (int k = 1; k <= std::min(n, 3); ++k) {
        for (double p : {0.0, 0.3, 0.6, 0.9, 1.0}) {
          const ExactMoments a = exact_small_graph(g, k, n, p);
          const ExactMoments b = forwarder_set_oracle(g, k, n, p, mute);
          EXPECT_NEAR(a.expected_receivers, b.expected_receivers, 1e-12) << describe(g.kind()) << ' ' << n << k << p;
          EXPECT_NEAR(a.expected_transmissions, b.expected_transmissions, 1e-12) << describe(g.kind());
        }
      }
    }
  }
}

TEST(Exact, LeavesMuteOverride) {
  const Graph g = build_tree(2, 2);
  EstimatorOptions talk;
  talk.leaves_mute = false;
  EXPECT_NEAR(exact_small_graph(g, 1, 1, 1.0).expected_transmissions, 3.0, 1e-15);
  EXPECT_NEAR(exact_small_graph(g, 1, 1, 1.0, talk).expected_transmissions, 7.0, 1e-15);
  EXPECT_NEAR(exact_small_graph(g, 1, 1, 0.5, talk).expected_transmissions,
              forwarder_set_oracle(g, 1, 1, 0.5, false).expected_transmissions, 1e-15);
}

TEST(Exact, FullForwarding) {
  const Graph g = build_grid(3);
  const ExactMoments e = exact_small_graph(g, 2, 4, 1.0);
  EXPECT_DOUBLE_EQ(e.expected_receivers, 9.0);
  EXPECT_DOUBLE_EQ(e.expected_transmissions, 36.0);
}

TEST(Exact, SizeCap) {
  EXPECT_THROW(exact_small_graph(build_grid(5), 1, 1, 0.5), TooLarge);
  EXPECT_THROW(exact_small_graph(build_grid(3), 3, 2, 0.5), InvalidArgument);
}

TEST(MonteCarlo, FractionExtremes) {
  const Graph g = build_grid(9);
  const McEstimate all = mc_expected_fraction(g, 3, 4, 1.0, 20, 1);
  EXPECT_EQ(all.mean, 1.0);
  EXPECT_EQ(all.stderr, 0.0);
  EXPECT_EQ(all.trials, 20);
  EXPECT_EQ(all.seed, 1u);
  const McEstimate none = mc_expected_fraction(g, 3, 4, 0.0, 20, 1);
  EXPECT_DOUBLE_EQ(none.mean, 5.0 / 81.0);
  EXPECT_EQ(none.stderr, 0.0);
  EXPECT_THROW(mc_expected_fraction(g, 3, 4, 0.5, 1, 1), InvalidArgument);
}

TEST(MonteCarlo, TauExtremesAndCeiling) {
  const Graph g = build_grid(9);
  const McEstimate t0 = mc_tau(g, 2, 6, 0.0, 10, 3);
  EXPECT_EQ(t0.mean, 6.0);
  EXPECT_EQ(t0.stderr, 0.0);
  const McEstimate t = mc_tau(g, 2, 6, 0.4, 400, 3);
  EXPECT_LE(t.mean, 6 * (1 + 80 * 0.4) + 3 * t.stderr);
}

TEST(MonteCarlo, Grid3AgreesWithExact) {
  const Graph g = build_grid(3);
  const ExactMoments e = exact_small_graph(g, 1, 2, 0.6);
  const McEstimate f = mc_expected_fraction(g, 1, 2, 0.6, 20000, 11);
  EXPECT_NEAR(f.mean, e.expected_receivers / 9.0, 3 * f.stderr);
  const McEstimate t = mc_tau(g, 1, 2, 0.6, 20000, 12);
  EXPECT_NEAR(t.mean, e.expected_transmissions, 3 * t.stderr);
}

TEST(MonteCarlo, TreeTauAgreesWithClosedForm) {
  const Graph g = build_tree(2, 10);
  const McEstimate t = mc_tau(g, 5, 10, 0.8, 2000, 21);
  EXPECT_NEAR(t.mean, tree_expected_transmissions({2, 10, 5, 10, 0.1}, 0.8), 3 * t.stderr);
}

TEST(MonteCarlo, DeterministicAcrossWorkers) {
  const Graph g = build_grid(15);
  EstimatorOptions one, many;
  one.workers = 1;
  many.workers = 4;
  const McEstimate a = mc_expected_fraction(g, 2, 3, 0.6, 50, 9, one);
  const McEstimate b = mc_expected_fraction(g, 2, 3, 0.6, 50, 9, many);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stderr, b.stderr);
  const std::vector<int> ns{2, 4, 6};
  const auto sa = sweep_n(g, 2, 0.1, ns, 40, 9, one, 1e-3);
  const auto sb = sweep_n(g, 2, 0.1, ns, 40, 9, many, 1e-3);
  ASSERT_EQ(sa.size(), sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) {
    EXPECT_EQ(sa[i].p_min, sb[i].p_min);
    EXPECT_EQ(sa[i].p_min_ci, sb[i].p_min_ci);
    EXPECT_EQ(sa[i].tau, sb[i].tau);
    EXPECT_EQ(sa[i].tau_stderr, sb[i].tau_stderr);
  }
}

TEST(Pmin, CrossingIsTightOnTheSharedFields) {
  const Graph g = build_grid(11);
  for (double tol : {1e-2, 1e-3, 1e-4}) {
    for (int n : {3, 6}) {
      const long long trials = 60;
      const PminEstimate pm = mc_pmin(g, 3, n, 0.2, trials, tol, 5);
      EXPECT_GE(mc_expected_fraction(g, 3, n, pm.p_min, trials, 5).mean, 0.8 - 1e-12);
      const double below = pm.p_min - 1.0 / std::ceil(1.0 / tol - 1e-9);
      EXPECT_LT(mc_expected_fraction(g, 3, n, below, trials, 5).mean, 0.8);
      EXPECT_GE(pm.ci_half_width, 0.0);
      EXPECT_GT(pm.fraction_stderr, 0.0);
    }
  }
}

TEST(Pmin, VacuousTargetGivesZero) {
  const Graph g = build_grid(5);
  EXPECT_EQ(mc_pmin(g, 1, 1, 1.0 - 1e-9, 10, 1e-3, 1).p_min, 0.0);
  EXPECT_EQ(mc_pmin(g, 1, 1, 0.81, 10, 1e-3, 1).p_min, 0.0);  // 5 of 25 hear at p = 0
}

TEST(Pmin, Errors) {
  const Graph g = build_grid(5);
  EXPECT_THROW(mc_pmin(g, 3, 2, 0.1, 10, 1e-3, 1), NoSolution);
  EXPECT_THROW(mc_pmin(g, 1, 2, 0.0, 10, 1e-3, 1), InvalidArgument);
  EXPECT_THROW(mc_pmin(g, 1, 2, 1.0, 10, 1e-3, 1), InvalidArgument);
  EXPECT_THROW(mc_pmin(g, 1, 2, 0.1, 10, 1e-5, 1), InvalidArgument);
  EXPECT_THROW(mc_pmin(g, 1, 2, 0.1, 1, 1e-3, 1), InvalidArgument);
  const std::vector<std::pair<VertexId, VertexId>> e{{0, 1}, {2, 3}};
  const Graph split = Graph::from_edges(4, e, 0);
  EXPECT_THROW(mc_pmin(split, 1, 2, 0.1, 10, 1e-3, 1), NoSolution);
  const std::vector<int> bad{3, 2};
  EXPECT_THROW(mc_pmin_sweep(g, 1, 0.1, bad, 10, 1e-3, 1), InvalidArgument);
}

TEST(Pmin, SweepIsNonincreasingAndMatchesSinglePoints) {
  const Graph g = build_grid(15);
  std::vector<int> ns;
  for (int n = 4; n <= 16; n += 2) ns.push_back(n);
  const auto sweep = mc_pmin_sweep(g, 4, 0.1, ns, 40, 1e-4, 13);
  for (std::size_t i = 1; i < sweep.size(); ++i) EXPECT_LE(sweep[i].p_min, sweep[i - 1].p_min);
  for (std::size_t i = 0; i < sweep.size(); i += 3) {
    const PminEstimate single = mc_pmin(g, 4, ns[i], 0.1, 40, 1e-4, 13);
    EXPECT_EQ(single.p_min, sweep[i].p_min);
    EXPECT_EQ(single.ci_half_width, sweep[i].ci_half_width);
  }
}

TEST(Sweep, FirstPointIsUncodedProtocol) {
  const Graph g = build_grid(11);
  const std::vector<int> ns{5, 7, 9};
  const auto curve = sweep_n(g, 5, 0.1, ns, 40, 3, {}, 1e-3);
  const PminEstimate uncoded = mc_pmin(g, 5, 5, 0.1, 40, 1e-3, 3);
  EXPECT_EQ(curve.front().n, 5);
  EXPECT_EQ(curve.front().p_min, uncoded.p_min);
  for (const CurvePoint& c : curve) {
    EXPECT_GE(c.p_min, 0.0);
    EXPECT_LE(c.p_min, 1.0);
    EXPECT_GE(c.tau_stderr, 0.0);
    EXPECT_GE(c.tau, c.n);
  }
  const std::vector<int> low{4, 6};
  EXPECT_THROW(sweep_n(g, 5, 0.1, low, 10, 1), NoSolution);
}

TEST(Sweep, CsvLayout) {
  const std::vector<CurvePoint> pts{{10, 0.5, 0.01, 120.0, 2.5}, {12, 0.25, 0.0, 100.0, 0.0}};
  std::ostringstream out;
  write_curve_csv(out, pts, "run a");
  EXPECT_EQ(out.str(), "# run a\nn,p_min,p_min_ci,tau,tau_stderr\n10,0.5,0.01,120,2.5\n12,0.25,0,100,0\n");
}

TEST(Sweep, TrialSeedsAreDistinct) {
  EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
  EXPECT_NE(trial_seed(1, 0), trial_seed(2, 0));
  EXPECT_EQ(trial_seed(7, 3), trial_seed(7, 3));
}
