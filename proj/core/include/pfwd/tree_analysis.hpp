#pragma once

#include <utility>

namespace pfwd {

/// Coding and topology parameters for a rooted complete d-ary tree of height H.
struct TreeSpec {
  int arity = 2;
  int height = 2;
  int k = 1;
  int n = 1;
  double delta = 0.1;
};

/// Number of vertices, (d^{H+1} - 1) / (d - 1).
double tree_vertex_count(const TreeSpec& spec);

/// E[R_{k,n}] = 1 + sum_{l=1}^{H} d^l P(Bin(n, p^{l-1}) >= k).
double tree_expected_receivers(const TreeSpec& spec, double p);

/// E[T] = n ((dp)^H - 1) / (dp - 1), with the limit n H at dp = 1. Leaves are mute.
double tree_expected_transmissions(const TreeSpec& spec, double p);

/// Fraction of vertices expected to miss the broadcast at p:
/// sum_{l=0}^{H-1} d^{l+1} P(Bin(n, p^l) <= k-1) / N. Strictly decreasing in p.
double tree_failure_fraction(const TreeSpec& spec, double p);

/// Smallest p with tree_failure_fraction <= delta, by bisection on [0,1] to 1e-6.
double tree_pmin(const TreeSpec& spec);

/// Expected transmissions at tree_pmin.
double tree_tau(const TreeSpec& spec);

/// Lower bound ((k-1)/n)^{1/(H-1)}, or (1/n)^{1/(H-1)} when k = 1.
/// Throws InapplicableBound for delta >= 1/8. The d > 2 variant reuses the
/// binary formula and has not been validated.
double tree_pmin_lower_prop1(const TreeSpec& spec);

/// Upper bound min{((k-1+t)/n)^{1/(H-1)}, 1} with the Chernoff slack t, or
/// min{(-ln delta'/n)^{1/(H-1)}, 1} when k = 1.
double tree_pmin_upper_prop2(const TreeSpec& spec);

/// (lower, upper) obtained by replacing the binomial CDF in the failure
/// fraction with the normal-approximation sandwich C_{n,q}(k-1) / C_{n,q}(k).
std::pair<double, double> tree_pmin_bounds_zubkov(const TreeSpec& spec);

}  // namespace pfwd
