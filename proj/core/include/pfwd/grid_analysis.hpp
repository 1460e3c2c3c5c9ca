#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "pfwd/estimator.hpp"
#include "pfwd/percolation.hpp"

namespace pfwd {

inline constexpr double kDefaultPFloor = 0.593;

struct GridLimitSpec {
  int k = 1;
  int n = 1;
  double delta = 0.1;
  const ThetaTable* theta = nullptr;
  double p_floor = kDefaultPFloor;
};

/// P(Bin(n, theta_plus) >= k): probability the origin collects k of n packets.
double theta_plus_kn(int k, int n, double theta_plus);

/// Limiting mean receiver fraction on large grids, P(Y >= k) with
/// Y ~ Bin(n, theta_plus^2).
double grid_limit_receiver_fraction(int k, int n, double theta_plus);

/// The same limit written as a double sum over (t, j), evaluated term by term
/// in log space.
double grid_limit_double_sum(int k, int n, double theta_plus);

struct GridPmin {
  double p = 1.0;
  // True when the constraint already holds at p_floor and p was clamped there.
  bool clamped = false;
};

/// inf{p in [p_floor, 1] : P(Y >= k) >= 1 - delta} by bisection to 1e-4.
GridPmin grid_pmin(const GridLimitSpec& spec);

struct GridTau {
  double value = 0.0;
  double p = 0.0;
  bool unreliable = false;
};

/// n * theta(p*)^2 / p* at p* = grid_pmin(spec); transmissions per vertex.
GridTau grid_tau_normalized(const GridLimitSpec& spec);

struct GridCurvePoint {
  int n = 0;
  double p_min = 0.0;
  double tau_normalized = 0.0;
  bool clamped = false;
};

std::vector<GridCurvePoint> grid_curve(const GridLimitSpec& base, std::span<const int> n_values);

/// Header "n,p_min,tau_normalized,clamped_flag".
void write_grid_curve_csv(std::ostream& out, std::span<const GridCurvePoint> points, std::string_view comment = {});

struct GapResult {
  double gap = 0.0;
  double mc_p_min = 0.0;
  double limit_p_min = 0.0;
  double ci_half_width = 0.0;
  bool limit_clamped = false;
  // delta >= 1/8: outside the regime where the gap is expected to be >= 0.
  bool outside_regime = false;
};

/// Monte Carlo p_min on the m x m grid minus the large-grid limit value.
GapResult conjecture1_gap(int k, int n, double delta, int m, long long trials, std::uint64_t seed,
                          const ThetaTable& theta, const EstimatorOptions& options = {}, double tol = 1e-4);

}  // namespace pfwd
