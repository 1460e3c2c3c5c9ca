#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pfwd/graph.hpp"
#include "pfwd/protocol.hpp"

namespace pfwd {

struct EstimatorOptions {
  int workers = 1;
  // Overrides default_forwarding(g) when set.
  std::optional<bool> leaves_mute;

  ForwardingOptions forwarding(const Graph& g) const;
};

struct McEstimate {
  double mean = 0.0;
  double stderr = 0.0;
  long long trials = 0;
  std::uint64_t seed = 0;
};

struct ExactMoments {
  double expected_receivers = 0.0;
  double expected_transmissions = 0.0;
};

struct PminEstimate {
  int n = 0;
  double p_min = 0.0;
  double ci_half_width = 0.0;
  // Standard error of the trial-mean receiver fraction at p_min.
  double fraction_stderr = 0.0;
};

struct CurvePoint {
  int n = 0;
  double p_min = 0.0;
  double p_min_ci = 0.0;
  double tau = 0.0;
  double tau_stderr = 0.0;
};

/// Seed of trial t under master seed `seed`; trial t runs on
/// ThresholdField::from_seed(trial_seed(seed, t), ...).
std::uint64_t trial_seed(std::uint64_t seed, long long trial);

/// Sample mean and standard error of R_{k,n} / N.
McEstimate mc_expected_fraction(const Graph& g, int k, int n, double p, long long trials, std::uint64_t seed,
                                 const EstimatorOptions& options = {});

/// Sample mean and standard error of the total transmission count T.
McEstimate mc_tau(const Graph& g, int k, int n, double p, long long trials, std::uint64_t seed,
                  const EstimatorOptions& options = {});

/// Exact E[R_{k,n}] and E[T] by enumerating every forwarding pattern of the
/// non-source vertices once. Throws TooLarge above 21 vertices.
ExactMoments exact_small_graph(const Graph& g, int k, int n, double p, const EstimatorOptions& options = {});

inline constexpr int kExactVertexCap = 21;

/// Smallest p whose empirical mean receiver fraction reaches 1 - delta.
///
/// All trials share one threshold field per trial, so the empirical curve is
/// a nondecreasing step function of p. Its crossing point is located exactly
/// up to a bin width of at most `tol` (the returned value is the bin's upper
/// edge, which always satisfies the constraint, or 0 when p = 0 already does). The CI half-width inverts the
/// curve at 1 - delta -/+ 1.96 standard errors of the trial mean.
PminEstimate mc_pmin(const Graph& g, int k, int n, double delta, long long trials, double tol, std::uint64_t seed,
                     const EstimatorOptions& options = {});

/// mc_pmin for several n on the same fields; the result is nonincreasing in n.
std::vector<PminEstimate> mc_pmin_sweep(const Graph& g, int k, double delta, std::span<const int> n_values,
                                        long long trials, double tol, std::uint64_t seed,
                                        const EstimatorOptions& options = {});

/// p_min per n (shared fields), then tau at p_min with fresh seeds. tau_stderr
/// folds in the p uncertainty by re-evaluating tau at p_min -/+ ci.
std::vector<CurvePoint> sweep_n(const Graph& g, int k, double delta, std::span<const int> n_values,
                                long long trials, std::uint64_t seed, const EstimatorOptions& options = {},
                                double tol = 1e-4);

/// Header "n,p_min,p_min_ci,tau,tau_stderr"; comment lines are prefixed with '#'.
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> points, std::string_view comment = {});

}  // namespace pfwd
