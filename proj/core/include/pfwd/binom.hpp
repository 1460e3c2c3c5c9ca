#pragma once

// Binomial distribution numerics and the Zubkov-Serov normal-approximation
// sandwich for the binomial CDF.

namespace pfwd {

/// P(X = x) for X ~ Bin(n, p), via Loader's saddle-point expansion
/// (accurate to a few ulps in relative terms, no lgamma cancellation).
double binom_pmf(long long n, double p, long long x);

/// P(X <= k). Clamped: k < 0 gives 0 and k >= n gives 1. The smaller tail
/// is summed directly and complemented when needed; absolute error is below
/// 1e-12 for n <= 1e5.
double binom_cdf(long long n, double p, long long k);

/// P(X >= k). k <= 0 gives 1, k > n gives 0.
double binom_tail(long long n, double p, long long k);

/// Bernoulli KL divergence D(x || y) with 0 ln 0 = 0; +inf when y sits on
/// {0,1} and x does not agree with it.
double kl_bern(double x, double y);

/// Standard normal CDF, 0.5 * erfc(-x / sqrt 2).
double std_normal_cdf(double x);

/// C_{n,p}(k): (1-p)^n at k = 0, 1 - p^n at k = n, otherwise
/// Phi(sgn(k/n - p) * sqrt(2 n D(k/n || p))). Requires p in (0,1).
double zubkov_C(long long n, double p, long long k);

/// True iff C(k) <= P(X <= k) <= C(k+1), each side with 1e-12 slack.
bool sandwich_check(long long n, double p, long long k);

}  // namespace pfwd
