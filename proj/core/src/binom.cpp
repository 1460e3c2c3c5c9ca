#include "pfwd/binom.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pfwd/error.hpp"

namespace pfwd {

namespace {

// log(k!) - [(k + 1/2) log k - k + log sqrt(2 pi)] for integer k >= 1.
double stirlerr(long long k) {
  if (k <= 35) {
    const long double kk = static_cast<long double>(k);
    const long double ln_sqrt_2pi = 0.918938533204672741780329736405617639861L;
    return static_cast<double>(std::lgamma(kk + 1.0L) - ((kk + 0.5L) * std::log(kk) - kk + ln_sqrt_2pi));
  }
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  const double n = static_cast<double>(k);
  const double nn = n * n;
  if (k > 500) return (s0 - s1 / nn) / n;
  if (k > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
}

// Deviance term x log(x/np) + np - x, computed without cancellation near x = np.
double bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    if (std::fabs(s) < DBL_MIN) return s;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / static_cast<double>(2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

struct Tails {
  double lower;  // P(X <= k)
  double upper;  // P(X > k)
};

// Both tails at k for 0 <= k < n and p in (0,1).
Tails split_tails(long long n, double p, long long k) {
  const double q = 1.0 - p;
  const double mean = static_cast<double>(n) * p;
  if (static_cast<double>(k) < mean) {
    // Terms decrease moving down from k because k < (n+1)p.
    double term = binom_pmf(n, p, k);
    double sum = term;
    for (long long j = k; j > 0 && term > 0.0; --j) {
      term *= static_cast<double>(j) / static_cast<double>(n - j + 1) * (q / p);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return {sum, 1.0 - sum};
  }
  double term = binom_pmf(n, p, k + 1);
  double sum = term;
  for (long long j = k + 1; j < n && term > 0.0; ++j) {
    term *= static_cast<double>(n - j) / static_cast<double>(j + 1) * (p / q);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return {1.0 - sum, sum};
}

void check_binom_args(long long n, double p) {
  if (n < 0) throw InvalidArgument("binomial trial count must be >= 0, got " + std::to_string(n));
  detail::require_probability(p, "binomial p");
}

}  // namespace

double binom_pmf(long long n, double p, long long x) {
  check_binom_args(n, p);
  if (x < 0 || x > n) return 0.0;
  const double q = 1.0 - p;
  if (p == 0.0) return x == 0 ? 1.0 : 0.0;
  if (q == 0.0) return x == n ? 1.0 : 0.0;
  const double nd = static_cast<double>(n);
  if (x == 0) {
    if (n == 0) return 1.0;
    return std::exp(p < 0.1 ? -bd0(nd, nd * q) - nd * p : nd * std::log(q));
  }
  if (x == n) {
    return std::exp(q < 0.1 ? -bd0(nd, nd * p) - nd * q : nd * std::log(p));
  }
  const double xd = static_cast<double>(x);
  const double lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(xd, nd * p) - bd0(nd - xd, nd * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(xd) + std::log1p(-xd / nd);
  return std::exp(lc - 0.5 * lf);
}

double binom_cdf(long long n, double p, long long k) {
  check_binom_args(n, p);
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  return split_tails(n, p, k).lower;
}

double binom_tail(long long n, double p, long long k) {
  check_binom_args(n, p);
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  return split_tails(n, p, k - 1).upper;
}

double kl_bern(double x, double y) {
  detail::require_probability(x, "kl_bern x");
  detail::require_probability(y, "kl_bern y");
  constexpr double inf = std::numeric_limits<double>::infinity();
  double first = 0.0;
  if (x > 0.0) first = y == 0.0 ? inf : x * std::log(x / y);
  double second = 0.0;
  if (x < 1.0) second = y == 1.0 ? inf : (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
  return first + second;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double zubkov_C(long long n, double p, long long k) {
  if (n < 1) throw InvalidArgument("zubkov_C needs n >= 1");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("zubkov_C requires p in (0,1), got " + std::to_string(p));
  if (k < 0 || k > n) throw InvalidArgument("zubkov_C requires 0 <= k <= n");
  const double nd = static_cast<double>(n);
  if (k == 0) return std::exp(nd * std::log1p(-p));
  if (k == n) return -std::expm1(nd * std::log(p));
  const double x = static_cast<double>(k) / nd;
  const double d = std::max(0.0, kl_bern(x, p));
  const double sign = x > p ? 1.0 : (x < p ? -1.0 : 0.0);
  return std_normal_cdf(sign * std::sqrt(2.0 * nd * d));
}

bool sandwich_check(long long n, double p, long long k) {
  if (k < 0 || k > n - 1) throw InvalidArgument("sandwich_check requires 0 <= k <= n-1");
  constexpr double slack = 1e-12;
  const double cdf = binom_cdf(n, p, k);
  return zubkov_C(n, p, k) <= cdf + slack && cdf <= zubkov_C(n, p, k + 1) + slack;
}

}  // namespace pfwd
