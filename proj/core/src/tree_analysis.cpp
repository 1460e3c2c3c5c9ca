#include "pfwd/tree_analysis.hpp"

#include <cmath>
#include <string>

#include "pfwd/binom.hpp"
#include "pfwd/error.hpp"

namespace pfwd {

namespace {

constexpr double kBisectionTol = 1e-6;
constexpr int kBisectionCap = 60;

void validate(const TreeSpec& s) {
  if (s.arity < 2) throw InvalidArgument("tree arity d must be >= 2");
  if (s.height < 1) throw InvalidArgument("tree height H must be >= 1");
  if (s.k < 1) throw InvalidArgument("k must be >= 1");
  if (s.n < 1) throw InvalidArgument("n must be >= 1");
}

void validate_bound(const TreeSpec& s) {
  validate(s);
  if (s.height < 2) throw InvalidArgument("tree bounds need H >= 2");
}

// Which CDF stands in for P(Bin(n,q) <= k-1) inside the failure fraction.
enum class CdfModel { exact, zubkov_upper, zubkov_lower };

double level_cdf(const TreeSpec& s, double q, CdfModel model) {
  // Degenerate levels are exact for every model: Bin(n,0) = 0 and Bin(n,1) = n.
  if (q <= 0.0 || q >= 1.0 || model == CdfModel::exact) return binom_cdf(s.n, q, s.k - 1);
  if (model == CdfModel::zubkov_upper) return zubkov_C(s.n, q, s.k);
  return zubkov_C(s.n, q, s.k - 1);
}

double failure_fraction(const TreeSpec& s, double p, CdfModel model) {
  double sum = 0.0;
  double width = static_cast<double>(s.arity);  // d^{l+1}
  double q = 1.0;                               // p^l
  for (int l = 0; l < s.height; ++l) {
    sum += width * level_cdf(s, q, model);
    width *= s.arity;
    q *= p;
  }
  return sum / tree_vertex_count(s);
}

// Smallest p in [0,1] with failure_fraction <= delta. Runs a fixed dyadic
// bisection, so the answer is the dyadic ceiling of the true root and is
// monotone in anything the fraction is monotone in.
double bisect(const TreeSpec& s, CdfModel model) {
  if (!(s.delta > 0.0 && s.delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
  if (failure_fraction(s, 1.0, model) > s.delta) {
    throw NoSolution("near-broadcast unreachable on the tree (k=" + std::to_string(s.k) + ", n=" + std::to_string(s.n) + ")");
  }
  if (failure_fraction(s, 0.0, model) <= s.delta) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < kBisectionCap && hi - lo > kBisectionTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (failure_fraction(s, mid, model) <= s.delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

double tree_vertex_count(const TreeSpec& spec) {
  double total = 0.0;
  double width = 1.0;
  for (int l = 0; l <= spec.height; ++l) {
    total += width;
    width *= spec.arity;
  }
  return total;
}

double tree_expected_receivers(const TreeSpec& spec, double p) {
  validate(spec);
  detail::require_probability(p, "p");
  double sum = 1.0;
  double width = 1.0;
  double q = 1.0;  // p^{l-1}
  for (int l = 1; l <= spec.height; ++l) {
    width *= spec.arity;
    sum += width * binom_tail(spec.n, q, spec.k);
    q *= p;
  }
  return sum;
}

double tree_expected_transmissions(const TreeSpec& spec, double p) {
  validate(spec);
  detail::require_probability(p, "p");
  const double r = spec.arity * p;
  if (std::fabs(r - 1.0) < 1e-12) return static_cast<double>(spec.n) * spec.height;
  return spec.n * (std::pow(r, spec.height) - 1.0) / (r - 1.0);
}

double tree_failure_fraction(const TreeSpec& spec, double p) {
  validate(spec);
  detail::require_probability(p, "p");
  return failure_fraction(spec, p, CdfModel::exact);
}

double tree_pmin(const TreeSpec& spec) {
  validate(spec);
  if (spec.n < spec.k) throw NoSolution("n < k: no forwarding probability reaches k packets");
  return bisect(spec, CdfModel::exact);
}

double tree_tau(const TreeSpec& spec) { return tree_expected_transmissions(spec, tree_pmin(spec)); }

double tree_pmin_lower_prop1(const TreeSpec& spec) {
  validate_bound(spec);
  if (!(spec.delta < 0.125)) throw InapplicableBound("the lower bound holds only for delta < 1/8");
  if (spec.n < spec.k) throw InvalidArgument("lower bound needs n >= k");
  const double expo = 1.0 / (spec.height - 1);
  if (spec.k == 1) {
    if (spec.n < 2) throw InvalidArgument("k = 1 lower bound needs n > 1");
    return std::pow(1.0 / spec.n, expo);
  }
  return std::pow(static_cast<double>(spec.k - 1) / spec.n, expo);
}

double tree_pmin_upper_prop2(const TreeSpec& spec) {
  validate_bound(spec);
  if (!(spec.delta > 0.0 && spec.delta <= 1.0)) throw InvalidArgument("upper bound needs delta in (0,1]");
  const double nodes = tree_vertex_count(spec);
  const double delta_prime = std::min(spec.delta * nodes / (nodes - 1.0), 1.0);
  const double log_d = std::log(delta_prime);
  const double expo = 1.0 / (spec.height - 1);
  if (spec.k == 1) return std::min(std::pow(-log_d / spec.n, expo), 1.0);
  const double t = std::sqrt(2.0 * (spec.k - 1) * (-log_d) + log_d * log_d) - log_d;
  return std::min(std::pow((spec.k - 1 + t) / spec.n, expo), 1.0);
}

std::pair<double, double> tree_pmin_bounds_zubkov(const TreeSpec& spec) {
  validate(spec);
  if (spec.n < spec.k) throw NoSolution("n < k: no forwarding probability reaches k packets");
  return {bisect(spec, CdfModel::zubkov_lower), bisect(spec, CdfModel::zubkov_upper)};
}

}  // namespace pfwd
