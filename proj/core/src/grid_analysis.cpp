#include "pfwd/grid_analysis.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "pfwd/binom.hpp"
#include "pfwd/error.hpp"
#include "pfwd/graph.hpp"

namespace pfwd {

namespace {

void check_kn(int k, int n) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (n < k) throw InvalidArgument("k must not exceed n");
}

double log_choose(int n, int r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

// a * log(x) with 0 * log(0) = 0.
double xlogy(double a, double x) { return a == 0.0 ? 0.0 : a * std::log(x); }

double limit_at(const GridLimitSpec& spec, double p) {
  return grid_limit_receiver_fraction(spec.k, spec.n, spec.theta->theta_plus_at(p));
}

void check_spec(const GridLimitSpec& spec) {
  if (spec.theta == nullptr) throw InvalidArgument("grid limit needs a theta table");
  if (spec.k < 1) throw InvalidArgument("k must be >= 1");
  if (spec.n < spec.k) throw NoSolution("n < k: a vertex can never collect k packets");
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
  if (!(spec.p_floor > kCriticalProbability && spec.p_floor < 1.0)) {
    throw InvalidArgument("p_floor must lie in (0.59, 1)");
  }
}

}  // namespace

double theta_plus_kn(int k, int n, double theta_plus) {
  check_kn(k, n);
  detail::require_probability(theta_plus, "theta_plus");
  return binom_tail(n, theta_plus, k);
}

double grid_limit_receiver_fraction(int k, int n, double theta_plus) {
  check_kn(k, n);
  detail::require_probability(theta_plus, "theta_plus");
  return binom_tail(n, theta_plus * theta_plus, k);
}

double grid_limit_double_sum(int k, int n, double theta_plus) {
  check_kn(k, n);
  detail::require_probability(theta_plus, "theta_plus");
  if (theta_plus == 0.0) return 0.0;
  const double lq = theta_plus < 1.0 ? std::log1p(-theta_plus) : 0.0;
  double sum = 0.0;
  for (int t = k; t <= n; ++t) {
    for (int j = k; j <= t; ++j) {
      if (theta_plus == 1.0 && j != n) continue;
      const double term = log_choose(n, t) + log_choose(t, j) + xlogy(t + j, theta_plus) +
                          (theta_plus < 1.0 ? (n - j) * lq : 0.0);
      sum += std::exp(term);
    }
  }
  return sum;
}

GridPmin grid_pmin(const GridLimitSpec& spec) {
  check_spec(spec);
  const double target = 1.0 - spec.delta;
  if (limit_at(spec, spec.p_floor) >= target) return {spec.p_floor, true};
  if (limit_at(spec, 1.0) < target) throw NoSolution("receiver fraction 1-delta unreachable at p = 1");
  double lo = spec.p_floor;
  double hi = 1.0;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (limit_at(spec, mid) >= target ? hi : lo) = mid;
  }
  return {hi, false};
}

GridTau grid_tau_normalized(const GridLimitSpec& spec) {
  const GridPmin pm = grid_pmin(spec);
  const double theta = spec.theta->theta_at(pm.p);
  return {spec.n * theta * theta / pm.p, pm.p, pm.clamped};
}

std::vector<GridCurvePoint> grid_curve(const GridLimitSpec& base, std::span<const int> n_values) {
  std::vector<GridCurvePoint> out;
  out.reserve(n_values.size());
  for (int n : n_values) {
    GridLimitSpec spec = base;
    spec.n = n;
    const GridTau tau = grid_tau_normalized(spec);
    out.push_back({n, tau.p, tau.value, tau.unreliable});
  }
  return out;
}

void write_grid_curve_csv(std::ostream& out, std::span<const GridCurvePoint> points, std::string_view comment) {
  if (!comment.empty()) {
    std::istringstream lines{std::string(comment)};
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << '\n';
  }
  out << "n,p_min,tau_normalized,clamped_flag\n";
  for (const GridCurvePoint& c : points) {
    out << c.n << ',' << format_double(c.p_min) << ',' << format_double(c.tau_normalized) << ','
        << (c.clamped ? 1 : 0) << '\n';
  }
}

GapResult conjecture1_gap(int k, int n, double delta, int m, long long trials, std::uint64_t seed,
                          const ThetaTable& theta, const EstimatorOptions& options, double tol) {
  GapResult r;
  r.outside_regime = delta >= 0.125;
  GridLimitSpec spec{k, n, delta, &theta, kDefaultPFloor};
  const GridPmin limit = grid_pmin(spec);
  r.limit_p_min = limit.p;
  r.limit_clamped = limit.clamped;
  const Graph g = build_grid(m);
  const PminEstimate mc = mc_pmin(g, k, n, delta, trials, tol, seed, options);
  r.mc_p_min = mc.p_min;
  r.ci_half_width = mc.ci_half_width;
  r.gap = mc.p_min - limit.p;
  return r;
}

}  // namespace pfwd
