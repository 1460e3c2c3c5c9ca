#include "pfwd_tools/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "pfwd/error.hpp"
#include "pfwd/grid_analysis.hpp"
#include "pfwd/random.hpp"
#include "pfwd/tree_analysis.hpp"

#ifndef PFWD_VERSION
#define PFWD_VERSION "unknown"
#endif

namespace pfwd::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kGraphStream = 0x6772617068ULL;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

template <class T>
T parse_number(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !in.eof()) throw InvalidArgument(what + ": cannot parse '" + text + "'");
  return value;
}

std::uint64_t resolve_seed(const CommonConfig& common, std::ostream& log) {
  if (common.seed) return *common.seed;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  log << "seed: " << seed << '\n';
  return seed;
}

void require_workers(int workers) {
  if (workers < 0) throw InvalidArgument("workers must be >= 0 (0 = all cores)");
}

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
}

void require_k_range(int k, const std::vector<int>& ns) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (ns.front() < k) throw InvalidArgument("n range must start at or above k");
}

// Header comment: tool version, subcommand, resolved parameters and seed.
std::string provenance(const std::string& command, const std::vector<std::pair<std::string, std::string>>& params) {
  std::string line = std::string("pfwd ") + PFWD_VERSION + " " + command;
  for (const auto& [key, value] : params) line += " " + key + "=" + value;
  return line;
}

void write_output(const CommonConfig& common, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (common.out.empty() || common.out == "-") {
    body(fallback);
    return;
  }
  std::ofstream file(common.out, std::ios::binary);
  if (!file) throw IoError("cannot write output file " + common.out);
  body(file);
  if (!file) throw IoError("failed writing output file " + common.out);
}

std::string num(double x) { return format_double(x); }

std::vector<double> theta_grid(const ThetaGridConfig& cfg) {
  if (cfg.p_grid.empty()) return arithmetic_grid(cfg.p_start, cfg.p_stop, cfg.p_step);
  std::vector<double> grid;
  for (const std::string& part : split(cfg.p_grid, ',')) grid.push_back(parse_number<double>(part, "p grid entry"));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw InvalidArgument("p grid entries must lie in [0,1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidArgument("p grid must be strictly ascending");
  }
  return grid;
}

void validate_theta(const ThetaGridConfig& cfg) {
  if (!cfg.table.empty()) return;
  if (cfg.m < 1 || cfg.m % 2 == 0) throw InvalidArgument("m must be a positive odd integer");
  if (cfg.reps < 2) throw InvalidArgument("reps must be >= 2");
  if (theta_grid(cfg).empty()) throw InvalidArgument("p grid must not be empty");
}

std::vector<std::pair<std::string, std::string>> theta_params(const ThetaGridConfig& cfg) {
  if (!cfg.table.empty()) return {{"theta_table", cfg.table}};
  std::vector<std::pair<std::string, std::string>> out{{"theta_m", std::to_string(cfg.m)},
                                                       {"theta_reps", std::to_string(cfg.reps)}};
  if (cfg.p_grid.empty()) {
    out.emplace_back("p_start", num(cfg.p_start));
    out.emplace_back("p_stop", num(cfg.p_stop));
    out.emplace_back("p_step", num(cfg.p_step));
  } else {
    out.emplace_back("p_grid", cfg.p_grid);
  }
  return out;
}

EstimatorOptions estimator_options(const std::string& leaves_mute, int workers) {
  EstimatorOptions opts;
  opts.workers = workers;
  if (leaves_mute == "on") {
    opts.leaves_mute = true;
  } else if (leaves_mute == "off") {
    opts.leaves_mute = false;
  } else if (leaves_mute != "auto") {
    throw InvalidArgument("leaves-mute must be one of auto, on, off");
  }
  return opts;
}

void add_common(CLI::App* sub, CommonConfig& common) {
  sub->add_option("--seed", common.seed, "Master seed (drawn and printed when omitted)");
  sub->add_option("--workers", common.workers, "Worker threads, 0 = all cores")->capture_default_str();
  sub->add_option("--out", common.out, "Output CSV path (default stdout)");
  sub->add_option("--cache-dir", common.cache_dir, "Theta table cache directory")->capture_default_str();
}

void add_theta(CLI::App* sub, ThetaGridConfig& cfg, const std::string& prefix) {
  sub->add_option("--" + prefix + "m", cfg.m, "Percolation grid side")->capture_default_str();
  sub->add_option("--reps", cfg.reps, "Percolation replications per p")->capture_default_str();
  sub->add_option("--p-start", cfg.p_start)->capture_default_str();
  sub->add_option("--p-stop", cfg.p_stop)->capture_default_str();
  sub->add_option("--p-step", cfg.p_step)->capture_default_str();
  sub->add_option("--p-grid", cfg.p_grid, "Explicit comma-separated p values");
  if (!prefix.empty()) sub->add_option("--theta-table", cfg.table, "Use an existing theta table CSV");
}

}  // namespace

std::vector<int> parse_n_range(const std::string& text) {
  std::vector<int> ns;
  if (text.find(':') != std::string::npos) {
    const std::vector<std::string> parts = split(text, ':');
    if (parts.size() < 2 || parts.size() > 3) throw InvalidArgument("n range must look like a:b or a:b:step");
    const int a = parse_number<int>(parts[0], "n range start");
    const int b = parse_number<int>(parts[1], "n range stop");
    const int step = parts.size() == 3 ? parse_number<int>(parts[2], "n range step") : 1;
    if (step < 1) throw InvalidArgument("n range step must be >= 1");
    if (b < a) throw InvalidArgument("n range stop must not be below its start");
    for (int n = a; n <= b; n += step) ns.push_back(n);
  } else {
    for (const std::string& part : split(text, ',')) ns.push_back(parse_number<int>(part, "n value"));
  }
  if (ns.empty()) throw InvalidArgument("n range must not be empty");
  if (ns.front() < 1) throw InvalidArgument("n values must be >= 1");
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] <= ns[i - 1]) throw InvalidArgument("n range must be strictly ascending");
  }
  return ns;
}

Graph parse_graph(const std::string& text, std::uint64_t seed) {
  const std::vector<std::string> parts = split(text, ':');
  const std::string& kind = parts.front();
  const std::uint64_t graph_seed = derive_seed(seed, kGraphStream);
  auto arity = [&](std::size_t want) {
    if (parts.size() != want + 1) throw InvalidArgument("graph spec '" + text + "' needs " + std::to_string(want) + " fields");
  };
  if (kind == "grid") {
    arity(1);
    return build_grid(parse_number<int>(parts[1], "grid side"));
  }
  if (kind == "tree") {
    arity(2);
    return build_tree(parse_number<int>(parts[1], "tree arity"), parse_number<int>(parts[2], "tree height"));
  }
  if (kind == "rgg") {
    arity(3);
    return build_connected_rgg(parse_number<int>(parts[1], "rgg count"), parse_number<double>(parts[2], "rgg side"),
                               parse_number<double>(parts[3], "rgg radius"), graph_seed)
        .first;
  }
  if (kind == "regular") {
    arity(2);
    return build_random_regular(parse_number<int>(parts[1], "regular count"),
                                parse_number<int>(parts[2], "regular degree"), graph_seed);
  }
  if (kind == "file") {
    const std::string path = text.substr(5);
    std::ifstream in(path);
    if (!in) throw IoError("cannot read graph file " + path);
    return read_edge_list(in);
  }
  throw InvalidArgument("unknown graph kind '" + kind + "' (grid, tree, rgg, regular, file)");
}

std::vector<double> arithmetic_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw InvalidArgument("p step must be > 0");
  if (!(start >= 0.0 && stop <= 1.0 && start <= stop)) throw InvalidArgument("p range must satisfy 0 <= start <= stop <= 1");
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    grid.push_back(std::min(1.0, std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9));
  }
  return grid;
}

ThetaTable load_or_build_theta(const ThetaGridConfig& cfg, const CommonConfig& common, std::uint64_t seed,
                               std::ostream& log) {
  if (!cfg.table.empty()) {
    std::ifstream in(cfg.table);
    if (!in) throw IoError("cannot read theta table " + cfg.table);
    return ThetaTable::read_csv(in);
  }
  const std::vector<double> grid = theta_grid(cfg);
  const fs::path dir(common.cache_dir);
  const fs::path file = dir / theta_cache_name(cfg.m, cfg.reps, seed, grid);
  if (fs::exists(file)) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read cached theta table " + file.string());
    log << "theta cache hit: " << file.string() << '\n';
    return ThetaTable::read_csv(in);
  }
  log << "theta cache miss: " << file.string() << '\n';
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create cache directory " + dir.string() + ": " + ec.message());
  const fs::path partial = file.string() + ".partial";
  std::ofstream out(partial, std::ios::binary);
  if (!out) throw IoError("cannot write cache file " + partial.string());
  ThetaTable table = build_theta_table(cfg.m, grid, cfg.reps, seed, common.workers);
  table.write_csv(out, "theta cache m=" + std::to_string(cfg.m) + " reps=" + std::to_string(cfg.reps) +
                           " seed=" + std::to_string(seed));
  out.close();
  if (!out) throw IoError("failed writing cache file " + partial.string());
  fs::rename(partial, file, ec);
  if (ec) throw IoError("cannot move cache file into place " + file.string() + ": " + ec.message());
  return table;
}

void cmd_theta_table(const ThetaGridConfig& cfg, const CommonConfig& common, std::ostream& out, std::ostream& log) {
  require_workers(common.workers);
  validate_theta(cfg);
  const std::uint64_t seed = resolve_seed(common, log);
  const ThetaTable table = load_or_build_theta(cfg, common, seed, log);
  auto params = theta_params(cfg);
  params.emplace_back("seed", std::to_string(seed));
  write_output(common, out, [&](std::ostream& os) { table.write_csv(os, provenance("theta-table", params)); });
}

void cmd_tree_curves(const TreeCurvesConfig& cfg, const CommonConfig& common, std::ostream& out, std::ostream& log) {
  require_workers(common.workers);
  const std::vector<int> ns = parse_n_range(cfg.n_range);
  require_k_range(cfg.k, ns);
  require_delta(cfg.delta);
  if (cfg.arity < 2) throw InvalidArgument("tree arity must be >= 2");
  if (cfg.height < 2) throw InvalidArgument("tree height must be >= 2");
  const std::uint64_t seed = resolve_seed(common, log);

  auto bound = [](auto&& fn) {
    try {
      return fn();
    } catch (const InapplicableBound&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  std::ostringstream body;
  body << "n,p_min,tau,prop1_lower,prop2_upper,zubkov_lower,zubkov_upper\n";
  for (int n : ns) {
    const TreeSpec spec{cfg.arity, cfg.height, cfg.k, n, cfg.delta};
    const double p = tree_pmin(spec);
    const auto [zl, zu] = tree_pmin_bounds_zubkov(spec);
    body << n << ',' << num(p) << ',' << num(tree_expected_transmissions(spec, p)) << ','
         << num(bound([&] { return tree_pmin_lower_prop1(spec); })) << ','
         << num(bound([&] { return tree_pmin_upper_prop2(spec); })) << ',' << num(zl) << ',' << num(zu) << '\n';
  }
  const std::string header = provenance(
      "tree-curves", {{"arity", std::to_string(cfg.arity)}, {"height", std::to_string(cfg.height)},
                      {"k", std::to_string(cfg.k)}, {"delta", num(cfg.delta)}, {"n_range", cfg.n_range},
                      {"seed", std::to_string(seed)}});
  write_output(common, out, [&](std::ostream& os) { os << "# " << header << '\n' << body.str(); });
}

void cmd_grid_curves(const GridCurvesConfig& cfg, const CommonConfig& common, std::ostream& out, std::ostream& log) {
  require_workers(common.workers);
  const std::vector<int> ns = parse_n_range(cfg.n_range);
  require_k_range(cfg.k, ns);
  require_delta(cfg.delta);
  if (!(cfg.p_floor > kCriticalProbability && cfg.p_floor < 1.0)) throw InvalidArgument("p-floor must lie in (0.59, 1)");
  validate_theta(cfg.theta);
  const std::uint64_t seed = resolve_seed(common, log);
  const ThetaTable table = load_or_build_theta(cfg.theta, common, seed, log);

  GridLimitSpec spec{cfg.k, ns.front(), cfg.delta, &table, cfg.p_floor};
  const std::vector<GridCurvePoint> curve = grid_curve(spec, ns);
  auto params = theta_params(cfg.theta);
  params.insert(params.begin(), {{"k", std::to_string(cfg.k)},
                                 {"delta", num(cfg.delta)},
                                 {"n_range", cfg.n_range},
                                 {"p_floor", num(cfg.p_floor)}});
  params.emplace_back("seed", std::to_string(seed));
  write_output(common, out, [&](std::ostream& os) {
    os << "# " << provenance("grid-curves", params) << '\n';
    os << "n,p_min_limit,tau_normalized,clamped\n";
    for (const GridCurvePoint& c : curve) {
      os << c.n << ',' << num(c.p_min) << ',' << num(c.tau_normalized) << ',' << (c.clamped ? 1 : 0) << '\n';
    }
  });
}

void cmd_simulate(const SimulateConfig& cfg, const CommonConfig& common, std::ostream& out, std::ostream& log) {
  require_workers(common.workers);
  const std::vector<int> ns = parse_n_range(cfg.n_range);
  require_k_range(cfg.k, ns);
  require_delta(cfg.delta);
  if (cfg.trials < 2) throw InvalidArgument("trials must be >= 2");
  if (!(cfg.tol >= 1e-4 && cfg.tol <= 1.0)) throw InvalidArgument("tol must lie in [1e-4, 1]");
  const EstimatorOptions opts = estimator_options(cfg.leaves_mute, common.workers);
  const std::uint64_t seed = resolve_seed(common, log);
  const Graph g = parse_graph(cfg.graph, seed);
  if (!cfg.dump_graph.empty()) {
    std::ofstream dump(cfg.dump_graph);
    if (!dump) throw IoError("cannot write graph dump " + cfg.dump_graph);
    write_edge_list(g, dump);
  }
  const std::vector<CurvePoint> curve = sweep_n(g, cfg.k, cfg.delta, ns, cfg.trials, seed, opts, cfg.tol);
  const std::string header = provenance(
      "simulate", {{"graph", cfg.graph}, {"vertices", std::to_string(g.vertex_count())}, {"k", std::to_string(cfg.k)},
                   {"delta", num(cfg.delta)}, {"n_range", cfg.n_range}, {"trials", std::to_string(cfg.trials)},
                   {"tol", num(cfg.tol)}, {"leaves_mute", cfg.leaves_mute}, {"seed", std::to_string(seed)}});
  write_output(common, out, [&](std::ostream& os) { write_curve_csv(os, curve, header); });
}

void cmd_compare(const CompareConfig& cfg, const CommonConfig& common, std::ostream& out, std::ostream& log) {
  require_workers(common.workers);
  const std::vector<int> ns = parse_n_range(cfg.n_range);
  require_k_range(cfg.k, ns);
  require_delta(cfg.delta);
  if (cfg.m < 1 || cfg.m % 2 == 0) throw InvalidArgument("m must be a positive odd integer");
  if (cfg.trials < 2) throw InvalidArgument("trials must be >= 2");
  if (!(cfg.tol >= 1e-4 && cfg.tol <= 1.0)) throw InvalidArgument("tol must lie in [1e-4, 1]");
  if (!(cfg.p_floor > kCriticalProbability && cfg.p_floor < 1.0)) throw InvalidArgument("p-floor must lie in (0.59, 1)");
  validate_theta(cfg.theta);
  std::vector<int> sweep_ms;
  if (!cfg.m_sweep.empty()) {
    sweep_ms = parse_n_range(cfg.m_sweep);
    for (int m : sweep_ms) {
      if (m % 2 == 0) throw InvalidArgument("m-sweep sides must be odd");
    }
    if (common.out.empty() || common.out == "-") throw InvalidArgument("m-sweep needs --out (writes <out>.msweep.csv)");
    if (cfg.sweep_k < 1 || cfg.sweep_n < cfg.sweep_k) throw InvalidArgument("m-sweep needs 1 <= sweep-k <= sweep-n");
    if (!(cfg.sweep_p >= 0.0 && cfg.sweep_p <= 1.0)) throw InvalidArgument("sweep-p must lie in [0,1]");
    if (cfg.sweep_trials < 2) throw InvalidArgument("sweep-trials must be >= 2");
  }
  const std::uint64_t seed = resolve_seed(common, log);
  if (cfg.delta >= 0.125) log << "warning: delta >= 1/8 lies outside the regime where the gap is expected >= 0\n";

  const ThetaTable table = load_or_build_theta(cfg.theta, common, seed, log);
  const Graph g = build_grid(cfg.m);
  EstimatorOptions opts;
  opts.workers = common.workers;
  const std::vector<CurvePoint> sim = sweep_n(g, cfg.k, cfg.delta, ns, cfg.trials, seed, opts, cfg.tol);
  const std::vector<GridCurvePoint> limit = grid_curve(GridLimitSpec{cfg.k, ns.front(), cfg.delta, &table, cfg.p_floor}, ns);
  const double area = static_cast<double>(cfg.m) * cfg.m;

  auto params = theta_params(cfg.theta);
  params.insert(params.begin(), {{"m", std::to_string(cfg.m)},
                                 {"k", std::to_string(cfg.k)},
                                 {"delta", num(cfg.delta)},
                                 {"n_range", cfg.n_range},
                                 {"trials", std::to_string(cfg.trials)},
                                 {"tol", num(cfg.tol)},
                                 {"p_floor", num(cfg.p_floor)}});
  params.emplace_back("seed", std::to_string(seed));
  write_output(common, out, [&](std::ostream& os) {
    os << "# " << provenance("compare", params) << '\n';
    os << "n,p_min_sim,p_min_ci,tau_sim,tau_sim_stderr,p_min_limit,tau_limit,limit_clamped,conjecture1_gap\n";
    for (std::size_t i = 0; i < ns.size(); ++i) {
      os << ns[i] << ',' << num(sim[i].p_min) << ',' << num(sim[i].p_min_ci) << ',' << num(sim[i].tau) << ','
         << num(sim[i].tau_stderr) << ',' << num(limit[i].p_min) << ',' << num(limit[i].tau_normalized * area) << ','
         << (limit[i].clamped ? 1 : 0) << ',' << num(sim[i].p_min - limit[i].p_min) << '\n';
    }
  });

  if (sweep_ms.empty()) return;
  const std::string path = common.out + ".msweep.csv";
  std::ofstream sweep(path, std::ios::binary);
  if (!sweep) throw IoError("cannot write " + path);
  sweep << "# "
        << provenance("compare m-sweep", {{"m_sweep", cfg.m_sweep}, {"k", std::to_string(cfg.sweep_k)},
                                          {"n", std::to_string(cfg.sweep_n)}, {"p", num(cfg.sweep_p)},
                                          {"trials", std::to_string(cfg.sweep_trials)}, {"seed", std::to_string(seed)}})
        << '\n';
  sweep << "m,fraction,fraction_stderr\n";
  for (int m : sweep_ms) {
    const McEstimate e = mc_expected_fraction(build_grid(m), cfg.sweep_k, cfg.sweep_n, cfg.sweep_p, cfg.sweep_trials,
                                              derive_seed(seed, static_cast<std::uint64_t>(m)), opts);
    sweep << m << ',' << num(e.mean) << ',' << num(e.stderr) << '\n';
  }
  if (!sweep) throw IoError("failed writing " + path);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probabilistic forwarding of coded packets: simulation and analysis"};
  app.set_config("--config", "", "INI file with [subcommand] sections of key=value lines");
  app.require_subcommand(1);
  app.set_version_flag("--version", PFWD_VERSION);

  CommonConfig common;
  ThetaGridConfig theta_cfg;
  TreeCurvesConfig tree_cfg;
  GridCurvesConfig grid_cfg;
  SimulateConfig sim_cfg;
  CompareConfig cmp_cfg;

  auto* theta = app.add_subcommand("theta-table", "Estimate theta(p) on an m x m grid (cached)");
  add_common(theta, common);
  add_theta(theta, theta_cfg, "");

  auto* tree = app.add_subcommand("tree-curves", "Exact tree p_min and tau with analytic bounds");
  add_common(tree, common);
  tree->add_option("--arity", tree_cfg.arity)->capture_default_str();
  tree->add_option("--height", tree_cfg.height)->capture_default_str();
  tree->add_option("--k", tree_cfg.k)->capture_default_str();
  tree->add_option("--delta", tree_cfg.delta)->capture_default_str();
  tree->add_option("--n-range", tree_cfg.n_range, "a:b:step or comma list")->capture_default_str();

  auto* grid = app.add_subcommand("grid-curves", "Large-grid limit p_min and normalized tau");
  add_common(grid, common);
  grid->add_option("--k", grid_cfg.k)->capture_default_str();
  grid->add_option("--delta", grid_cfg.delta)->capture_default_str();
  grid->add_option("--n-range", grid_cfg.n_range)->capture_default_str();
  grid->add_option("--p-floor", grid_cfg.p_floor)->capture_default_str();
  add_theta(grid, grid_cfg.theta, "theta-");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo p_min and tau sweep over n");
  add_common(sim, common);
  sim->add_option("--graph", sim_cfg.graph, "grid:M | tree:D:H | rgg:N:SIDE:R | regular:N:D | file:PATH")
      ->capture_default_str();
  sim->add_option("--k", sim_cfg.k)->capture_default_str();
  sim->add_option("--delta", sim_cfg.delta)->capture_default_str();
  sim->add_option("--n-range", sim_cfg.n_range)->capture_default_str();
  sim->add_option("--trials", sim_cfg.trials)->capture_default_str();
  sim->add_option("--tol", sim_cfg.tol)->capture_default_str();
  sim->add_option("--leaves-mute", sim_cfg.leaves_mute, "auto | on | off")->capture_default_str();
  sim->add_option("--dump-graph", sim_cfg.dump_graph, "Write the simulated graph as an edge list");

  auto* cmp = app.add_subcommand("compare", "Simulated grid curve joined with the limit curve");
  add_common(cmp, common);
  cmp->add_option("--m", cmp_cfg.m, "Simulated grid side")->capture_default_str();
  cmp->add_option("--k", cmp_cfg.k)->capture_default_str();
  cmp->add_option("--delta", cmp_cfg.delta)->capture_default_str();
  cmp->add_option("--n-range", cmp_cfg.n_range)->capture_default_str();
  cmp->add_option("--trials", cmp_cfg.trials)->capture_default_str();
  cmp->add_option("--tol", cmp_cfg.tol)->capture_default_str();
  cmp->add_option("--p-floor", cmp_cfg.p_floor)->capture_default_str();
  add_theta(cmp, cmp_cfg.theta, "theta-");
  cmp->add_option("--m-sweep", cmp_cfg.m_sweep, "Grid sides for the fraction-vs-m sweep");
  cmp->add_option("--sweep-k", cmp_cfg.sweep_k)->capture_default_str();
  cmp->add_option("--sweep-n", cmp_cfg.sweep_n)->capture_default_str();
  cmp->add_option("--sweep-p", cmp_cfg.sweep_p)->capture_default_str();
  cmp->add_option("--sweep-trials", cmp_cfg.sweep_trials)->capture_default_str();

  for (CLI::App* sub : {theta, tree, grid, sim, cmp}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (theta->parsed()) cmd_theta_table(theta_cfg, common, out, err);
    if (tree->parsed()) cmd_tree_curves(tree_cfg, common, out, err);
    if (grid->parsed()) cmd_grid_curves(grid_cfg, common, out, err);
    if (sim->parsed()) cmd_simulate(sim_cfg, common, out, err);
    if (cmp->parsed()) cmd_compare(cmp_cfg, common, out, err);
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace pfwd::cli
