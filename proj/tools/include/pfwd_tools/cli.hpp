#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pfwd/estimator.hpp"
#include "pfwd/graph.hpp"
#include "pfwd/percolation.hpp"

namespace pfwd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct CommonConfig {
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out;  // empty or "-" writes to stdout
  std::string cache_dir = ".pfwd-cache";
};

struct ThetaGridConfig {
  int m = 501;
  int reps = 20;
  double p_start = 0.593;
  double p_stop = 1.0;
  double p_step = 0.005;
  std::string p_grid;  // explicit comma list, overrides start/stop/step
  std::string table;   // existing theta CSV; skips building
};

struct TreeCurvesConfig {
  int arity = 2;
  int height = 50;
  int k = 100;
  double delta = 0.1;
  std::string n_range = "100:200:5";
};

struct GridCurvesConfig {
  int k = 100;
  double delta = 0.1;
  std::string n_range = "100:300:5";
  double p_floor = 0.593;
  ThetaGridConfig theta;
};

struct SimulateConfig {
  std::string graph = "grid:31";
  int k = 100;
  double delta = 0.1;
  std::string n_range = "100:200:10";
  long long trials = 1000;
  double tol = 1e-4;
  std::string leaves_mute = "auto";
  std::string dump_graph;
};

struct CompareConfig {
  int m = 31;
  int k = 100;
  double delta = 0.1;
  std::string n_range = "100:200:10";
  long long trials = 1000;
  double tol = 1e-4;
  double p_floor = 0.593;
  ThetaGridConfig theta;
  std::string m_sweep;  // comma list of grid sides; writes <out>.msweep.csv
  int sweep_k = 20;
  int sweep_n = 30;
  double sweep_p = 0.75;
  long long sweep_trials = 20;
};

/// "a:b:s", "a:b" (step 1), "a" or "a,b,c"; result strictly ascending.
std::vector<int> parse_n_range(const std::string& text);

/// "grid:M", "tree:D:H", "rgg:N:SIDE:RADIUS", "regular:N:D" or "file:PATH".
Graph parse_graph(const std::string& text, std::uint64_t seed);

/// Inclusive arithmetic grid; values rounded to 1e-9.
std::vector<double> arithmetic_grid(double start, double stop, double step);

/// Builds the table or reads it from the cache directory; logs hit or miss to `log`.
ThetaTable load_or_build_theta(const ThetaGridConfig& cfg, const CommonConfig& common, std::uint64_t seed,
                               std::ostream& log);

void cmd_theta_table(const ThetaGridConfig& cfg, const CommonConfig& common, std::ostream& out, std::ostream& log);
void cmd_tree_curves(const TreeCurvesConfig& cfg, const CommonConfig& common, std::ostream& out, std::ostream& log);
void cmd_grid_curves(const GridCurvesConfig& cfg, const CommonConfig& common, std::ostream& out, std::ostream& log);
void cmd_simulate(const SimulateConfig& cfg, const CommonConfig& common, std::ostream& out, std::ostream& log);
void cmd_compare(const CompareConfig& cfg, const CommonConfig& common, std::ostream& out, std::ostream& log);

/// The cmd_* functions write CSV to common.out, or to `out` when that is empty or "-".

/// Parses argv, dispatches, and maps errors to exit codes. CSV goes to
/// --out or `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pfwd::cli
