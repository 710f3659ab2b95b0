#pragma once

// Monte Carlo harness: independent runs, stationary measurement and
// parameter sweeps.
//
// Seeding: run r of any configuration uses derive_seed(master_seed, r), and
// every draw inside the run comes from a stream keyed by that run seed. Cells
// of a sweep therefore share random numbers (common random numbers), and the
// result never depends on how runs are scheduled across threads.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vatgame/dynamics.hpp"
#include "vatgame/game.hpp"
#include "vatgame/network.hpp"

namespace vatgame {

inline constexpr std::uint64_t kDefaultSeed = 20210413;

enum class TopologyKind : std::uint8_t { WellMixed, BarabasiAlbert, Xbs, PowerLawConfig, File };

struct TopologySpec {
  TopologyKind kind = TopologyKind::BarabasiAlbert;
  std::size_t m = 2;                        // BA attachment count (also the XBS base)
  BaLinks ba_links = BaLinks::UniformUpToM;
  double rewire_p = 1.0;                    // XBS bias
  RewireMode rewire_mode = RewireMode::Assortative;
  double rewire_attempts_per_edge = 10.0;
  double powerlaw_exponent = 3.04;
  std::size_t k_min = 1;
  std::size_t k_max = 0;                    // 0 means Z - 1
  std::string edge_file;                    // weights are taken from the file
  std::size_t n_partners = 4;               // well-mixed interactions per step
};

struct SimConfig {
  GameParams params;
  TopologySpec topology;
  std::size_t population = 1000;
  std::size_t steps = 1000;
  std::size_t runs = 10;
  double init_coop_freq = 0.5;
  double measure_fraction = 0.25;
  double diversity_sigma = 0.0;
  std::uint64_t master_seed = kDefaultSeed;

  void validate() const;
  /// Z = 10,000 and 50 runs.
  void use_paper_scale();
};

struct RunResult {
  /// trajectory[0] is the initial cooperator fraction, trajectory[t] the
  /// fraction after step t.
  std::vector<double> trajectory;
  double summary = 0.0;
};

struct SummaryStats {
  double mean_coop = 0.0;
  double min_coop = 0.0;
  double max_coop = 0.0;
  std::vector<double> per_run;
};

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index);

/// Number of trailing steps averaged by the stationary measurement.
std::size_t measurement_window(std::size_t steps, double measure_fraction);

/// Mean over the last measurement_window(...) entries of a trajectory.
double stationary_mean(const std::vector<double>& trajectory, double measure_fraction);

/// Builds the (weighted) network for one run. Not used for well-mixed runs.
WeightedNetwork build_network(const SimConfig& config, std::uint64_t seed);

/// Initial population: i.i.d. strategies and, when sigma > 0, per-agent
/// anchors drawn from clamped normals around the shared anchors.
PopulationState initial_population(const SimConfig& config, std::size_t population,
                                   std::uint64_t seed);

RunResult run_once(const SimConfig& config, std::uint64_t seed);

SummaryStats summarize(std::vector<double> per_run);

/// Per-step mean and across-run range of several trajectories.
struct TrajectoryBand {
  std::vector<double> mean;
  std::vector<double> min;
  std::vector<double> max;
};

/// Trajectories must share one length. Throws Error(EmptyInput) when empty.
TrajectoryBand trajectory_band(const std::vector<std::vector<double>>& trajectories);

/// `step,coop_freq,min_coop,max_coop`.
void write_band_csv(std::ostream& out, const TrajectoryBand& band);

struct MonteCarloResult {
  SummaryStats stats;
  std::vector<std::vector<double>> trajectories;  // only when requested
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

SummaryStats monte_carlo(const SimConfig& config, unsigned jobs = 1);
MonteCarloResult monte_carlo_with_trajectories(const SimConfig& config, unsigned jobs = 1);

struct Axis {
  std::string name;
  std::vector<double> values;
};

struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> coordinates;  // one tuple per cell, first axis slowest
  std::vector<SummaryStats> cells;
  /// One band per cell, filled only when trajectories were requested.
  std::vector<TrajectoryBand> bands;

  /// Stats of the cell at the given coordinates (exact match).
  const SummaryStats& at(const std::vector<double>& coordinate) const;
};

/// Full-grid Monte Carlo over named SimConfig/GameParams fields.
/// Throws Error(UnknownAxis) for names that are not numeric fields.
SweepResult sweep(const SimConfig& config, const std::vector<Axis>& axes, unsigned jobs = 1,
                  const ProgressFn& progress = {}, bool keep_trajectories = false);

/// Axes (diversity_sigma, alpha).
SweepResult diversity_experiment(const SimConfig& config, const std::vector<double>& sigmas,
                                 const std::vector<double>& alphas, unsigned jobs = 1,
                                 const ProgressFn& progress = {});

struct AuditScenario {
  double theta_low = 0.5;
  double theta_high = 0.5;
};

struct ScenarioSweep {
  AuditScenario scenario;
  SweepResult result;  // axes (reward, fine, alpha)
};

std::vector<AuditScenario> default_policy_scenarios();

std::vector<ScenarioSweep> policy_experiment(const SimConfig& config,
                                             const std::vector<double>& rewards,
                                             const std::vector<double>& fines,
                                             const std::vector<AuditScenario>& scenarios,
                                             const std::vector<double>& alphas,
                                             unsigned jobs = 1, const ProgressFn& progress = {});

/// Header: axis names, then mean_coop,min_coop,max_coop,runs.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Header: axis names, then step,coop_freq,min_coop,max_coop. Needs bands.
void write_sweep_trajectories_csv(std::ostream& out, const SweepResult& result);

/// Runs fn(0..n-1) on up to `jobs` threads. Every index is executed exactly
/// once; the first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace vatgame
