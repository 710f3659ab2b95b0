#include "vatgame/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vatgame/config.hpp"
#include "vatgame/rng.hpp"

namespace vatgame {

void SimConfig::validate() const {
  params.validate();
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidParams, what);
  };
  require(population >= 2 || topology.kind == TopologyKind::File, "population must be >= 2");
  require(steps >= 1, "steps must be >= 1");
  require(runs >= 1, "runs must be >= 1");
  require(init_coop_freq >= 0.0 && init_coop_freq <= 1.0, "init_coop_freq must lie in [0,1]");
  require(measure_fraction > 0.0 && measure_fraction <= 1.0,
          "measure_fraction must lie in (0,1]");
  require(std::isfinite(diversity_sigma) && diversity_sigma >= 0.0,
          "diversity_sigma must be >= 0");
  switch (topology.kind) {
    case TopologyKind::WellMixed:
      require(topology.n_partners >= 1 && topology.n_partners < population,
              "n_partners must lie in [1, Z)");
      break;
    case TopologyKind::Xbs:
      require(topology.rewire_p >= 0.0 && topology.rewire_p <= 1.0,
              "rewire_p must lie in [0,1]");
      require(topology.rewire_attempts_per_edge >= 0.0, "rewire attempts must be >= 0");
      [[fallthrough]];
    case TopologyKind::BarabasiAlbert:
      require(topology.m >= 1 && population > topology.m, "BA needs Z > m >= 1");
      break;
    case TopologyKind::PowerLawConfig:
      require(topology.powerlaw_exponent > 2.0, "powerlaw_exponent must exceed 2");
      require(topology.k_min >= 1, "k_min must be >= 1");
      require(topology.k_max == 0 || (topology.k_max >= topology.k_min &&
                                      topology.k_max <= population - 1),
              "k_max must lie in [k_min, Z-1]");
      break;
    case TopologyKind::File:
      require(!topology.edge_file.empty(), "edge_file is required for file topology");
      break;
  }
}

void SimConfig::use_paper_scale() {
  population = 10000;
  runs = 50;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index) {
  return derive_seed(master_seed, {tag(StreamTag::Run), run_index});
}

std::size_t measurement_window(std::size_t steps, double measure_fraction) {
  const auto w = static_cast<std::size_t>(
      std::ceil(measure_fraction * static_cast<double>(steps) - 1e-9));
  return std::clamp<std::size_t>(w, 1, std::max<std::size_t>(steps, 1));
}

double stationary_mean(const std::vector<double>& trajectory, double measure_fraction) {
  if (trajectory.empty()) return 0.0;
  const std::size_t steps = trajectory.size() - 1;
  if (steps == 0) return trajectory.front();
  const std::size_t w = measurement_window(steps, measure_fraction);
  double sum = 0.0;
  for (std::size_t t = trajectory.size() - w; t < trajectory.size(); ++t) sum += trajectory[t];
  return sum / static_cast<double>(w);
}

WeightedNetwork build_network(const SimConfig& config, std::uint64_t seed) {
  const TopologySpec& topo = config.topology;
  const std::size_t z = config.population;
  WeightedNetwork net;
  switch (topo.kind) {
    case TopologyKind::WellMixed:
      throw Error(ErrorCode::InvalidParams, "well-mixed populations have no network");
    case TopologyKind::File:
      return read_edge_list(topo.edge_file);
    case TopologyKind::BarabasiAlbert:
      net = generate_ba(z, topo.m, seed, topo.ba_links);
      break;
    case TopologyKind::Xbs: {
      const WeightedNetwork base = generate_ba(z, topo.m, seed, topo.ba_links);
      const auto attempts = static_cast<std::size_t>(
          std::llround(topo.rewire_attempts_per_edge * static_cast<double>(base.edge_count())));
      net = rewire_xbs(base, topo.rewire_p, topo.rewire_mode, attempts, seed);
      break;
    }
    case TopologyKind::PowerLawConfig:
      net = generate_powerlaw_config(z, topo.powerlaw_exponent, topo.k_min,
                                     topo.k_max == 0 ? z - 1 : topo.k_max, seed);
      break;
  }
  const GameParams& p = config.params;
  return assign_weights(net, p.prob_high, p.d_low, p.d_high, seed);
}

PopulationState initial_population(const SimConfig& config, std::size_t population,
                                   std::uint64_t seed) {
  Rng rng(seed, {tag(StreamTag::Strategies)});
  std::vector<Strategy> strategies(population);
  for (auto& s : strategies) s = rng.bernoulli(config.init_coop_freq) ? Strategy::C : Strategy::D;

  std::vector<AuditAnchors> anchors;
  if (config.diversity_sigma > 0.0) {
    Rng anchor_rng(seed, {tag(StreamTag::Anchors)});
    std::normal_distribution<double> low(config.params.theta_low, config.diversity_sigma);
    std::normal_distribution<double> high(config.params.theta_high, config.diversity_sigma);
    anchors.resize(population);
    for (auto& a : anchors) {
      a.low = std::clamp(low(anchor_rng), 0.0, 1.0);
      a.high = std::clamp(high(anchor_rng), 0.0, 1.0);
    }
  }
  return PopulationState(std::move(strategies), std::move(anchors));
}

namespace {

template <class Dynamics>
RunResult evolve(const Dynamics& dynamics, PopulationState state, const SimConfig& config,
                 std::uint64_t seed) {
  RunResult out;
  out.trajectory.reserve(config.steps + 1);
  out.trajectory.push_back(state.cooperator_fraction());
  for (std::size_t t = 0; t < config.steps; ++t) {
    dynamics.step(state, seed);
    out.trajectory.push_back(state.cooperator_fraction());
  }
  out.summary = stationary_mean(out.trajectory, config.measure_fraction);
  return out;
}

}  // namespace

RunResult run_once(const SimConfig& config, std::uint64_t seed) {
  config.validate();
  if (config.topology.kind == TopologyKind::WellMixed) {
    PopulationState state = initial_population(config, config.population, seed);
    const WellMixedDynamics dynamics(config.population, config.params,
                                     config.topology.n_partners, state.anchors);
    return evolve(dynamics, std::move(state), config, seed);
  }
  const WeightedNetwork net = build_network(config, seed);
  PopulationState state = initial_population(config, net.node_count(), seed);
  const NetworkDynamics dynamics(net, config.params, state.anchors);
  return evolve(dynamics, std::move(state), config, seed);
}

SummaryStats summarize(std::vector<double> per_run) {
  if (per_run.empty()) throw Error(ErrorCode::EmptyInput, "no runs to summarize");
  SummaryStats s;
  s.mean_coop = std::accumulate(per_run.begin(), per_run.end(), 0.0) /
                static_cast<double>(per_run.size());
  const auto [lo, hi] = std::minmax_element(per_run.begin(), per_run.end());
  s.min_coop = *lo;
  s.max_coop = *hi;
  // Guard the ordering invariant against rounding in the mean.
  s.mean_coop = std::clamp(s.mean_coop, s.min_coop, s.max_coop);
  s.per_run = std::move(per_run);
  return s;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1u, jobs);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(jobs, n); ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

MonteCarloResult monte_carlo_with_trajectories(const SimConfig& config, unsigned jobs) {
  config.validate();
  std::vector<RunResult> runs(config.runs);
  parallel_for(config.runs, jobs,
               [&](std::size_t r) { runs[r] = run_once(config, run_seed(config.master_seed, r)); });
  MonteCarloResult out;
  std::vector<double> per_run;
  for (auto& r : runs) {
    per_run.push_back(r.summary);
    out.trajectories.push_back(std::move(r.trajectory));
  }
  out.stats = summarize(std::move(per_run));
  return out;
}

SummaryStats monte_carlo(const SimConfig& config, unsigned jobs) {
  config.validate();
  std::vector<double> per_run(config.runs);
  parallel_for(config.runs, jobs, [&](std::size_t r) {
    per_run[r] = run_once(config, run_seed(config.master_seed, r)).summary;
  });
  return summarize(std::move(per_run));
}

const SummaryStats& SweepResult::at(const std::vector<double>& coordinate) const {
  for (std::size_t i = 0; i < coordinates.size(); ++i) {
    if (coordinates[i] == coordinate) return cells[i];
  }
  throw Error(ErrorCode::InvalidParams, "no sweep cell at the requested coordinates");
}

TrajectoryBand trajectory_band(const std::vector<std::vector<double>>& trajectories) {
  if (trajectories.empty()) throw Error(ErrorCode::EmptyInput, "no trajectories");
  const std::size_t len = trajectories.front().size();
  TrajectoryBand band;
  band.mean.assign(len, 0.0);
  band.min.assign(len, 1.0);
  band.max.assign(len, 0.0);
  for (const auto& tr : trajectories) {
    if (tr.size() != len) throw Error(ErrorCode::SizeMismatch, "trajectory lengths differ");
    for (std::size_t t = 0; t < len; ++t) {
      band.mean[t] += tr[t];
      band.min[t] = std::min(band.min[t], tr[t]);
      band.max[t] = std::max(band.max[t], tr[t]);
    }
  }
  for (double& m : band.mean) m /= static_cast<double>(trajectories.size());
  return band;
}

void write_band_csv(std::ostream& out, const TrajectoryBand& band) {
  out << "step,coop_freq,min_coop,max_coop\n";
  for (std::size_t t = 0; t < band.mean.size(); ++t) {
    fmt::print(out, "{},{:.6f},{:.6f},{:.6f}\n", t, band.mean[t], band.min[t], band.max[t]);
  }
}

SweepResult sweep(const SimConfig& config, const std::vector<Axis>& axes, unsigned jobs,
                  const ProgressFn& progress, bool keep_trajectories) {
  SweepResult result;
  std::size_t cell_count = 1;
  for (const Axis& a : axes) {
    if (a.values.empty()) {
      throw Error(ErrorCode::InvalidParams, fmt::format("axis {} has no values", a.name));
    }
    // Probe the name once so unknown axes fail before any work starts.
    SimConfig probe = config;
    set_numeric(probe, a.name, a.values.front());
    result.axis_names.push_back(a.name);
    cell_count *= a.values.size();
  }

  std::vector<SimConfig> cell_configs;
  cell_configs.reserve(cell_count);
  for (std::size_t c = 0; c < cell_count; ++c) {
    SimConfig cfg = config;
    std::vector<double> coord(axes.size());
    std::size_t rem = c;
    for (std::size_t k = axes.size(); k-- > 0;) {
      const auto& values = axes[k].values;
      coord[k] = values[rem % values.size()];
      rem /= values.size();
    }
    for (std::size_t k = 0; k < axes.size(); ++k) set_numeric(cfg, axes[k].name, coord[k]);
    cfg.validate();
    result.coordinates.push_back(std::move(coord));
    cell_configs.push_back(std::move(cfg));
  }

  std::vector<std::vector<double>> per_run(cell_count);
  std::vector<std::vector<std::vector<double>>> trajectories(keep_trajectories ? cell_count : 0);
  std::vector<std::size_t> offsets(cell_count + 1, 0);
  for (std::size_t c = 0; c < cell_count; ++c) {
    per_run[c].resize(cell_configs[c].runs);
    if (keep_trajectories) trajectories[c].resize(cell_configs[c].runs);
    offsets[c + 1] = offsets[c] + cell_configs[c].runs;
  }
  const std::size_t total = offsets.back();
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  parallel_for(total, jobs, [&](std::size_t task) {
    const auto cell = static_cast<std::size_t>(
        std::upper_bound(offsets.begin(), offsets.end(), task) - offsets.begin() - 1);
    const std::size_t r = task - offsets[cell];
    const SimConfig& cfg = cell_configs[cell];
    RunResult run = run_once(cfg, run_seed(cfg.master_seed, r));
    per_run[cell][r] = run.summary;
    if (keep_trajectories) trajectories[cell][r] = std::move(run.trajectory);
    const std::size_t finished = ++done;
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(finished, total);
    }
  });

  for (auto& runs : per_run) result.cells.push_back(summarize(std::move(runs)));
  for (const auto& cell : trajectories) result.bands.push_back(trajectory_band(cell));
  return result;
}

SweepResult diversity_experiment(const SimConfig& config, const std::vector<double>& sigmas,
                                 const std::vector<double>& alphas, unsigned jobs,
                                 const ProgressFn& progress) {
  for (double s : sigmas) {
    if (!(s >= 0.0)) throw Error(ErrorCode::InvalidParams, "sigma values must be >= 0");
  }
  return sweep(config, {{"diversity_sigma", sigmas}, {"alpha", alphas}}, jobs, progress);
}

std::vector<AuditScenario> default_policy_scenarios() {
  return {{0.8, 0.2}, {0.5, 0.5}, {0.2, 0.8}};
}

std::vector<ScenarioSweep> policy_experiment(const SimConfig& config,
                                             const std::vector<double>& rewards,
                                             const std::vector<double>& fines,
                                             const std::vector<AuditScenario>& scenarios,
                                             const std::vector<double>& alphas, unsigned jobs,
                                             const ProgressFn& progress) {
  std::vector<ScenarioSweep> out;
  for (const AuditScenario& sc : scenarios) {
    SimConfig cfg = config;
    cfg.params.theta_low = sc.theta_low;
    cfg.params.theta_high = sc.theta_high;
    out.push_back(
        {sc, sweep(cfg, {{"reward", rewards}, {"fine", fines}, {"alpha", alphas}}, jobs,
                   progress)});
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  for (const auto& name : result.axis_names) out << name << ',';
  out << "mean_coop,min_coop,max_coop,runs\n";
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    for (double v : result.coordinates[c]) fmt::print(out, "{},", v);
    const SummaryStats& s = result.cells[c];
    fmt::print(out, "{:.6f},{:.6f},{:.6f},{}\n", s.mean_coop, s.min_coop, s.max_coop,
               s.per_run.size());
  }
}

void write_sweep_trajectories_csv(std::ostream& out, const SweepResult& result) {
  if (result.bands.size() != result.cells.size()) {
    throw Error(ErrorCode::InvalidParams, "sweep was run without trajectories");
  }
  for (const auto& name : result.axis_names) out << name << ',';
  out << "step,coop_freq,min_coop,max_coop\n";
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    std::string prefix;
    for (double v : result.coordinates[c]) prefix += fmt::format("{},", v);
    const TrajectoryBand& b = result.bands[c];
    for (std::size_t t = 0; t < b.mean.size(); ++t) {
      fmt::print(out, "{}{},{:.6f},{:.6f},{:.6f}\n", prefix, t, b.mean[t], b.min[t], b.max[t]);
    }
  }
}

}  // namespace vatgame
