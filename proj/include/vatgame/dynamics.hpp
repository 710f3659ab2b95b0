#pragma once

// Evolutionary engine: degree-averaged fitness, synchronous Fermi imitation and
// mutation, on a network or in a well-mixed population.
//
// Randomness: agent i at step t draws only from the stream keyed by
// (run_seed, i, t). Decisions read the pre-step snapshot, so evaluating
// agents in any order, or in parallel, gives bitwise-identical states.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "vatgame/game.hpp"
#include "vatgame/network.hpp"

namespace vatgame {

/// Per-agent audit-probability anchors (both-defect probabilities at the
/// low and high tax debt).
struct AuditAnchors {
  double low = 0.5;
  double high = 0.5;
};

struct PopulationState {
  std::vector<Strategy> strategies;
  /// Fitness of the strategies that were current at the start of the last
  /// step (the f^{t-1} the imitation compared).
  std::vector<double> fitness;
  /// Empty when every agent uses the shared anchors from GameParams.
  std::vector<AuditAnchors> anchors;
  std::uint64_t step = 0;

  PopulationState() = default;
  explicit PopulationState(std::vector<Strategy> initial,
                           std::vector<AuditAnchors> agent_anchors = {});

  std::size_t size() const noexcept { return strategies.size(); }
  double cooperator_fraction() const noexcept;
};

/// Eq. of the pairwise comparison: probability that the focal agent copies
/// the model. Saturates without overflow and satisfies
/// fermi_prob(a, b, beta) + fermi_prob(b, a, beta) == 1 exactly.
double fermi_prob(double focal_fitness, double model_fitness, double beta) noexcept;

/// Payoff tables for the two tax-debt levels, one per agent when agents hold
/// their own anchors, otherwise a single shared table.
class PayoffBook {
 public:
  PayoffBook(const GameParams& params, std::span<const AuditAnchors> anchors);

  double payoff(std::size_t agent, Strategy focal, Strategy opponent, double d) const;

 private:
  using Table = std::array<double, 8>;  // [level][focal][opponent]

  const Table& table(std::size_t agent) const noexcept {
    return tables_.size() == 1 ? tables_[0] : tables_[agent];
  }

  GameParams params_;
  std::vector<Table> tables_;
  std::vector<AuditProbability> thetas_;
};

class NetworkDynamics {
 public:
  /// The network and the state's anchors are captured; the network must
  /// outlive this object.
  NetworkDynamics(const WeightedNetwork& net, const GameParams& params,
                  std::span<const AuditAnchors> anchors = {});

  /// Fills state.fitness from the current strategies.
  void compute_fitness(PopulationState& state) const;

  /// Imitation then mutation for one agent, against the state's snapshot.
  /// Requires state.fitness to match state.strategies.
  Strategy decide(std::size_t agent, const PopulationState& state,
                  std::uint64_t run_seed) const;

  /// One synchronous update (fitness, imitation, mutation, t+1).
  void step(PopulationState& state, std::uint64_t run_seed) const;

 private:
  void check(const PopulationState& state) const;

  const WeightedNetwork& net_;
  GameParams params_;
  PayoffBook book_;
};

class WellMixedDynamics {
 public:
  WellMixedDynamics(std::size_t population, const GameParams& params, std::size_t n_partners,
                    std::span<const AuditAnchors> anchors = {});

  /// Fitness averages payoffs against n_partners distinct random agents; each
  /// interaction draws its own tax debt.
  void compute_fitness(PopulationState& state, std::uint64_t run_seed) const;
  Strategy decide(std::size_t agent, const PopulationState& state,
                  std::uint64_t run_seed) const;
  void step(PopulationState& state, std::uint64_t run_seed) const;

 private:
  void check(const PopulationState& state) const;

  std::size_t population_;
  GameParams params_;
  std::size_t n_partners_;
  PayoffBook book_;
};

std::vector<double> compute_fitness(const PopulationState& state, const WeightedNetwork& net,
                                    const GameParams& params);

PopulationState step(const PopulationState& state, const WeightedNetwork& net,
                     const GameParams& params, std::uint64_t run_seed);

PopulationState step_well_mixed(const PopulationState& state, const GameParams& params,
                                std::uint64_t run_seed, std::size_t n_partners);

/// `step,coop_freq` CSV; row t holds trajectory[t].
void write_trajectory(std::ostream& out, std::span<const double> trajectory);

}  // namespace vatgame
