#include "vatgame/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vatgame/rng.hpp"

namespace vatgame {

PopulationState::PopulationState(std::vector<Strategy> initial,
                                 std::vector<AuditAnchors> agent_anchors)
    : strategies(std::move(initial)),
      fitness(strategies.size(), 0.0),
      anchors(std::move(agent_anchors)) {}

double PopulationState::cooperator_fraction() const noexcept {
  if (strategies.empty()) return 0.0;
  const auto c = std::count(strategies.begin(), strategies.end(), Strategy::C);
  return static_cast<double>(c) / static_cast<double>(strategies.size());
}

double fermi_prob(double focal_fitness, double model_fitness, double beta) noexcept {
  // x(a, b) == -x(b, a) exactly, and for q in [1/2, 1] both 1 - q and
  // (1 - q) + q are exact, which gives the exact complement identity.
  const double x = beta * (model_fitness - focal_fitness);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  return 1.0 - 1.0 / (1.0 + std::exp(x));
}

namespace {

constexpr std::size_t slot(std::size_t level, Strategy focal, Strategy opponent) {
  return level * 4 + static_cast<std::size_t>(focal) * 2 + static_cast<std::size_t>(opponent);
}

}  // namespace

PayoffBook::PayoffBook(const GameParams& params, std::span<const AuditAnchors> anchors)
    : params_(params) {
  auto add = [&](const AuditProbability& theta) {
    Table t{};
    const std::array<double, 2> levels{params.d_low, params.d_high};
    for (std::size_t level = 0; level < 2; ++level) {
      for (Strategy f : {Strategy::C, Strategy::D}) {
        for (Strategy o : {Strategy::C, Strategy::D}) {
          t[slot(level, f, o)] = vatgame::payoff(f, o, levels[level], params, theta);
        }
      }
    }
    tables_.push_back(t);
    thetas_.push_back(theta);
  };
  if (anchors.empty()) {
    add(build_theta(params));
  } else {
    tables_.reserve(anchors.size());
    thetas_.reserve(anchors.size());
    for (const AuditAnchors& a : anchors) add(build_theta(params, a.low, a.high));
  }
}

double PayoffBook::payoff(std::size_t agent, Strategy focal, Strategy opponent,
                          double d) const {
  if (d == params_.d_low) return table(agent)[slot(0, focal, opponent)];
  if (d == params_.d_high) return table(agent)[slot(1, focal, opponent)];
  const auto& theta = thetas_.size() == 1 ? thetas_[0] : thetas_[agent];
  return vatgame::payoff(focal, opponent, d, params_, theta);
}

namespace {

Strategy mutate(Strategy current, double mu, Rng& rng) {
  // The replacement is drawn from {C, D}, so it may equal the current one.
  if (rng.uniform() < mu) return rng.bernoulli(0.5) ? Strategy::C : Strategy::D;
  return current;
}

}  // namespace

NetworkDynamics::NetworkDynamics(const WeightedNetwork& net, const GameParams& params,
                                 std::span<const AuditAnchors> anchors)
    : net_(net), params_(params), book_(params, anchors) {
  params_.validate();
  if (!anchors.empty() && anchors.size() != net.node_count()) {
    throw Error(ErrorCode::SizeMismatch,
                fmt::format("{} anchors for {} agents", anchors.size(), net.node_count()));
  }
  if (net.edge_count() > 0 && net.weights().empty()) {
    throw Error(ErrorCode::InvalidParams, "network edges carry no tax-debt weights");
  }
}

void NetworkDynamics::check(const PopulationState& state) const {
  if (state.strategies.size() != net_.node_count()) {
    throw Error(ErrorCode::SizeMismatch,
                fmt::format("{} strategies for {} nodes", state.strategies.size(),
                            net_.node_count()));
  }
}

void NetworkDynamics::compute_fitness(PopulationState& state) const {
  check(state);
  state.fitness.assign(state.size(), 0.0);
  const auto& s = state.strategies;
  const auto& weights = net_.weights();
  for (NodeId i = 0; i < net_.node_count(); ++i) {
    const auto nbrs = net_.neighbors(i);
    if (nbrs.empty()) continue;
    const auto ids = net_.incident_edges(i);
    double sum = 0.0;
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      sum += book_.payoff(i, s[i], s[nbrs[k]], weights[ids[k]]);
    }
    state.fitness[i] = sum / static_cast<double>(nbrs.size());
  }
}

Strategy NetworkDynamics::decide(std::size_t agent, const PopulationState& state,
                                 std::uint64_t run_seed) const {
  Rng rng(run_seed, {tag(StreamTag::Imitation), agent, state.step});
  Strategy next = state.strategies[agent];
  const auto nbrs = net_.neighbors(static_cast<NodeId>(agent));
  if (!nbrs.empty()) {
    const NodeId model = nbrs[rng.below(nbrs.size())];
    if (rng.uniform() < fermi_prob(state.fitness[agent], state.fitness[model], params_.beta)) {
      next = state.strategies[model];
    }
  }
  return mutate(next, params_.mu, rng);
}

void NetworkDynamics::step(PopulationState& state, std::uint64_t run_seed) const {
  compute_fitness(state);
  std::vector<Strategy> next(state.size());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] = decide(i, state, run_seed);
  state.strategies = std::move(next);
  ++state.step;
}

WellMixedDynamics::WellMixedDynamics(std::size_t population, const GameParams& params,
                                     std::size_t n_partners,
                                     std::span<const AuditAnchors> anchors)
    : population_(population), params_(params), n_partners_(n_partners), book_(params, anchors) {
  params_.validate();
  if (n_partners < 1 || n_partners >= population) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("need 1 <= n_partners < Z (n_partners={}, Z={})", n_partners,
                            population));
  }
  if (!anchors.empty() && anchors.size() != population) {
    throw Error(ErrorCode::SizeMismatch,
                fmt::format("{} anchors for {} agents", anchors.size(), population));
  }
}

void WellMixedDynamics::check(const PopulationState& state) const {
  if (state.strategies.size() != population_) {
    throw Error(ErrorCode::SizeMismatch,
                fmt::format("{} strategies for population {}", state.strategies.size(),
                            population_));
  }
}

void WellMixedDynamics::compute_fitness(PopulationState& state,
                                        std::uint64_t run_seed) const {
  check(state);
  state.fitness.assign(population_, 0.0);
  std::vector<std::uint64_t> partners;
  partners.reserve(n_partners_);
  for (std::size_t i = 0; i < population_; ++i) {
    Rng rng(run_seed, {tag(StreamTag::Interaction), i, state.step});
    partners.clear();
    double sum = 0.0;
    while (partners.size() < n_partners_) {
      std::uint64_t j = rng.below(population_ - 1);
      if (j >= i) ++j;  // skip self
      if (std::find(partners.begin(), partners.end(), j) != partners.end()) continue;
      partners.push_back(j);
      const double d = rng.bernoulli(params_.prob_high) ? params_.d_high : params_.d_low;
      sum += book_.payoff(i, state.strategies[i], state.strategies[j], d);
    }
    state.fitness[i] = sum / static_cast<double>(n_partners_);
  }
}

Strategy WellMixedDynamics::decide(std::size_t agent, const PopulationState& state,
                                   std::uint64_t run_seed) const {
  Rng rng(run_seed, {tag(StreamTag::Imitation), agent, state.step});
  Strategy next = state.strategies[agent];
  std::uint64_t model = rng.below(population_ - 1);
  if (model >= agent) ++model;
  if (rng.uniform() < fermi_prob(state.fitness[agent], state.fitness[model], params_.beta)) {
    next = state.strategies[model];
  }
  return mutate(next, params_.mu, rng);
}

void WellMixedDynamics::step(PopulationState& state, std::uint64_t run_seed) const {
  compute_fitness(state, run_seed);
  std::vector<Strategy> next(population_);
  for (std::size_t i = 0; i < population_; ++i) next[i] = decide(i, state, run_seed);
  state.strategies = std::move(next);
  ++state.step;
}

std::vector<double> compute_fitness(const PopulationState& state, const WeightedNetwork& net,
                                    const GameParams& params) {
  PopulationState copy = state;
  NetworkDynamics(net, params, state.anchors).compute_fitness(copy);
  return std::move(copy.fitness);
}

PopulationState step(const PopulationState& state, const WeightedNetwork& net,
                     const GameParams& params, std::uint64_t run_seed) {
  PopulationState next = state;
  NetworkDynamics(net, params, state.anchors).step(next, run_seed);
  return next;
}

PopulationState step_well_mixed(const PopulationState& state, const GameParams& params,
                                std::uint64_t run_seed, std::size_t n_partners) {
  PopulationState next = state;
  WellMixedDynamics(state.size(), params, n_partners, state.anchors).step(next, run_seed);
  return next;
}

void write_trajectory(std::ostream& out, std::span<const double> trajectory) {
  out << "step,coop_freq\n";
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    fmt::print(out, "{},{:.6f}\n", t, trajectory[t]);
  }
}

}  // namespace vatgame
