#include "vatgame/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <thread>
#include <unordered_set>
#include <utility>

#include <fmt/format.h>

#include "vatgame/powerlaw.hpp"
#include "vatgame/rng.hpp"

namespace vatgame {

namespace {

std::uint64_t edge_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Fisher-Yates with the engine's own bounded draw, so the permutation does
// not depend on the standard library's shuffle implementation.
template <class T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

}  // namespace

WeightedNetwork::WeightedNetwork(std::size_t node_count, std::vector<Edge> edges,
                                 std::vector<double> weights)
    : node_count_(node_count), edges_(std::move(edges)), weights_(std::move(weights)) {
  if (!weights_.empty() && weights_.size() != edges_.size()) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("{} weights for {} edges", weights_.size(), edges_.size()));
  }
  if (edges_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::InvalidParams, "too many edges");
  }
  offsets_.assign(node_count_ + 1, 0);
  for (const Edge& e : edges_) {
    if (e.u >= node_count_ || e.v >= node_count_) {
      throw Error(ErrorCode::InvalidParams,
                  fmt::format("edge ({}, {}) outside {} nodes", e.u, e.v, node_count_));
    }
    if (e.u == e.v) {
      throw Error(ErrorCode::InvalidParams, fmt::format("self-loop on node {}", e.u));
    }
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());

  std::vector<std::pair<NodeId, std::uint32_t>> slots(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    slots[cursor[e.u]++] = {e.v, i};
    slots[cursor[e.v]++] = {e.u, i};
  }
  neighbors_.resize(slots.size());
  edge_ids_.resize(slots.size());
  for (std::size_t n = 0; n < node_count_; ++n) {
    auto first = slots.begin() + static_cast<std::ptrdiff_t>(offsets_[n]);
    auto last = slots.begin() + static_cast<std::ptrdiff_t>(offsets_[n + 1]);
    std::sort(first, last);
    for (auto it = first; it != last; ++it) {
      if (it != first && std::prev(it)->first == it->first) {
        throw Error(ErrorCode::InvalidParams,
                    fmt::format("duplicate edge ({}, {})", n, it->first));
      }
      const auto k = static_cast<std::size_t>(it - slots.begin());
      neighbors_[k] = it->first;
      edge_ids_[k] = it->second;
    }
  }
}

bool WeightedNetwork::has_edge(NodeId a, NodeId b) const noexcept {
  if (a >= node_count_ || b >= node_count_) return false;
  if (degree(a) > degree(b)) std::swap(a, b);
  auto row = neighbors(a);
  return std::binary_search(row.begin(), row.end(), b);
}

std::vector<std::size_t> WeightedNetwork::degrees() const {
  std::vector<std::size_t> out(node_count_);
  for (std::size_t n = 0; n < node_count_; ++n) out[n] = degree(static_cast<NodeId>(n));
  return out;
}

WeightedNetwork WeightedNetwork::with_weights(std::vector<double> weights) const {
  return WeightedNetwork(node_count_, edges_, std::move(weights));
}

WeightedNetwork generate_ba(std::size_t node_count, std::size_t m, std::uint64_t seed,
                            BaLinks links) {
  if (m < 1 || node_count <= m) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("BA needs Z > m >= 1 (Z={}, m={})", node_count, m));
  }
  Rng rng(seed, {tag(StreamTag::Topology)});
  std::vector<Edge> edges;
  edges.reserve(m * (m + 1) / 2 + (node_count - m - 1) * m);
  // Every node appears once per unit of degree.
  std::vector<NodeId> ends;
  ends.reserve(2 * edges.capacity());

  for (NodeId a = 0; a <= m; ++a) {
    for (NodeId b = a + 1; b <= m; ++b) {
      edges.push_back({a, b});
      ends.push_back(a);
      ends.push_back(b);
    }
  }

  std::vector<NodeId> targets;
  targets.reserve(m);
  for (auto node = static_cast<NodeId>(m + 1); node < node_count; ++node) {
    targets.clear();
    const std::size_t k = links == BaLinks::Fixed ? m : 1 + rng.below(m);
    while (targets.size() < k) {
      const NodeId pick = ends[rng.below(ends.size())];
      if (std::find(targets.begin(), targets.end(), pick) == targets.end()) {
        targets.push_back(pick);
      }
    }
    for (NodeId t : targets) {
      edges.push_back({t, node});
      ends.push_back(t);
      ends.push_back(node);
    }
  }
  return WeightedNetwork(node_count, std::move(edges));
}

WeightedNetwork rewire_xbs(const WeightedNetwork& net, double p, RewireMode mode,
                           std::size_t attempts, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "rewiring bias p must lie in [0,1]");
  }
  std::vector<Edge> edges = net.edges();
  if (attempts == 0 || edges.size() < 2) return net;

  const std::vector<std::size_t> deg = net.degrees();
  std::unordered_set<std::uint64_t> present;
  present.reserve(edges.size() * 2);
  for (const Edge& e : edges) present.insert(edge_key(e.u, e.v));

  Rng rng(seed, {tag(StreamTag::Rewire)});
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    const std::size_t i = rng.below(edges.size());
    const std::size_t j = rng.below(edges.size());
    const bool biased = rng.bernoulli(p);
    const bool coin = rng.bernoulli(0.5);
    if (i == j) continue;
    const Edge e1 = edges[i];
    const Edge e2 = edges[j];
    if (e1.u == e2.u || e1.u == e2.v || e1.v == e2.u || e1.v == e2.v) continue;

    Edge n1;
    Edge n2;
    if (biased) {
      std::array<NodeId, 4> q{e1.u, e1.v, e2.u, e2.v};
      std::sort(q.begin(), q.end(), [&](NodeId a, NodeId b) {
        return deg[a] != deg[b] ? deg[a] > deg[b] : a < b;
      });
      if (mode == RewireMode::Assortative) {
        n1 = {q[0], q[1]};
        n2 = {q[2], q[3]};
      } else {
        n1 = {q[0], q[3]};
        n2 = {q[1], q[2]};
      }
    } else if (coin) {
      n1 = {e1.u, e2.u};
      n2 = {e1.v, e2.v};
    } else {
      n1 = {e1.u, e2.v};
      n2 = {e1.v, e2.u};
    }
    // Two perfect matchings of the same four nodes are either identical or
    // disjoint, so checking membership alone rules out multi-edges.
    const std::uint64_t k1 = edge_key(n1.u, n1.v);
    const std::uint64_t k2 = edge_key(n2.u, n2.v);
    if (present.contains(k1) || present.contains(k2)) continue;
    present.erase(edge_key(e1.u, e1.v));
    present.erase(edge_key(e2.u, e2.v));
    present.insert(k1);
    present.insert(k2);
    edges[i] = n1;
    edges[j] = n2;
  }
  return WeightedNetwork(net.node_count(), std::move(edges), net.weights());
}

WeightedNetwork configuration_model(std::span<const std::size_t> degrees,
                                    std::uint64_t seed) {
  std::vector<NodeId> stubs;
  stubs.reserve(std::accumulate(degrees.begin(), degrees.end(), std::size_t{0}));
  for (std::size_t n = 0; n < degrees.size(); ++n) {
    stubs.insert(stubs.end(), degrees[n], static_cast<NodeId>(n));
  }
  if (stubs.size() % 2 != 0) {
    throw Error(ErrorCode::InvalidParams, "degree sum must be even");
  }
  Rng rng(seed, {tag(StreamTag::Topology), 1});
  shuffle_in_place(stubs, rng);

  std::vector<Edge> edges;
  edges.reserve(stubs.size() / 2);
  std::unordered_set<std::uint64_t> present;
  present.reserve(stubs.size());
  for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
    const NodeId a = stubs[k];
    const NodeId b = stubs[k + 1];
    if (a == b) continue;
    if (!present.insert(edge_key(a, b)).second) continue;
    edges.push_back({std::min(a, b), std::max(a, b)});
  }
  return WeightedNetwork(degrees.size(), std::move(edges));
}

WeightedNetwork generate_powerlaw_config(std::size_t node_count, double gamma,
                                         std::size_t k_min, std::size_t k_max,
                                         std::uint64_t seed) {
  if (!(gamma > 2.0)) {
    throw Error(ErrorCode::InvalidParams, fmt::format("gamma must exceed 2 (got {})", gamma));
  }
  if (k_min < 1 || k_min > k_max || node_count < 2 || k_max > node_count - 1) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("need 1 <= k_min <= k_max <= Z-1 (k_min={}, k_max={}, Z={})",
                            k_min, k_max, node_count));
  }
  const DiscretePowerLaw law(gamma, k_min, k_max);
  Rng rng(seed, {tag(StreamTag::Topology), 0});
  std::vector<std::size_t> degrees(node_count);
  std::size_t total = 0;
  for (auto& k : degrees) {
    k = law.sample(rng);
    total += k;
  }
  while (total % 2 != 0) {
    total -= degrees.back();
    degrees.back() = law.sample(rng);
    total += degrees.back();
  }
  return configuration_model(degrees, seed);
}

WeightedNetwork assign_weights(const WeightedNetwork& net, double prob_high, double d_low,
                               double d_high, std::uint64_t seed) {
  if (!(prob_high >= 0.0 && prob_high <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "prob_high must lie in [0,1]");
  }
  Rng rng(seed, {tag(StreamTag::Weights)});
  std::vector<double> w(net.edge_count());
  for (double& x : w) x = rng.bernoulli(prob_high) ? d_high : d_low;
  return net.with_weights(std::move(w));
}

double average_clustering(const WeightedNetwork& net) {
  const std::size_t z = net.node_count();
  if (z == 0) return 0.0;
  std::vector<std::uint8_t> mark(z, 0);
  double total = 0.0;
  for (NodeId i = 0; i < z; ++i) {
    const auto nbrs = net.neighbors(i);
    const std::size_t k = nbrs.size();
    if (k < 2) continue;
    for (NodeId j : nbrs) mark[j] = 1;
    std::size_t links = 0;
    for (NodeId j : nbrs) {
      for (NodeId l : net.neighbors(j)) links += mark[l];
    }
    for (NodeId j : nbrs) mark[j] = 0;
    // Each link among neighbours was counted from both ends.
    total += static_cast<double>(links) / static_cast<double>(k * (k - 1));
  }
  return total / static_cast<double>(z);
}

double degree_assortativity(const WeightedNetwork& net) {
  const double m = static_cast<double>(net.edge_count());
  if (m == 0.0) return 0.0;
  double prod = 0.0;
  double sum = 0.0;
  double sq = 0.0;
  for (const Edge& e : net.edges()) {
    const auto a = static_cast<double>(net.degree(e.u));
    const auto b = static_cast<double>(net.degree(e.v));
    prod += a * b;
    sum += 0.5 * (a + b);
    sq += 0.5 * (a * a + b * b);
  }
  const double mean = sum / m;
  const double denom = sq / m - mean * mean;
  if (denom <= 0.0) return 0.0;  // regular graph: correlation undefined
  return (prod / m - mean * mean) / denom;
}

namespace {

std::vector<NodeId> largest_component(const WeightedNetwork& net) {
  const std::size_t z = net.node_count();
  std::vector<std::int64_t> comp(z, -1);
  std::vector<NodeId> best;
  std::vector<NodeId> members;
  std::deque<NodeId> queue;
  for (NodeId s = 0; s < z; ++s) {
    if (comp[s] >= 0) continue;
    members.clear();
    comp[s] = s;
    queue.push_back(s);
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      members.push_back(u);
      for (NodeId v : net.neighbors(u)) {
        if (comp[v] < 0) {
          comp[v] = s;
          queue.push_back(v);
        }
      }
    }
    if (members.size() > best.size()) best = members;
  }
  return best;
}

std::size_t eccentricity(const WeightedNetwork& net, NodeId source,
                         std::vector<std::int32_t>& dist, std::vector<NodeId>& frontier) {
  std::fill(dist.begin(), dist.end(), -1);
  frontier.clear();
  frontier.push_back(source);
  dist[source] = 0;
  std::size_t head = 0;
  std::int32_t far = 0;
  while (head < frontier.size()) {
    const NodeId u = frontier[head++];
    far = std::max(far, dist[u]);
    for (NodeId v : net.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return static_cast<std::size_t>(far);
}

}  // namespace

std::size_t lcc_diameter(const WeightedNetwork& net, unsigned threads) {
  const std::vector<NodeId> lcc = largest_component(net);
  if (lcc.size() < 2) return 0;
  threads = std::max(1u, threads);
  std::vector<std::size_t> partial(threads, 0);
  auto work = [&](unsigned w) {
    std::vector<std::int32_t> dist(net.node_count());
    std::vector<NodeId> frontier;
    frontier.reserve(lcc.size());
    for (std::size_t k = w; k < lcc.size(); k += threads) {
      partial[w] = std::max(partial[w], eccentricity(net, lcc[k], dist, frontier));
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  return *std::max_element(partial.begin(), partial.end());
}

NetworkMetrics metrics(const WeightedNetwork& net, unsigned threads) {
  if (net.edge_count() == 0) {
    throw Error(ErrorCode::EmptyGraph, "network has no edges");
  }
  NetworkMetrics m;
  m.average_degree =
      2.0 * static_cast<double>(net.edge_count()) / static_cast<double>(net.node_count());
  m.clustering = average_clustering(net);
  m.diameter = lcc_diameter(net, threads);
  m.assortativity = degree_assortativity(net);
  m.largest_component = largest_component(net).size();
  return m;
}

}  // namespace vatgame
