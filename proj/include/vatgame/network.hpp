#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vatgame/error.hpp"

namespace vatgame {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected simple graph with an optional tax-debt weight per edge.
///
/// Immutable once built. Adjacency is stored in compressed rows; each row
/// entry remembers the edge index so the weight can be looked up.
class WeightedNetwork {
 public:
  WeightedNetwork() = default;

  /// Throws Error(InvalidParams) on self-loops, duplicate edges, out-of-range
  /// endpoints or a weight vector whose size differs from the edge count.
  WeightedNetwork(std::size_t node_count, std::vector<Edge> edges,
                  std::vector<double> weights = {});

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool weighted() const noexcept { return !weights_.empty() || edges_.empty(); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(std::size_t edge_index) const { return weights_.at(edge_index); }

  std::size_t degree(NodeId n) const noexcept { return offsets_[n + 1] - offsets_[n]; }
  std::span<const NodeId> neighbors(NodeId n) const noexcept {
    return {neighbors_.data() + offsets_[n], degree(n)};
  }
  /// Edge indices aligned with neighbors(n).
  std::span<const std::uint32_t> incident_edges(NodeId n) const noexcept {
    return {edge_ids_.data() + offsets_[n], degree(n)};
  }
  bool has_edge(NodeId a, NodeId b) const noexcept;

  std::vector<std::size_t> degrees() const;

  WeightedNetwork with_weights(std::vector<double> weights) const;

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
  std::vector<std::uint32_t> edge_ids_;
};

/// Links added per new node: exactly m, or uniform on 1..m (average degree
/// about m + 1 instead of 2m).
enum class BaLinks : std::uint8_t { Fixed, UniformUpToM };

/// Preferential attachment: a complete seed graph on m+1 nodes, then every new
/// node links to distinct existing nodes chosen proportionally to degree.
WeightedNetwork generate_ba(std::size_t node_count, std::size_t m, std::uint64_t seed,
                            BaLinks links = BaLinks::Fixed);

enum class RewireMode : std::uint8_t { Assortative, Disassortative };

/// Degree-preserving rewiring with an assortativity bias (Xulvi-Brunet and
/// Sokolov). With probability p an edge pair is rewired by degree order,
/// otherwise at random. Moves that would create a multi-edge are discarded.
/// Edge weights, if any, stay with their edge slot.
WeightedNetwork rewire_xbs(const WeightedNetwork& net, double p, RewireMode mode,
                           std::size_t attempts, std::uint64_t seed);

/// Configuration model over a truncated discrete power-law degree sequence.
/// Self-loops and multi-edges are dropped after stub matching.
WeightedNetwork generate_powerlaw_config(std::size_t node_count, double gamma,
                                         std::size_t k_min, std::size_t k_max,
                                         std::uint64_t seed);

/// Configuration model for an explicit degree sequence (sum must be even).
WeightedNetwork configuration_model(std::span<const std::size_t> degrees, std::uint64_t seed);

/// Each edge independently gets d_high with probability prob_high, else d_low.
WeightedNetwork assign_weights(const WeightedNetwork& net, double prob_high, double d_low,
                               double d_high, std::uint64_t seed);

struct NetworkMetrics {
  double average_degree = 0.0;
  double clustering = 0.0;
  std::size_t diameter = 0;
  double assortativity = 0.0;
  std::size_t largest_component = 0;
};

/// Table-style summary. Throws Error(EmptyGraph) when there are no edges.
NetworkMetrics metrics(const WeightedNetwork& net, unsigned threads = 1);

double average_clustering(const WeightedNetwork& net);
double degree_assortativity(const WeightedNetwork& net);
/// Exact diameter of the largest connected component (BFS from every node).
std::size_t lcc_diameter(const WeightedNetwork& net, unsigned threads = 1);

/// Edge list I/O: header `src,dst,weight`, one `u,v,w` row per edge.
void write_edge_list(std::ostream& out, const WeightedNetwork& net);
void write_edge_list(const std::string& path, const WeightedNetwork& net);
/// The node count is max id + 1 unless `node_count` is larger.
WeightedNetwork read_edge_list(std::istream& in, std::size_t node_count = 0);
WeightedNetwork read_edge_list(const std::string& path, std::size_t node_count = 0);

}  // namespace vatgame
