#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vatgame/network.hpp"

namespace vatgame {

void write_edge_list(std::ostream& out, const WeightedNetwork& net) {
  if (net.edge_count() > 0 && net.weights().empty()) {
    throw Error(ErrorCode::InvalidParams, "cannot write an unweighted network");
  }
  out << "src,dst,weight\n";
  const auto& edges = net.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    fmt::print(out, "{},{},{}\n", edges[i].u, edges[i].v, net.weight(i));
  }
}

void write_edge_list(const std::string& path, const WeightedNetwork& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path));
  write_edge_list(out, net);
}

namespace {

template <class T>
bool parse_field(std::string_view text, T& value) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

WeightedNetwork read_edge_list(std::istream& in, std::size_t node_count) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::ParseError, "edge list is empty (missing header)");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "src,dst,weight") {
    throw Error(ErrorCode::ParseError, "line 1: expected header src,dst,weight");
  }
  std::vector<Edge> edges;
  std::vector<double> weights;
  std::size_t max_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string_view view(line);
    const auto c1 = view.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
    NodeId u = 0;
    NodeId v = 0;
    double w = 0.0;
    if (c2 == std::string_view::npos || !parse_field(view.substr(0, c1), u) ||
        !parse_field(view.substr(c1 + 1, c2 - c1 - 1), v) ||
        !parse_field(view.substr(c2 + 1), w)) {
      throw Error(ErrorCode::ParseError, fmt::format("line {}: expected u,v,weight", line_no));
    }
    edges.push_back({u, v});
    weights.push_back(w);
    max_id = std::max<std::size_t>(max_id, std::max(u, v));
  }
  const std::size_t z = edges.empty() ? node_count : std::max(node_count, max_id + 1);
  return WeightedNetwork(z, std::move(edges), std::move(weights));
}

WeightedNetwork read_edge_list(const std::string& path, std::size_t node_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open {}", path));
  return read_edge_list(in, node_count);
}

}  // namespace vatgame
