#include "vatgame/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace vatgame {

namespace {

std::size_t to_count(std::string_view name, double v) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) {
    throw Error(ErrorCode::ParseError,
                fmt::format("{} must be a non-negative integer (got {})", name, v));
  }
  return static_cast<std::size_t>(v);
}

struct NumericField {
  std::string_view name;
  std::string_view alias;
  std::function<void(SimConfig&, double)> set;
  std::function<double(const SimConfig&)> get;
};

#define VATGAME_REAL(NAME, ALIAS, MEMBER)                      \
  NumericField {                                               \
    NAME, ALIAS, [](SimConfig& c, double v) { c.MEMBER = v; }, \
        [](const SimConfig& c) { return static_cast<double>(c.MEMBER); } \
  }
#define VATGAME_COUNT(NAME, ALIAS, MEMBER)                                   \
  NumericField {                                                             \
    NAME, ALIAS, [](SimConfig& c, double v) { c.MEMBER = to_count(NAME, v); }, \
        [](const SimConfig& c) { return static_cast<double>(c.MEMBER); }     \
  }

const std::vector<NumericField>& fields() {
  static const std::vector<NumericField> table = {
      VATGAME_REAL("reward", "R", params.reward),
      VATGAME_REAL("inspection_cost", "gamma_cost", params.inspection_cost),
      VATGAME_REAL("fine", "phi", params.fine),
      VATGAME_REAL("alpha", "", params.alpha),
      VATGAME_REAL("d_low", "", params.d_low),
      VATGAME_REAL("d_high", "", params.d_high),
      VATGAME_REAL("prob_high", "", params.prob_high),
      VATGAME_REAL("theta_low", "", params.theta_low),
      VATGAME_REAL("theta_high", "", params.theta_high),
      VATGAME_REAL("beta", "", params.beta),
      VATGAME_REAL("mu", "", params.mu),
      VATGAME_COUNT("population", "Z", population),
      VATGAME_COUNT("steps", "", steps),
      VATGAME_COUNT("runs", "", runs),
      VATGAME_REAL("init_coop_freq", "", init_coop_freq),
      VATGAME_REAL("measure_fraction", "", measure_fraction),
      VATGAME_REAL("diversity_sigma", "sigma", diversity_sigma),
      VATGAME_COUNT("m", "", topology.m),
      VATGAME_REAL("rewire_p", "", topology.rewire_p),
      VATGAME_REAL("rewire_attempts_per_edge", "", topology.rewire_attempts_per_edge),
      VATGAME_REAL("powerlaw_exponent", "", topology.powerlaw_exponent),
      VATGAME_COUNT("k_min", "", topology.k_min),
      VATGAME_COUNT("k_max", "", topology.k_max),
      VATGAME_COUNT("n_partners", "", topology.n_partners),
  };
  return table;
}

#undef VATGAME_REAL
#undef VATGAME_COUNT

const NumericField* find_field(std::string_view name) {
  for (const auto& f : fields()) {
    if (f.name == name || (!f.alias.empty() && f.alias == name)) return &f;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(ErrorCode::ParseError, fmt::format("{}: '{}' is not a number", what, text));
  }
  return v;
}

TopologyKind parse_topology(std::string_view v) {
  if (v == "well_mixed" || v == "well-mixed") return TopologyKind::WellMixed;
  if (v == "ba") return TopologyKind::BarabasiAlbert;
  if (v == "xbs") return TopologyKind::Xbs;
  if (v == "powerlaw") return TopologyKind::PowerLawConfig;
  if (v == "file") return TopologyKind::File;
  throw Error(ErrorCode::ParseError,
              fmt::format("topology '{}' is not one of well_mixed, ba, xbs, powerlaw, file", v));
}

RewireMode parse_mode(std::string_view v) {
  if (v == "assortative") return RewireMode::Assortative;
  if (v == "disassortative") return RewireMode::Disassortative;
  throw Error(ErrorCode::ParseError,
              fmt::format("rewire_mode '{}' is not assortative or disassortative", v));
}

}  // namespace

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::WellMixed: return "well_mixed";
    case TopologyKind::BarabasiAlbert: return "ba";
    case TopologyKind::Xbs: return "xbs";
    case TopologyKind::PowerLawConfig: return "powerlaw";
    case TopologyKind::File: return "file";
  }
  return "?";
}

std::vector<std::string> numeric_fields() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.name);
  return out;
}

void set_numeric(SimConfig& config, std::string_view name, double value) {
  const NumericField* f = find_field(name);
  if (!f) {
    throw Error(ErrorCode::UnknownAxis, fmt::format("'{}' is not a numeric parameter", name));
  }
  f->set(config, value);
}

void set_parameter(SimConfig& config, std::string_view key, std::string_view value) {
  value = unquote(trim(value));
  if (key == "topology") {
    config.topology.kind = parse_topology(value);
  } else if (key == "rewire_mode") {
    config.topology.rewire_mode = parse_mode(value);
  } else if (key == "ba_links") {
    if (value == "fixed") {
      config.topology.ba_links = BaLinks::Fixed;
    } else if (value == "uniform") {
      config.topology.ba_links = BaLinks::UniformUpToM;
    } else {
      throw Error(ErrorCode::ParseError,
                  fmt::format("ba_links '{}' is not fixed or uniform", value));
    }
  } else if (key == "edge_file") {
    config.topology.edge_file = std::string(value);
  } else if (key == "seed" || key == "master_seed") {
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
      throw Error(ErrorCode::ParseError, fmt::format("seed '{}' is not an integer", value));
    }
    config.master_seed = seed;
  } else if (const NumericField* f = find_field(key)) {
    f->set(config, parse_double(value, key));
  } else {
    throw Error(ErrorCode::UnknownKey, fmt::format("unknown config key '{}'", key));
  }
}

SimConfig parse_config(std::istream& in, SimConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    // '#' inside a quoted value is kept.
    bool quoted = false;
    for (std::size_t i = 0; i < view.size(); ++i) {
      if (view[i] == '"') quoted = !quoted;
      if (view[i] == '#' && !quoted) {
        view = view.substr(0, i);
        break;
      }
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, fmt::format("line {}: expected key = value", line_no));
    }
    const auto key = trim(view.substr(0, eq));
    try {
      set_parameter(base, key, view.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return base;
}

SimConfig load_config(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open {}", path));
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const SimConfig& config) {
  fmt::print(out, "topology = \"{}\"\n", to_string(config.topology.kind));
  fmt::print(out, "rewire_mode = \"{}\"\n",
             config.topology.rewire_mode == RewireMode::Assortative ? "assortative"
                                                                    : "disassortative");
  fmt::print(out, "ba_links = \"{}\"\n",
             config.topology.ba_links == BaLinks::Fixed ? "fixed" : "uniform");
  if (!config.topology.edge_file.empty()) {
    fmt::print(out, "edge_file = \"{}\"\n", config.topology.edge_file);
  }
  fmt::print(out, "seed = {}\n", config.master_seed);
  for (const auto& f : fields()) fmt::print(out, "{} = {}\n", f.name, f.get(config));
}

std::vector<double> parse_values(std::string_view spec) {
  spec = trim(spec);
  std::vector<double> out;
  if (const auto dots = spec.find(".."); dots != std::string_view::npos) {
    const auto colon = spec.find(':', dots);
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, fmt::format("range '{}' needs lo..hi:count", spec));
    }
    const double lo = parse_double(spec.substr(0, dots), "range start");
    const double hi = parse_double(spec.substr(dots + 2, colon - dots - 2), "range end");
    const std::size_t count = to_count("range count", parse_double(spec.substr(colon + 1), "count"));
    if (count == 0) throw Error(ErrorCode::ParseError, "range count must be >= 1");
    for (std::size_t i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      // Snap to 12 significant digits so 0.1 steps print as 0.3, not 0.30000000000000004.
      const double v = lo + (hi - lo) * t;
      out.push_back(std::stod(fmt::format("{:.12g}", v)));
    }
    return out;
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto bar = spec.find('|', start);
    const auto piece = spec.substr(start, bar == std::string_view::npos ? spec.npos : bar - start);
    out.push_back(parse_double(piece, "value"));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

std::vector<Axis> parse_axes(std::string_view spec) {
  std::vector<Axis> axes;
  std::size_t start = 0;
  while (start < spec.size()) {
    auto comma = spec.find(',', start);
    if (comma == std::string_view::npos) comma = spec.size();
    const auto item = trim(spec.substr(start, comma - start));
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::ParseError,
                  fmt::format("axis '{}' needs name:lo..hi:count or name:v1|v2", item));
    }
    Axis axis{std::string(trim(item.substr(0, colon))), parse_values(item.substr(colon + 1))};
    if (!find_field(axis.name)) {
      throw Error(ErrorCode::UnknownAxis,
                  fmt::format("'{}' is not a numeric parameter", axis.name));
    }
    axes.push_back(std::move(axis));
    start = comma + 1;
  }
  return axes;
}

}  // namespace vatgame
