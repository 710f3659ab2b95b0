#pragma once

// Flat `key = value` configuration documents and named-field access shared by
// config files, CLI overrides and sweep axes.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vatgame/sim.hpp"

namespace vatgame {

/// Sets any config key from its textual value. Throws Error(UnknownKey) for
/// unrecognised keys and Error(ParseError) for malformed values.
void set_parameter(SimConfig& config, std::string_view key, std::string_view value);

/// Sets a numeric field by name. Throws Error(UnknownAxis) for names that are
/// not numeric fields.
void set_numeric(SimConfig& config, std::string_view name, double value);

/// Canonical names of every field accepted by set_numeric.
std::vector<std::string> numeric_fields();

/// Parses `key = value` lines (`#` starts a comment, strings may be quoted)
/// on top of `base`. Errors carry the line number.
SimConfig parse_config(std::istream& in, SimConfig base = {});
SimConfig load_config(const std::string& path, SimConfig base = {});

/// Writes a document that parse_config reads back to the same config.
void write_config(std::ostream& out, const SimConfig& config);

/// `name:lo..hi:count` or `name:v1|v2|...`, several separated by commas.
std::vector<Axis> parse_axes(std::string_view spec);

/// `v1|v2|...` or `lo..hi:count`.
std::vector<double> parse_values(std::string_view spec);

std::string_view to_string(TopologyKind kind);

}  // namespace vatgame
