#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>

#include "vatgame/config.hpp"

using namespace vatgame;

namespace {

ErrorCode code_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("parse a config document") {
  std::istringstream in(
      "# desk run\n"
      "topology = \"xbs\"\n"
      "rewire_mode = disassortative   # trailing comment\n"
      "alpha = 0.45\n"
      "Z = 2000\n"
      "gamma_cost = 2\n"
      "ba_links = fixed\n"
      "seed = 77\n"
      "\n");
  const SimConfig c = parse_config(in);
  CHECK(c.topology.kind == TopologyKind::Xbs);
  CHECK(c.topology.rewire_mode == RewireMode::Disassortative);
  CHECK(c.params.alpha == 0.45);
  CHECK(c.population == 2000);
  CHECK(c.params.inspection_cost == 2.0);
  CHECK(c.topology.ba_links == BaLinks::Fixed);
  CHECK(c.master_seed == 77);
  CHECK(c.params.reward == 1.0);
}

TEST_CASE("config round trip") {
  SimConfig c;
  c.params.theta_low = 0.8;
  c.params.theta_high = 0.2;
  c.params.prob_high = 0.5;
  c.topology.kind = TopologyKind::File;
  c.topology.edge_file = "net # one.csv";
  c.diversity_sigma = 0.4;
  c.steps = 777;
  c.master_seed = 123456789012345ULL;
  std::ostringstream out;
  write_config(out, c);
  std::istringstream in(out.str());
  const SimConfig back = parse_config(in);
  std::ostringstream again;
  write_config(again, back);
  CHECK(again.str() == out.str());
  CHECK(back.topology.edge_file == "net # one.csv");
  CHECK(back.steps == 777);
  CHECK(back.master_seed == c.master_seed);
}

TEST_CASE("config errors") {
  CHECK(code_of("colour = blue\n") == ErrorCode::UnknownKey);
  CHECK(code_of("alpha = lots\n") == ErrorCode::ParseError);
  CHECK(code_of("just text\n") == ErrorCode::ParseError);
  CHECK(code_of("steps = 10.5\n") == ErrorCode::ParseError);
  CHECK(code_of("runs = -1\n") == ErrorCode::ParseError);
  CHECK(code_of("topology = ring\n") == ErrorCode::ParseError);
  CHECK(code_of("seed = 1e3\n") == ErrorCode::ParseError);

  std::istringstream in("alpha = 0.1\nbeta = ?\n");
  try {
    parse_config(in);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("numeric fields by name") {
  SimConfig c;
  set_numeric(c, "fine", 2.0);
  set_numeric(c, "phi", 2.5);
  CHECK(c.params.fine == 2.5);
  set_numeric(c, "sigma", 0.3);
  CHECK(c.diversity_sigma == 0.3);
  CHECK_THROWS_AS(set_numeric(c, "topology", 1.0), Error);
  const auto names = numeric_fields();
  CHECK(std::find(names.begin(), names.end(), "theta_low") != names.end());
  CHECK(std::find(names.begin(), names.end(), "mu") != names.end());
}

TEST_CASE("value lists and ranges") {
  CHECK(parse_values("0..1:11").size() == 11);
  CHECK(parse_values("0..1:11")[3] == 0.3);
  CHECK(parse_values("0..1:11").back() == 1.0);
  CHECK(parse_values("0.5..0.5:1") == std::vector<double>{0.5});
  CHECK(parse_values("1|1.5|2") == std::vector<double>{1.0, 1.5, 2.0});
  CHECK_THROWS_AS(parse_values("0..1"), Error);
  CHECK_THROWS_AS(parse_values("0..1:0"), Error);
  CHECK_THROWS_AS(parse_values("1||2"), Error);
}

TEST_CASE("axis specifications") {
  const auto axes = parse_axes("theta_low:0..1:11,theta_high:0.2|0.8");
  REQUIRE(axes.size() == 2);
  CHECK(axes[0].name == "theta_low");
  CHECK(axes[0].values.size() == 11);
  CHECK(axes[1].values == std::vector<double>{0.2, 0.8});
  try {
    parse_axes("gamma_ray:1|2");
    FAIL("expected UnknownAxis");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownAxis);
  }
  CHECK_THROWS_AS(parse_axes("alpha"), Error);
}
