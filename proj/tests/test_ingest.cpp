#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "vatgame/ingest.hpp"
#include "vatgame/rng.hpp"

using namespace vatgame;

namespace {

DeclarationRecord sale(std::string s, std::string b, double x) {
  return {std::move(s), std::move(b), x, Side::Sale};
}
DeclarationRecord purchase(std::string s, std::string b, double x) {
  return {std::move(s), std::move(b), x, Side::Purchase};
}

ErrorCode code_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    read_declarations(in, Side::Sale);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

std::string message_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    read_declarations(in, Side::Sale);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("mismatch ratio examples") {
  CHECK(mismatch_ratio(100, 100) == 0.0);
  CHECK(mismatch_ratio(0, 5) == 1.0);
  CHECK(mismatch_ratio(60, 100) == doctest::Approx(0.25));
  CHECK(mismatch_ratio(100, 60) == 0.0);
  CHECK_THROWS_AS(mismatch_ratio(0, 0), Error);
  CHECK_THROWS_AS(mismatch_ratio(-1, 2), Error);
}

TEST_CASE("mismatch ratio properties") {
  Rng rng(42);
  for (int i = 0; i < 100000; ++i) {
    const double s = rng.uniform() * 1000.0;
    const double b = rng.uniform() * 1000.0 + 1e-9;
    const double r = mismatch_ratio(s, b);
    REQUIRE(r >= 0.0);
    REQUIRE(r <= 1.0);
    if (b >= s) REQUIRE((r == 0.0) == (s == b));
    const double c = 0.01 + rng.uniform() * 100.0;
    REQUIRE(std::abs(mismatch_ratio(c * s, c * b) - r) < 1e-12);
    const double alpha = rng.uniform();
    const double d = 1.0 + rng.uniform() * 1000.0;
    REQUIRE(std::abs(mismatch_ratio((1 - alpha) * d, (1 + alpha) * d) - alpha) < 1e-12);
  }
}

TEST_CASE("merge examples") {
  SUBCASE("exact match kept by default") {
    const auto m = merge_declarations({sale("A", "B", 100)}, {purchase("A", "B", 100)});
    REQUIRE(m.size() == 1);
    CHECK(m[0].mismatch_ratio == 0.0);
    CHECK(merge_declarations({sale("A", "B", 100)}, {purchase("A", "B", 100)}, true).empty());
  }
  SUBCASE("no counterpart") {
    CHECK(merge_declarations({sale("A", "B", 100)}, {purchase("A", "C", 100)}).empty());
  }
  SUBCASE("under-declared sale") {
    const auto m = merge_declarations({sale("A", "B", 60)}, {purchase("A", "B", 100)});
    REQUIRE(m.size() == 1);
    CHECK(m[0].mismatch_ratio == doctest::Approx(0.25));
    CHECK(m[0].seller_declared == 60);
    CHECK(m[0].buyer_declared == 100);
  }
  SUBCASE("duplicates are summed per side") {
    const auto m = merge_declarations({sale("A", "B", 20), sale("A", "B", 40)},
                                      {purchase("A", "B", 100)});
    REQUIRE(m.size() == 1);
    CHECK(m[0].seller_declared == 60);
  }
  SUBCASE("direction matters") {
    CHECK(merge_declarations({sale("A", "B", 1)}, {purchase("B", "A", 1)}).empty());
  }
}

TEST_CASE("merge does not depend on row order") {
  const DeclarationFixture fx = synthetic_declarations(2000, 3);
  auto sales = fx.sales;
  auto purchases = fx.purchases;
  Rng rng(8);
  std::shuffle(sales.begin(), sales.end(), rng);
  std::shuffle(purchases.begin(), purchases.end(), rng);
  const auto a = merge_declarations(fx.sales, fx.purchases);
  const auto b = merge_declarations(sales, purchases);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].seller_id == b[i].seller_id);
    CHECK(a[i].buyer_id == b[i].buyer_id);
    CHECK(a[i].seller_declared == b[i].seller_declared);
    CHECK(a[i].buyer_declared == b[i].buyer_declared);
  }
}

TEST_CASE("quantile and empirical CDF") {
  CHECK(quantile({1, 2, 3, 4, 5}, 0.5) == 3.0);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({7}, 0.98) == 7.0);
  CHECK(quantile({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(quantile({4, 1, 3, 2}, 1.0) == 4.0);
  const EmpiricalCdf cdf({0.0, 0.0, 0.0, 0.3});
  CHECK(cdf(-0.1) == 0.0);
  CHECK(cdf(0.0) == 0.75);
  CHECK(cdf(0.29) == 0.75);
  CHECK(cdf(0.3) == 1.0);
}

TEST_CASE("calibration on equal weights") {
  std::vector<MatchedTransaction> m;
  for (int i = 0; i < 50; ++i) m.push_back({"S" + std::to_string(i), "B", 10, 10, 0});
  const CalibrationSummary s = calibration_summary(m);
  CHECK(s.ratio_r == 1.0);
  CHECK(s.prob_high == 0.0);
  CHECK(s.d_low == 10.0);
  CHECK_THROWS_AS(calibration_summary({}), Error);
}

TEST_CASE("calibration with three quarters exact") {
  std::vector<MatchedTransaction> m;
  for (int i = 0; i < 100; ++i) {
    const double ratio = i < 75 ? 0.0 : 0.3;
    m.push_back({"S" + std::to_string(i), "B", 10, 10 * (1 + ratio) / (1 - ratio), ratio});
  }
  const CalibrationSummary s = calibration_summary(m);
  CHECK(s.alpha_cdf(0.0) == 0.75);
  CHECK(s.alpha_cdf(0.3) == 1.0);
}

TEST_CASE("synthetic fixture reproduces the calibration") {
  const DeclarationFixture fx = synthetic_declarations(10000, 20210413);
  const auto matched = merge_declarations(fx.sales, fx.purchases);
  REQUIRE(matched.size() == 10000);
  const CalibrationSummary s = calibration_summary(matched);
  CHECK(s.prob_high == doctest::Approx(0.02));
  CHECK(std::abs(s.ratio_r - 45.759) <= 0.001);
  CHECK(s.d_low == doctest::Approx(10.0));
  CHECK(s.d_high == doctest::Approx(457.59));
  CHECK(s.alpha_cdf(0.0) == doctest::Approx(0.75));
  CHECK(s.alpha_cdf(0.5) > 0.75);
  CHECK(s.alpha_cdf(0.5) < 1.0);

  const auto dropped = merge_declarations(fx.sales, fx.purchases, true);
  CHECK(dropped.size() == 2500);
  for (const auto& t : dropped) CHECK(t.mismatch_ratio > 0.0);
}

TEST_CASE("fixture is reproducible and round-trips through CSV") {
  const DeclarationFixture a = synthetic_declarations(500, 5);
  const DeclarationFixture b = synthetic_declarations(500, 5);
  std::ostringstream oa, ob;
  write_declarations(oa, a.sales);
  write_declarations(ob, b.sales);
  CHECK(oa.str() == ob.str());

  std::istringstream in(oa.str());
  const auto back = read_declarations(in, Side::Sale);
  REQUIRE(back.size() == a.sales.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].seller_id == a.sales[i].seller_id);
    CHECK(back[i].amount == a.sales[i].amount);
  }
}

TEST_CASE("declaration parse errors") {
  CHECK(code_of("") == ErrorCode::ParseError);
  CHECK(code_of("a,b,c\n") == ErrorCode::ParseError);
  CHECK(code_of("seller_id,buyer_id,amount\nA,B,12x\n") == ErrorCode::ParseError);
  CHECK(code_of("seller_id,buyer_id,amount\nA,A,1\n") == ErrorCode::ParseError);
  CHECK(code_of("seller_id,buyer_id,amount\n,B,1\n") == ErrorCode::ParseError);
  CHECK(code_of("seller_id,buyer_id,amount\nA,B\n") == ErrorCode::ParseError);
  CHECK(code_of("seller_id,buyer_id,amount\nA,B,1\nA,C,-3\n") == ErrorCode::NegativeAmount);
  CHECK(message_of("seller_id,buyer_id,amount\nA,B,1\n\nA,C,oops\n").find("line 4") !=
        std::string::npos);

  std::istringstream bom("\xEF\xBB\xBFseller_id,buyer_id,amount\r\nA,B,2.5\r\n");
  const auto r = read_declarations(bom, Side::Purchase);
  REQUIRE(r.size() == 1);
  CHECK(r[0].amount == 2.5);
  CHECK(r[0].side == Side::Purchase);
}

TEST_CASE("matched network and writers") {
  const std::vector<MatchedTransaction> m{
      {"A", "B", 10, 10, 0}, {"B", "A", 5, 6, 1.0 / 11}, {"A", "C", 457.59, 457.59, 0}};
  std::vector<std::string> ids;
  const WeightedNetwork net = matched_network(m, &ids);
  CHECK(ids == std::vector<std::string>{"A", "B", "C"});
  CHECK(net.node_count() == 3);
  CHECK(net.edge_count() == 2);
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    const Edge& edge = net.edges()[e];
    if (std::max(edge.u, edge.v) == 1) CHECK(net.weight(e) == 15.0);
  }

  std::ostringstream out;
  write_matched(out, m);
  CHECK(out.str().rfind("seller_id,buyer_id,seller_declared,buyer_declared,mismatch_ratio\n", 0) ==
        0);
  std::ostringstream cdf;
  write_alpha_cdf(cdf, EmpiricalCdf({0.0, 0.0, 0.5}));
  CHECK(cdf.str().rfind("mismatch_ratio,cdf\n", 0) == 0);
  std::ostringstream summary;
  write_summary(summary, calibration_summary(m));
  CHECK(summary.str().find("ratio_r=") != std::string::npos);
  CHECK(summary.str().find("prob_high=") != std::string::npos);
}
