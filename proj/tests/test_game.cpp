#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "vatgame/game.hpp"

using namespace vatgame;

namespace {

GameParams base() { return GameParams{}; }

// Ranks of (r, s, t, p) computed by sorting; comparisons are then read off
// the ranks instead of the values.
struct Ranked {
  std::array<int, 4> rank{};  // r, s, t, p
  bool tie = false;
};

Ranked rank_quad(const PayoffQuad& q) {
  std::array<std::pair<double, int>, 4> v{{{q.r, 0}, {q.s, 1}, {q.t, 2}, {q.p, 3}}};
  std::sort(v.begin(), v.end());
  Ranked out;
  for (int i = 0; i < 4; ++i) out.rank[v[i].second] = i;
  for (int i = 0; i + 1 < 4; ++i) {
    if (v[i].first == v[i + 1].first) out.tie = true;
  }
  return out;
}

// Independent label table keyed by the ordering of the four entries.
std::string oracle_label(const PayoffQuad& q) {
  const Ranked k = rank_quad(q);
  const int r = k.rank[0], s = k.rank[1], t = k.rank[2], p = k.rank[3];
  const bool rp = r > p, d1 = t > r, d2 = p > s, d3 = t > s;
  if (rp) {
    if (d1 && d2) return "PRISONERS_DILEMMA";
    if (d1) return "SNOWDRIFT";
    if (!d2) return "HARMONY";
    if (!d3) return "RP_D2";
    // T = P is not a defining tie; it falls on the stag-hunt side.
    return (t > p || q.t == q.p) ? "STAG_HUNT" : "COORDINATION";
  }
  if (d1 && d2 && d3) return "DEFECTION_D123";
  if (!d1 && d2 && d3) return "DEFECTION_D23";
  if (!d1 && d2 && !d3) return "DEFECTION_D2";
  return "OUTSIDE";
}

std::string engine_label(const PayoffQuad& q) {
  try {
    return std::string(to_string(classify_game(q).label));
  } catch (const AmbiguousGame&) {
    return "AMBIGUOUS";
  } catch (const Error& e) {
    if (e.code() == ErrorCode::OutsideTaxonomy) return "OUTSIDE";
    throw;
  }
}

}  // namespace

TEST_CASE("build_theta: equal anchors give a constant function") {
  const auto f = build_theta(base());
  for (double x : {0.0, 1.0, 8.0, 100.0, 1e6}) CHECK(f(x) == 0.5);
}

TEST_CASE("build_theta: line through the anchors") {
  GameParams p = base();
  p.alpha = 0.5;
  p.theta_low = 0.2;
  p.theta_high = 0.8;
  const auto f = build_theta(p);
  CHECK(f(10.0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(f(457.59) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(f(5.0) == doctest::Approx(0.2 + 0.6 / 447.59 * (5.0 - 10.0)).epsilon(1e-14));
  CHECK(f(5.0) == doctest::Approx(0.1933).epsilon(1e-3));
}

TEST_CASE("build_theta: clamps to [0,1]") {
  GameParams p = base();
  p.alpha = 0.5;
  p.theta_low = 0.9;
  p.theta_high = 0.1;
  const auto f = build_theta(p);
  CHECK(f(1000.0) == 0.0);
  CHECK(f(0.0) <= 1.0);
  p.theta_low = 0.1;
  p.theta_high = 0.9;
  CHECK(build_theta(p)(1e5) == 1.0);
}

TEST_CASE("build_theta: degenerate anchors") {
  GameParams p = base();
  p.alpha = 0.0;
  p.theta_low = 0.3;
  p.theta_high = 0.7;
  CHECK_THROWS_AS(build_theta(p), Error);
  try {
    build_theta(p);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateAnchors);
  }
  p.theta_high = 0.3;
  CHECK(build_theta(p)(4.0) == 0.3);
}

TEST_CASE("payoff: table examples at base params") {
  GameParams p = base();
  const auto theta = build_theta(p);
  CHECK(payoff(Strategy::C, Strategy::C, 10, p, theta) == 1.0);
  p.alpha = 0.4;
  CHECK(payoff(Strategy::D, Strategy::C, 10, p, build_theta(p)) == doctest::Approx(0.5));
  p.alpha = 0.0;
  CHECK(payoff(Strategy::D, Strategy::D, 10, p, build_theta(p)) == -0.5);
}

TEST_CASE("payoff_quad: examples") {
  GameParams p = base();
  p.alpha = 0.4;
  const PayoffQuad q = payoff_quad(10, p);
  CHECK(q.r == 1.0);
  CHECK(q.s == 0.5);
  CHECK(q.t == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(q.p == doctest::Approx(0.5).epsilon(1e-15));

  p.alpha = 0.0;
  for (double d : {10.0, 457.59}) {
    const PayoffQuad z = payoff_quad(d, p);
    CHECK(z == PayoffQuad{1.0, 0.5, -0.5, -0.5});
  }

  p.alpha = 1.0;
  CHECK(payoff_quad(457.59, p).t == doctest::Approx(113.8975).epsilon(1e-12));
}

TEST_CASE("payoff: C-row identity r - s = theta(alpha d) * Gamma") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    GameParams p = base();
    p.alpha = 0.05 + 0.95 * u(gen);
    p.inspection_cost = 3 * u(gen);
    p.theta_low = u(gen);
    p.theta_high = u(gen);
    const auto theta = build_theta(p);
    for (double d : {p.d_low, p.d_high}) {
      const PayoffQuad q = payoff_quad(d, p, theta);
      CHECK(q.r == p.reward);
      CHECK(q.r - q.s == doctest::Approx(theta(p.alpha * d) * p.inspection_cost));
      CHECK(q.r - q.s >= 0.0);
    }
  }
}

TEST_CASE("payoff: r > s always, t > p when the audit function is increasing") {
  GameParams p = base();
  for (double a : {0.1, 0.3, 0.6, 0.9}) {
    for (auto [tl, th] : {std::pair{0.2, 0.8}, {0.1, 0.4}}) {
      p.alpha = a;
      p.theta_low = tl;
      p.theta_high = th;
      for (double d : {p.d_low, p.d_high}) {
        const PayoffQuad q = payoff_quad(d, p);
        CHECK(q.r > q.s);
        CHECK(q.t > q.p);
      }
    }
    // A constant audit function makes the two defector entries equal.
    p.theta_low = p.theta_high = 0.5;
    const PayoffQuad c = payoff_quad(p.d_high, p);
    CHECK(c.r > c.s);
    CHECK(c.t == c.p);
  }
}

TEST_CASE("payoff: monotonicity of the defector row in alpha d") {
  for (double fine : {1.0, 1.5}) {
    GameParams p = base();
    p.fine = fine;  // theta*phi = 0.5 or 0.75 < 1
    double prev_t = -1e300, prev_p = -1e300;
    for (int i = 1; i <= 100; ++i) {
      p.alpha = i / 100.0;
      const PayoffQuad q = payoff_quad(10.0, p);
      CHECK(q.t > prev_t);
      CHECK(q.p > prev_p);
      prev_t = q.t;
      prev_p = q.p;
    }
  }
  GameParams p = base();
  p.fine = 2.5;  // theta*phi = 1.25 > 1
  double prev = 1e300;
  for (int i = 1; i <= 100; ++i) {
    p.alpha = i / 100.0;
    const double t = payoff_quad(10.0, p).t;
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("classify_game: examples") {
  const GameClass h = classify_game({1.0, 0.5, -0.5, -0.5});
  CHECK(h.label == GameLabel::Harmony);
  CHECK(h.dilemma_possible);
  CHECK_FALSE(h.d1);
  CHECK_FALSE(h.d2);

  try {
    classify_game({1, 0, 2, 1});
    FAIL("expected AmbiguousGame");
  } catch (const AmbiguousGame& e) {
    CHECK(e.code() == ErrorCode::AmbiguousGame);
    REQUIRE(e.ties().size() == 1);
    CHECK(e.ties()[0] == Comparison::RvsP);
  }

  try {
    classify_game({1.0, 0.5, 0.5, 0.5});
    FAIL("expected AmbiguousGame");
  } catch (const AmbiguousGame& e) {
    CHECK(e.ties() == std::vector<Comparison>{Comparison::PvsS, Comparison::TvsS});
  }
}

TEST_CASE("classify_game: one quad per label") {
  CHECK(classify_game({3, 0, 4, 1}).label == GameLabel::PrisonersDilemma);
  CHECK(classify_game({3, 1, 4, 0}).label == GameLabel::Snowdrift);
  CHECK(classify_game({4, 0, 3, 1}).label == GameLabel::StagHunt);
  CHECK(classify_game({4, 0, 1, 2}).label == GameLabel::Coordination);
  CHECK(classify_game({4, 3, 2, 1}).label == GameLabel::Harmony);
  CHECK(classify_game({4, 1, 0, 2}).label == GameLabel::RpD2);
  CHECK(classify_game({1, 0, 3, 2}).label == GameLabel::DefectionD123);
  CHECK(classify_game({2, 0, 1, 3}).label == GameLabel::DefectionD23);
  CHECK(classify_game({2, 1, 0, 3}).label == GameLabel::DefectionD2);
  CHECK(classify_game({1, 2, 3, 4}).label == GameLabel::DefectionD123);
  // R < P without P > S needs R < S, which the game never produces.
  CHECK_THROWS_AS(classify_game({1, 3, 0, 2}), Error);
  CHECK_THROWS_AS(classify_game({1, 3, 2, 4}), Error);
}

TEST_CASE("classify_game agrees with the ordering oracle on all 24 strict orderings") {
  std::array<double, 4> values{1.0, 2.0, 3.0, 4.0};
  std::sort(values.begin(), values.end());
  int checked = 0;
  do {
    const PayoffQuad q{values[0], values[1], values[2], values[3]};
    CHECK(engine_label(q) == oracle_label(q));
    ++checked;
  } while (std::next_permutation(values.begin(), values.end()));
  CHECK(checked == 24);
}

TEST_CASE("classify_game agrees with the ordering oracle on game-map grids") {
  GameParams p = base();
  int compared = 0;
  // (Gamma, alpha d) with constant Theta.
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      p.inspection_cost = 0.05 + 3.0 * i / 49.0;
      const double x = 0.013 + 10.0 * j / 49.0;
      const PayoffQuad q = payoff_quad_from_probabilities(x, 0.5, 0.5, p);
      const auto e = engine_label(q);
      if (e == "AMBIGUOUS") continue;
      CHECK(e == oracle_label(q));
      ++compared;
    }
  }
  // (Theta, alpha d) with fixed Theta'.
  p = base();
  for (double theta_both : {0.2, 0.5, 0.8}) {
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double theta = 0.01 + 0.98 * i / 49.0;
        const double x = 0.013 + 10.0 * j / 49.0;
        const PayoffQuad q = payoff_quad_from_probabilities(x, theta, theta_both, p);
        const auto e = engine_label(q);
        if (e == "AMBIGUOUS") continue;
        CHECK(e == oracle_label(q));
        ++compared;
      }
    }
  }
  CHECK(compared > 9000);
}

TEST_CASE("classify_game: HARMONY below R/(1 - Theta phi), STAG_HUNT just above") {
  GameParams p = base();  // Theta = 0.5, phi = 1.5 -> threshold 4
  const double threshold = p.reward / (1.0 - 0.5 * p.fine);
  for (double eps : {1e-3, 1e-6}) {
    CHECK(classify_game(payoff_quad_from_probabilities(threshold - eps, 0.5, 0.5, p)).label ==
          GameLabel::Harmony);
    CHECK(classify_game(payoff_quad_from_probabilities(threshold + eps, 0.5, 0.5, p)).label ==
          GameLabel::StagHunt);
  }
}

TEST_CASE("classify_game: R > P flips at (R + Theta' Gamma)/(1 - Theta' phi)") {
  GameParams p = base();
  for (double tb : {0.2, 0.5, 0.6}) {
    const double threshold = (p.reward + tb * p.inspection_cost) / (1.0 - tb * p.fine);
    for (double theta : {0.1, 0.4, 0.9}) {
      const auto below = payoff_quad_from_probabilities(threshold - 1e-6, theta, tb, p);
      const auto above = payoff_quad_from_probabilities(threshold + 1e-6, theta, tb, p);
      CHECK(below.r > below.p);
      CHECK(above.r < above.p);
    }
  }
}

TEST_CASE("GameParams::validate rejects out-of-range fields") {
  auto bad = [](auto mutate) {
    GameParams p;
    mutate(p);
    CHECK_THROWS_AS(p.validate(), Error);
  };
  bad([](GameParams& p) { p.alpha = 1.5; });
  bad([](GameParams& p) { p.d_low = 0.0; });
  bad([](GameParams& p) { p.d_high = 5.0; });
  bad([](GameParams& p) { p.beta = 0.0; });
  bad([](GameParams& p) { p.mu = -0.1; });
  bad([](GameParams& p) { p.theta_high = 2.0; });
  bad([](GameParams& p) { p.prob_high = 1.01; });
  bad([](GameParams& p) { p.inspection_cost = std::nan(""); });
  CHECK_NOTHROW(GameParams{}.validate());
}
