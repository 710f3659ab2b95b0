#include "vatgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

namespace vatgame {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DegenerateAnchors: return "DegenerateAnchors";
    case ErrorCode::AmbiguousGame: return "Ambiguous";
    case ErrorCode::OutsideTaxonomy: return "OutsideTaxonomy";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NonPositiveSample: return "NonPositiveSample";
    case ErrorCode::TooFewDistinct: return "TooFewDistinct";
    case ErrorCode::UnknownAxis: return "UnknownAxis";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NegativeAmount: return "NegativeAmount";
    case ErrorCode::BothZero: return "BothZero";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

bool is_probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidParams, what);
}

}  // namespace

void GameParams::validate() const {
  require(std::isfinite(reward), "reward must be finite");
  require(std::isfinite(inspection_cost) && inspection_cost >= 0.0,
          "inspection_cost must be >= 0");
  require(std::isfinite(fine) && fine >= 0.0, "fine must be >= 0");
  require(is_probability(alpha), "alpha must lie in [0,1]");
  require(std::isfinite(d_low) && d_low > 0.0, "d_low must be > 0");
  require(std::isfinite(d_high) && d_high >= d_low, "d_high must be >= d_low");
  require(is_probability(prob_high), "prob_high must lie in [0,1]");
  require(is_probability(theta_low), "theta_low must lie in [0,1]");
  require(is_probability(theta_high), "theta_high must lie in [0,1]");
  require(std::isfinite(beta) && beta > 0.0, "beta must be > 0");
  require(is_probability(mu), "mu must lie in [0,1]");
}

AuditProbability AuditProbability::constant(double value) { return {0.0, value, 0.0}; }

AuditProbability AuditProbability::through(double x_low, double theta_low, double x_high,
                                           double theta_high) {
  if (x_low == x_high) {
    if (theta_low != theta_high) {
      throw Error(ErrorCode::DegenerateAnchors,
                  fmt::format("audit anchors share x={} but differ ({} vs {})", x_low,
                              theta_low, theta_high));
    }
    return constant(theta_low);
  }
  const double slope = (theta_high - theta_low) / (x_high - x_low);
  return {x_low, theta_low, slope};
}

double AuditProbability::operator()(double amount) const noexcept {
  return std::clamp(theta0_ + slope_ * (amount - x0_), 0.0, 1.0);
}

AuditProbability build_theta(const GameParams& params) {
  return build_theta(params, params.theta_low, params.theta_high);
}

AuditProbability build_theta(const GameParams& params, double theta_low, double theta_high) {
  // Anchors sit at the both-defect mismatch 2*alpha*d.
  const double x_low = 2.0 * params.alpha * params.d_low;
  const double x_high = 2.0 * params.alpha * params.d_high;
  return AuditProbability::through(x_low, theta_low, x_high, theta_high);
}

double payoff(Strategy focal, Strategy opponent, double d, const GameParams& params,
              const AuditProbability& theta) {
  const double evaded = params.alpha * d;
  if (focal == Strategy::C) {
    if (opponent == Strategy::C) return params.reward;
    return params.reward - theta(evaded) * params.inspection_cost;
  }
  const double penalty = params.inspection_cost + params.fine * evaded;
  if (opponent == Strategy::C) return evaded - theta(evaded) * penalty;
  return evaded - theta(2.0 * evaded) * penalty;
}

PayoffQuad payoff_quad(double d, const GameParams& params) {
  return payoff_quad(d, params, build_theta(params));
}

PayoffQuad payoff_quad(double d, const GameParams& params, const AuditProbability& theta) {
  return {payoff(Strategy::C, Strategy::C, d, params, theta),
          payoff(Strategy::C, Strategy::D, d, params, theta),
          payoff(Strategy::D, Strategy::C, d, params, theta),
          payoff(Strategy::D, Strategy::D, d, params, theta)};
}

PayoffQuad payoff_quad_from_probabilities(double evaded, double theta_one_defects,
                                          double theta_both_defect,
                                          const GameParams& params) {
  const double penalty = params.inspection_cost + params.fine * evaded;
  return {params.reward, params.reward - theta_one_defects * params.inspection_cost,
          evaded - theta_one_defects * penalty, evaded - theta_both_defect * penalty};
}

std::string_view to_string(GameLabel label) {
  switch (label) {
    case GameLabel::Harmony: return "HARMONY";
    case GameLabel::StagHunt: return "STAG_HUNT";
    case GameLabel::PrisonersDilemma: return "PRISONERS_DILEMMA";
    case GameLabel::Snowdrift: return "SNOWDRIFT";
    case GameLabel::Coordination: return "COORDINATION";
    case GameLabel::DefectionD123: return "DEFECTION_D123";
    case GameLabel::DefectionD23: return "DEFECTION_D23";
    case GameLabel::DefectionD2: return "DEFECTION_D2";
    case GameLabel::RpD2: return "RP_D2";
  }
  return "UNKNOWN";
}

std::string_view to_string(Comparison c) {
  switch (c) {
    case Comparison::RvsP: return "R=P";
    case Comparison::TvsR: return "T=R";
    case Comparison::PvsS: return "P=S";
    case Comparison::TvsS: return "T=S";
    case Comparison::RvsS: return "R=S";
  }
  return "?";
}

namespace {

std::string describe_ties(const std::vector<Comparison>& ties) {
  std::string out = "ambiguous game, exact ties:";
  for (Comparison c : ties) {
    out += ' ';
    out += to_string(c);
  }
  return out;
}

}  // namespace

AmbiguousGame::AmbiguousGame(std::vector<Comparison> ties)
    : Error(ErrorCode::AmbiguousGame, describe_ties(ties)), ties_(std::move(ties)) {}

GameClass classify_game(const PayoffQuad& q) {
  std::vector<Comparison> ties;
  if (q.r == q.p) ties.push_back(Comparison::RvsP);
  if (q.t == q.r) ties.push_back(Comparison::TvsR);
  if (q.p == q.s) ties.push_back(Comparison::PvsS);
  if (q.t == q.s) ties.push_back(Comparison::TvsS);
  if (q.r == q.s) ties.push_back(Comparison::RvsS);
  if (!ties.empty()) throw AmbiguousGame(std::move(ties));

  GameClass g;
  g.dilemma_possible = q.r > q.p;
  g.d1 = q.t > q.r;
  g.d2 = q.p > q.s;
  g.d3 = q.t > q.s;

  if (g.dilemma_possible) {
    if (g.d1) {
      g.label = g.d2 ? GameLabel::PrisonersDilemma : GameLabel::Snowdrift;
    } else if (!g.d2) {
      g.label = GameLabel::Harmony;
    } else if (g.d3) {
      // Both diagonals are equilibria. T >= P is the classic stag hunt; with
      // T < P (decreasing audit function) mutual defection pays more than
      // exploiting a cooperator.
      g.label = q.t >= q.p ? GameLabel::StagHunt : GameLabel::Coordination;
    } else {
      g.label = GameLabel::RpD2;
    }
    return g;
  }

  if (g.d1 && g.d2 && g.d3) {
    g.label = GameLabel::DefectionD123;
  } else if (!g.d1 && g.d2 && g.d3) {
    g.label = GameLabel::DefectionD23;
  } else if (!g.d1 && g.d2 && !g.d3) {
    g.label = GameLabel::DefectionD2;
  } else {
    throw Error(ErrorCode::OutsideTaxonomy,
                fmt::format("quad ({}, {}, {}, {}) has R <= P without P > S", q.r, q.s, q.t,
                            q.p));
  }
  return g;
}

}  // namespace vatgame
