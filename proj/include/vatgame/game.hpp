#pragma once

// Mixed VAT-fraud game: payoff matrix, subjective audit probability and the
// 2x2 game taxonomy used to read the parameter maps.

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "vatgame/error.hpp"

namespace vatgame {

enum class Strategy : std::uint8_t { C = 0, D = 1 };

constexpr Strategy other(Strategy s) noexcept {
  return s == Strategy::C ? Strategy::D : Strategy::C;
}

/// Scalar parameters of the game and of the evolutionary update.
/// Defaults are the base configuration of the calibrated model.
struct GameParams {
  double reward = 1.0;           // R, social reward for declaring correctly
  double inspection_cost = 1.0;  // Gamma, paid by anyone who gets inspected
  double fine = 1.5;             // phi, fine multiplier on the evaded amount
  double alpha = 0.3;            // undeclared fraction of the tax debt
  double d_low = 10.0;
  double d_high = 457.59;
  double prob_high = 0.02;       // probability an edge carries d_high
  double theta_low = 0.5;        // audit probability anchored at 2*alpha*d_low
  double theta_high = 0.5;       // audit probability anchored at 2*alpha*d_high
  double beta = 0.5;             // selection intensity of the Fermi rule
  double mu = 0.01;              // mutation probability

  /// Throws Error(InvalidParams) on out-of-range fields.
  void validate() const;
};

/// Linear audit-probability function clamped to [0, 1].
class AuditProbability {
 public:
  AuditProbability() = default;

  static AuditProbability constant(double value);

  /// Line through (x_low, theta_low) and (x_high, theta_high). Coinciding
  /// x-values are only accepted when the two probabilities agree.
  static AuditProbability through(double x_low, double theta_low, double x_high,
                                  double theta_high);

  double operator()(double amount) const noexcept;

  double slope() const noexcept { return slope_; }
  double intercept() const noexcept { return theta0_ - slope_ * x0_; }

 private:
  AuditProbability(double x0, double theta0, double slope)
      : x0_(x0), theta0_(theta0), slope_(slope) {}

  // Evaluated around the low anchor, which keeps the anchors exact.
  double x0_ = 0.0;
  double theta0_ = 0.0;
  double slope_ = 0.0;
};

/// Audit function of the shared (population-wide) anchors.
AuditProbability build_theta(const GameParams& params);

/// Audit function for an agent holding its own anchors.
AuditProbability build_theta(const GameParams& params, double theta_low, double theta_high);

/// Payoff of the focal player against `opponent` on an edge with tax debt `d`.
double payoff(Strategy focal, Strategy opponent, double d, const GameParams& params,
              const AuditProbability& theta);

/// Row player's entries of the 2x2 matrix, rows C then D, columns C then D.
struct PayoffQuad {
  double r = 0.0;
  double s = 0.0;
  double t = 0.0;
  double p = 0.0;

  friend bool operator==(const PayoffQuad&, const PayoffQuad&) = default;
};

PayoffQuad payoff_quad(double d, const GameParams& params);
PayoffQuad payoff_quad(double d, const GameParams& params, const AuditProbability& theta);

/// Quad written directly in terms of the evaded amount alpha*d and the two
/// audit probabilities (one defector / both defect). Used for the game maps
/// where these are treated as free coordinates.
PayoffQuad payoff_quad_from_probabilities(double evaded, double theta_one_defects,
                                          double theta_both_defect,
                                          const GameParams& params);

enum class GameLabel : std::uint8_t {
  Harmony,
  StagHunt,
  PrisonersDilemma,
  Snowdrift,
  Coordination,
  DefectionD123,
  DefectionD23,
  DefectionD2,
  RpD2,
};

std::string_view to_string(GameLabel label);

struct GameClass {
  GameLabel label = GameLabel::Harmony;
  bool dilemma_possible = false;  // R > P
  bool d1 = false;                // T > R
  bool d2 = false;                // P > S
  bool d3 = false;                // T > S
};

/// Comparisons whose exact equality makes a classification ambiguous.
enum class Comparison : std::uint8_t { RvsP, TvsR, PvsS, TvsS, RvsS };

std::string_view to_string(Comparison c);

class AmbiguousGame : public Error {
 public:
  explicit AmbiguousGame(std::vector<Comparison> ties);
  const std::vector<Comparison>& ties() const noexcept { return ties_; }

 private:
  std::vector<Comparison> ties_;
};

/// Names the 2x2 game encoded by a quad.
///
/// Throws AmbiguousGame when any defining comparison is an exact tie, and
/// Error(OutsideTaxonomy) for orderings that violate R > S (never produced by
/// the tax game with a positive inspection term).
GameClass classify_game(const PayoffQuad& quad);

}  // namespace vatgame
