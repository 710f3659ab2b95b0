#pragma once

// Seller/buyer declaration matching and the calibration quantities derived
// from it (edge-weight split, volume ratio, mismatch-ratio distribution).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vatgame/network.hpp"

namespace vatgame {

enum class Side : std::uint8_t { Sale, Purchase };

struct DeclarationRecord {
  std::string seller_id;
  std::string buyer_id;
  double amount = 0.0;
  Side side = Side::Sale;
};

struct MatchedTransaction {
  std::string seller_id;
  std::string buyer_id;
  double seller_declared = 0.0;
  double buyer_declared = 0.0;
  double mismatch_ratio = 0.0;
};

/// Reads `seller_id,buyer_id,amount`. Throws Error(ParseError) with the line
/// number, Error(NegativeAmount) for amounts below zero.
std::vector<DeclarationRecord> read_declarations(std::istream& in, Side side);
std::vector<DeclarationRecord> read_declarations(const std::string& path, Side side);
void write_declarations(std::ostream& out, const std::vector<DeclarationRecord>& records);

/// (B - S) / (B + S) when B >= S, otherwise 0. Throws Error(BothZero) when
/// S = B = 0 and Error(NegativeAmount) for negative inputs.
double mismatch_ratio(double seller_declared, double buyer_declared);

/// Sums duplicate rows per (seller, buyer) and side, keeps pairs present on
/// both sides, and sorts by (seller_id, buyer_id).
std::vector<MatchedTransaction> merge_declarations(const std::vector<DeclarationRecord>& sales,
                                                   const std::vector<DeclarationRecord>& purchases,
                                                   bool drop_exact_matches = false);

/// Empirical CDF over a sample.
class EmpiricalCdf {
 public:
  EmpiricalCdf() = default;
  explicit EmpiricalCdf(std::vector<double> values);

  /// Fraction of the sample <= x.
  double operator()(double x) const;
  const std::vector<double>& sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

struct CalibrationSummary {
  std::size_t pairs = 0;
  double threshold = 0.0;  // high_quantile of the pair volumes
  double prob_high = 0.0;  // fraction of pairs strictly above threshold
  double ratio_r = 1.0;    // mean volume above / mean volume at or below
  double d_low = 0.0;      // mean volume at or below the threshold
  double d_high = 0.0;     // mean volume above it (d_low when nothing is above)
  EmpiricalCdf alpha_cdf;
};

/// Linear-interpolation quantile of unsorted data (q in [0, 1]).
double quantile(std::vector<double> values, double q);

/// Volumes are the seller declarations. Throws Error(EmptyInput).
CalibrationSummary calibration_summary(const std::vector<MatchedTransaction>& matched,
                                       double high_quantile = 0.98);

void write_matched(std::ostream& out, const std::vector<MatchedTransaction>& matched);

/// Flat `key=value` report.
void write_summary(std::ostream& out, const CalibrationSummary& summary);

/// `mismatch_ratio,cdf`, one row per distinct ratio.
void write_alpha_cdf(std::ostream& out, const EmpiricalCdf& cdf);

/// Undirected network over the firms (ids in sorted order become 0..n-1).
/// Pairs trading in both directions become one edge with summed volume.
WeightedNetwork matched_network(const std::vector<MatchedTransaction>& matched,
                                std::vector<std::string>* node_ids = nullptr);

struct DeclarationFixture {
  std::vector<DeclarationRecord> sales;
  std::vector<DeclarationRecord> purchases;
};

/// Synthetic stand-in for the confidential declaration data. Over `pairs`
/// matched pairs, exactly round(prob_high * pairs) have seller volume d_high
/// and the rest d_low; round(exact_fraction * pairs) declare identically on
/// both sides and the others carry a positive mismatch ratio, mostly below
/// 0.5. Some low-volume sales are split over two rows and a few rows per side
/// have no counterpart.
DeclarationFixture synthetic_declarations(std::size_t pairs, std::uint64_t seed,
                                          double prob_high = 0.02, double d_low = 10.0,
                                          double d_high = 457.59, double exact_fraction = 0.75);

}  // namespace vatgame
