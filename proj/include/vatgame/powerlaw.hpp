#pragma once

// Discrete power laws: sampling and maximum-likelihood fitting with a
// Kolmogorov-Smirnov choice of the lower cutoff.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vatgame/error.hpp"
#include "vatgame/rng.hpp"

namespace vatgame {

/// p(k) proportional to k^-gamma on the integers [k_min, k_max].
class DiscretePowerLaw {
 public:
  DiscretePowerLaw(double gamma, std::uint64_t k_min, std::uint64_t k_max);

  std::uint64_t sample(Rng& rng) const;

  double pmf(std::uint64_t k) const;
  /// P(X >= k).
  double ccdf(std::uint64_t k) const;
  double mean() const;

  std::uint64_t k_min() const noexcept { return k_min_; }
  std::uint64_t k_max() const noexcept { return k_max_; }

 private:
  double gamma_;
  std::uint64_t k_min_;
  std::uint64_t k_max_;
  std::vector<double> cdf_;  // cdf_[i] = P(X <= k_min + i), normalized
};

/// n draws by inverse transform on the normalized mass function.
std::vector<std::uint64_t> sample_powerlaw(double gamma, std::uint64_t x_min,
                                           std::uint64_t x_max, std::size_t n,
                                           std::uint64_t seed);

/// Fixture with a body below the tail: round(body_fraction * n) draws are
/// uniform on [1, x_min - 1], the rest come from the power law on
/// [x_min, x_max]. Draws are interleaved in random order.
std::vector<std::uint64_t> sample_powerlaw_with_body(double gamma, std::uint64_t x_min,
                                                     std::uint64_t x_max, std::size_t n,
                                                     double body_fraction, std::uint64_t seed);

struct PowerLawFit {
  double gamma = 0.0;
  std::int64_t x_min = 0;
  double ks_statistic = 1.0;
  std::size_t n_tail = 0;
};

inline constexpr std::size_t kMinPowerLawSamples = 50;

/// Discrete MLE with the (x_min - 1/2) continuous approximation, for each
/// candidate cutoff; the candidate with the smallest KS distance wins.
/// Without explicit candidates every distinct value between the 1st and 99th
/// percentile is tried.
PowerLawFit fit_powerlaw(std::span<const std::int64_t> samples,
                         std::optional<std::vector<std::int64_t>> x_min_candidates = {});

/// Exponent estimate and KS distance for one fixed cutoff.
PowerLawFit fit_powerlaw_at(std::span<const std::int64_t> sorted_samples, std::int64_t x_min);

/// One positive integer per line; blank lines are skipped.
std::vector<std::int64_t> read_samples(std::istream& in);
std::vector<std::int64_t> read_samples(const std::string& path);

}  // namespace vatgame
