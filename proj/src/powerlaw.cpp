#include "vatgame/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>

#include <fmt/format.h>

namespace vatgame {

DiscretePowerLaw::DiscretePowerLaw(double gamma, std::uint64_t k_min, std::uint64_t k_max)
    : gamma_(gamma), k_min_(k_min), k_max_(k_max) {
  if (!(gamma > 1.0) || k_min < 1 || k_max < k_min) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("invalid power law (gamma={}, k_min={}, k_max={})", gamma, k_min,
                            k_max));
  }
  cdf_.resize(k_max - k_min + 1);
  long double acc = 0.0L;
  for (std::uint64_t k = k_min; k <= k_max; ++k) {
    acc += std::pow(static_cast<long double>(k), -static_cast<long double>(gamma));
    cdf_[k - k_min] = static_cast<double>(acc);
  }
  const double total = cdf_.back();
  for (double& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

std::uint64_t DiscretePowerLaw::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return k_min_ + static_cast<std::uint64_t>(it - cdf_.begin());
}

double DiscretePowerLaw::pmf(std::uint64_t k) const {
  if (k < k_min_ || k > k_max_) return 0.0;
  const std::size_t i = k - k_min_;
  return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
}

double DiscretePowerLaw::ccdf(std::uint64_t k) const {
  if (k <= k_min_) return 1.0;
  if (k > k_max_) return 0.0;
  return 1.0 - cdf_[k - k_min_ - 1];
}

double DiscretePowerLaw::mean() const {
  double m = 0.0;
  for (std::uint64_t k = k_min_; k <= k_max_; ++k) m += static_cast<double>(k) * pmf(k);
  return m;
}

std::vector<std::uint64_t> sample_powerlaw(double gamma, std::uint64_t x_min,
                                           std::uint64_t x_max, std::size_t n,
                                           std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "sample count must be >= 1");
  const DiscretePowerLaw law(gamma, x_min, x_max);
  Rng rng(seed, {tag(StreamTag::Fixture)});
  std::vector<std::uint64_t> out(n);
  for (auto& x : out) x = law.sample(rng);
  return out;
}

std::vector<std::uint64_t> sample_powerlaw_with_body(double gamma, std::uint64_t x_min,
                                                     std::uint64_t x_max, std::size_t n,
                                                     double body_fraction, std::uint64_t seed) {
  if (!(body_fraction >= 0.0 && body_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "body_fraction must lie in [0, 1)");
  }
  if (x_min < 2 && body_fraction > 0.0) {
    throw Error(ErrorCode::InvalidParams, "a body below x_min needs x_min >= 2");
  }
  std::vector<std::uint64_t> out = sample_powerlaw(gamma, x_min, x_max, n, seed);
  const auto body = static_cast<std::size_t>(std::llround(body_fraction * static_cast<double>(n)));
  Rng rng(seed, {tag(StreamTag::Fixture), 1});
  for (std::size_t i = 0; i < body; ++i) out[i] = 1 + rng.below(x_min - 1);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(out[i], out[rng.below(i + 1)]);
  return out;
}

PowerLawFit fit_powerlaw_at(std::span<const std::int64_t> sorted, std::int64_t x_min) {
  PowerLawFit fit;
  fit.x_min = x_min;
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), x_min);
  const auto tail = std::span<const std::int64_t>(first, sorted.end());
  fit.n_tail = tail.size();
  if (tail.size() < 2 || tail.front() == tail.back()) {
    fit.ks_statistic = 1.0;
    return fit;
  }
  const double shift = static_cast<double>(x_min) - 0.5;
  double log_sum = 0.0;
  for (std::int64_t x : tail) log_sum += std::log(static_cast<double>(x) / shift);
  const auto n = static_cast<double>(tail.size());
  fit.gamma = 1.0 + n / log_sum;

  // Survival function of the fitted law under the same approximation.
  auto fitted = [&](double x) { return std::pow((x - 0.5) / shift, 1.0 - fit.gamma); };

  // The empirical P(X >= x) is a step function that only changes at observed
  // values; on each integer run (prev, cur] the fitted curve is monotone, so
  // the supremum is attained at prev + 1 or at cur.
  double ks = 0.0;
  std::size_t i = 0;
  std::int64_t prev = x_min - 1;
  while (i < tail.size()) {
    const std::int64_t cur = tail[i];
    const double emp = (n - static_cast<double>(i)) / n;
    ks = std::max(ks, std::abs(emp - fitted(static_cast<double>(cur))));
    if (cur > prev + 1) {
      ks = std::max(ks, std::abs(emp - fitted(static_cast<double>(prev + 1))));
    }
    while (i < tail.size() && tail[i] == cur) ++i;
    prev = cur;
  }
  fit.ks_statistic = std::min(ks, 1.0);
  return fit;
}

PowerLawFit fit_powerlaw(std::span<const std::int64_t> samples,
                         std::optional<std::vector<std::int64_t>> x_min_candidates) {
  if (samples.size() < kMinPowerLawSamples) {
    throw Error(ErrorCode::TooFewSamples,
                fmt::format("need at least {} samples, got {}", kMinPowerLawSamples,
                            samples.size()));
  }
  std::vector<std::int64_t> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() <= 0) {
    throw Error(ErrorCode::NonPositiveSample,
                fmt::format("sample {} is not positive", sorted.front()));
  }

  std::vector<std::int64_t> candidates;
  if (x_min_candidates) {
    candidates = *x_min_candidates;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  } else {
    const std::size_t last = sorted.size() - 1;
    const std::int64_t lo = sorted[last / 100];
    const std::int64_t hi = sorted[(99 * last) / 100];
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const std::int64_t v = sorted[i];
      if (v < lo || v > hi) continue;
      if (candidates.empty() || candidates.back() != v) candidates.push_back(v);
    }
  }

  std::optional<PowerLawFit> best;
  for (std::int64_t x_min : candidates) {
    if (x_min < 1) continue;
    const PowerLawFit f = fit_powerlaw_at(sorted, x_min);
    if (f.gamma == 0.0) continue;  // fewer than two distinct tail values
    if (!best || f.ks_statistic < best->ks_statistic) best = f;
  }
  if (!best) {
    throw Error(ErrorCode::TooFewDistinct,
                "no cutoff leaves at least two distinct values in the tail");
  }
  return *best;
}

std::vector<std::int64_t> read_samples(std::istream& in) {
  std::vector<std::int64_t> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || line.find_first_not_of(" \t", used) != std::string::npos) {
      throw Error(ErrorCode::ParseError, fmt::format("line {}: not an integer", line_no));
    }
    if (v <= 0) {
      throw Error(ErrorCode::NonPositiveSample,
                  fmt::format("line {}: sample {} is not positive", line_no, v));
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::int64_t> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open {}", path));
  return read_samples(in);
}

}  // namespace vatgame
