#include "vatgame/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string_view>
#include <utility>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vatgame/rng.hpp"

namespace vatgame {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

const char* side_name(Side side) { return side == Side::Sale ? "sales" : "purchases"; }

}  // namespace

std::vector<DeclarationRecord> read_declarations(std::istream& in, Side side) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::ParseError, fmt::format("{}: missing header", side_name(side)));
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (line != "seller_id,buyer_id,amount") {
    throw Error(ErrorCode::ParseError,
                fmt::format("{} line 1: expected header seller_id,buyer_id,amount",
                            side_name(side)));
  }
  std::vector<DeclarationRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw Error(ErrorCode::ParseError,
                  fmt::format("{} line {}: expected 3 fields, got {}", side_name(side), line_no,
                              fields.size()));
    }
    const auto seller = strip(fields[0]);
    const auto buyer = strip(fields[1]);
    const auto amount_text = strip(fields[2]);
    if (seller.empty() || buyer.empty()) {
      throw Error(ErrorCode::ParseError,
                  fmt::format("{} line {}: empty firm id", side_name(side), line_no));
    }
    if (seller == buyer) {
      throw Error(ErrorCode::ParseError,
                  fmt::format("{} line {}: seller and buyer are both '{}'", side_name(side),
                              line_no, seller));
    }
    double amount = 0.0;
    const char* end = amount_text.data() + amount_text.size();
    auto [ptr, ec] = std::from_chars(amount_text.data(), end, amount);
    if (ec != std::errc() || ptr != end || amount_text.empty() || !std::isfinite(amount)) {
      throw Error(ErrorCode::ParseError,
                  fmt::format("{} line {}: bad amount '{}'", side_name(side), line_no,
                              amount_text));
    }
    if (amount < 0.0) {
      throw Error(ErrorCode::NegativeAmount,
                  fmt::format("{} line {}: negative amount {}", side_name(side), line_no,
                              amount_text));
    }
    records.push_back({std::string(seller), std::string(buyer), amount, side});
  }
  return records;
}

std::vector<DeclarationRecord> read_declarations(const std::string& path, Side side) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open {}", path));
  try {
    return read_declarations(in, side);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path, e.what()));
  }
}

void write_declarations(std::ostream& out, const std::vector<DeclarationRecord>& records) {
  out << "seller_id,buyer_id,amount\n";
  for (const auto& r : records) fmt::print(out, "{},{},{}\n", r.seller_id, r.buyer_id, r.amount);
}

double mismatch_ratio(double seller_declared, double buyer_declared) {
  if (seller_declared < 0.0 || buyer_declared < 0.0) {
    throw Error(ErrorCode::NegativeAmount,
                fmt::format("negative declaration ({}, {})", seller_declared, buyer_declared));
  }
  if (seller_declared == 0.0 && buyer_declared == 0.0) {
    throw Error(ErrorCode::BothZero, "both declarations are zero");
  }
  if (buyer_declared < seller_declared) return 0.0;
  return (buyer_declared - seller_declared) / (buyer_declared + seller_declared);
}

std::vector<MatchedTransaction> merge_declarations(const std::vector<DeclarationRecord>& sales,
                                                   const std::vector<DeclarationRecord>& purchases,
                                                   bool drop_exact_matches) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, double> sold;
  std::map<Key, double> bought;
  for (const auto& r : sales) {
    if (r.amount < 0.0) throw Error(ErrorCode::NegativeAmount, "negative sale amount");
    sold[{r.seller_id, r.buyer_id}] += r.amount;
  }
  for (const auto& r : purchases) {
    if (r.amount < 0.0) throw Error(ErrorCode::NegativeAmount, "negative purchase amount");
    bought[{r.seller_id, r.buyer_id}] += r.amount;
  }
  std::vector<MatchedTransaction> matched;
  for (const auto& [key, s] : sold) {
    const auto it = bought.find(key);
    if (it == bought.end()) continue;
    const double b = it->second;
    if (drop_exact_matches && s == b) continue;
    // Two zero declarations carry no volume and no ratio.
    if (s == 0.0 && b == 0.0) continue;
    matched.push_back({key.first, key.second, s, b, mismatch_ratio(s, b)});
  }
  return matched;  // std::map iteration is already (seller, buyer) order
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  if (sorted_.empty()) return 0.0;
  const auto n = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(n) / static_cast<double>(sorted_.size());
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, fmt::format("quantile {} outside [0, 1]", q));
  }
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

CalibrationSummary calibration_summary(const std::vector<MatchedTransaction>& matched,
                                       double high_quantile) {
  if (matched.empty()) throw Error(ErrorCode::EmptyInput, "no matched transactions");
  CalibrationSummary out;
  out.pairs = matched.size();
  std::vector<double> volumes;
  std::vector<double> ratios;
  volumes.reserve(matched.size());
  ratios.reserve(matched.size());
  for (const auto& m : matched) {
    volumes.push_back(m.seller_declared);
    ratios.push_back(m.mismatch_ratio);
  }
  out.threshold = quantile(volumes, high_quantile);
  double sum_low = 0.0;
  double sum_high = 0.0;
  std::size_t n_high = 0;
  for (double v : volumes) {
    if (v > out.threshold) {
      sum_high += v;
      ++n_high;
    } else {
      sum_low += v;
    }
  }
  const std::size_t n_low = volumes.size() - n_high;
  out.prob_high = static_cast<double>(n_high) / static_cast<double>(volumes.size());
  out.d_low = sum_low / static_cast<double>(n_low);  // n_low >= 1: the minimum is never above
  out.d_high = n_high > 0 ? sum_high / static_cast<double>(n_high) : out.d_low;
  out.ratio_r = (n_high > 0 && out.d_low > 0.0) ? out.d_high / out.d_low : 1.0;
  out.alpha_cdf = EmpiricalCdf(std::move(ratios));
  return out;
}

void write_matched(std::ostream& out, const std::vector<MatchedTransaction>& matched) {
  out << "seller_id,buyer_id,seller_declared,buyer_declared,mismatch_ratio\n";
  for (const auto& m : matched) {
    fmt::print(out, "{},{},{},{},{:.9f}\n", m.seller_id, m.buyer_id, m.seller_declared,
               m.buyer_declared, m.mismatch_ratio);
  }
}

void write_summary(std::ostream& out, const CalibrationSummary& s) {
  fmt::print(out, "pairs={}\n", s.pairs);
  fmt::print(out, "threshold={:.6f}\n", s.threshold);
  fmt::print(out, "prob_high={:.6f}\n", s.prob_high);
  fmt::print(out, "d_low={:.6f}\n", s.d_low);
  fmt::print(out, "d_high={:.6f}\n", s.d_high);
  fmt::print(out, "ratio_r={:.6f}\n", s.ratio_r);
  fmt::print(out, "alpha_cdf_0={:.6f}\n", s.alpha_cdf(0.0));
  fmt::print(out, "alpha_cdf_0.5={:.6f}\n", s.alpha_cdf(0.5));
}

void write_alpha_cdf(std::ostream& out, const EmpiricalCdf& cdf) {
  out << "mismatch_ratio,cdf\n";
  const auto& v = cdf.sorted();
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    fmt::print(out, "{:.9f},{:.6f}\n", v[i], static_cast<double>(i + 1) / n);
  }
}

WeightedNetwork matched_network(const std::vector<MatchedTransaction>& matched,
                                std::vector<std::string>* node_ids) {
  std::set<std::string> firms;
  for (const auto& m : matched) {
    firms.insert(m.seller_id);
    firms.insert(m.buyer_id);
  }
  std::vector<std::string> ids(firms.begin(), firms.end());
  auto index = [&](const std::string& id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::map<std::pair<NodeId, NodeId>, double> volume;
  for (const auto& m : matched) {
    NodeId u = index(m.seller_id);
    NodeId v = index(m.buyer_id);
    if (u > v) std::swap(u, v);
    volume[{u, v}] += m.seller_declared;
  }
  std::vector<Edge> edges;
  std::vector<double> weights;
  for (const auto& [key, w] : volume) {
    edges.push_back({key.first, key.second});
    weights.push_back(w);
  }
  WeightedNetwork net(ids.size(), std::move(edges), std::move(weights));
  if (node_ids) *node_ids = std::move(ids);
  return net;
}

DeclarationFixture synthetic_declarations(std::size_t pairs, std::uint64_t seed, double prob_high,
                                          double d_low, double d_high, double exact_fraction) {
  if (pairs < 2) throw Error(ErrorCode::InvalidParams, "fixture needs at least 2 pairs");
  if (!(prob_high >= 0.0 && prob_high <= 1.0) || !(exact_fraction >= 0.0 && exact_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "fixture fractions must lie in [0, 1]");
  }
  if (!(d_low > 0.0 && d_high > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "fixture volumes must be positive");
  }
  Rng rng(seed, {tag(StreamTag::Fixture), 0x1a9e57});

  const std::size_t firms = std::max<std::size_t>(4, pairs / 3);
  std::set<std::pair<std::size_t, std::size_t>> chosen;
  while (chosen.size() < pairs) {
    const std::size_t s = rng.below(firms);
    std::size_t b = rng.below(firms - 1);
    if (b >= s) ++b;
    chosen.insert({s, b});
  }
  std::vector<std::pair<std::size_t, std::size_t>> pair_list(chosen.begin(), chosen.end());

  auto pick = [&](std::size_t count) {
    std::vector<std::size_t> order(pairs);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = pairs - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    std::vector<bool> mark(pairs, false);
    for (std::size_t i = 0; i < count; ++i) mark[order[i]] = true;
    return mark;
  };
  const auto n_high = static_cast<std::size_t>(std::llround(prob_high * static_cast<double>(pairs)));
  const auto n_exact =
      static_cast<std::size_t>(std::llround(exact_fraction * static_cast<double>(pairs)));
  const auto high = pick(n_high);
  const auto exact = pick(n_exact);

  auto firm = [](std::size_t i) { return fmt::format("F{:06d}", i); };
  DeclarationFixture out;
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::string seller = firm(pair_list[k].first);
    const std::string buyer = firm(pair_list[k].second);
    const double s = high[k] ? d_high : d_low;
    double b = s;
    if (!exact[k]) {
      // Mostly small mismatches, with a tail up to 0.95.
      const double u = rng.uniform();
      const double alpha = rng.uniform() < 0.8 ? 0.005 + 0.495 * u * u : 0.5 + 0.45 * u;
      b = s * (1.0 + alpha) / (1.0 - alpha);
    }
    if (!high[k] && rng.uniform() < 0.05) {
      // Split in two rows whose sum is exactly s.
      const double part = std::floor(s * 0.35 * 4.0) / 4.0;
      out.sales.push_back({seller, buyer, part, Side::Sale});
      out.sales.push_back({seller, buyer, s - part, Side::Sale});
    } else {
      out.sales.push_back({seller, buyer, s, Side::Sale});
    }
    out.purchases.push_back({seller, buyer, b, Side::Purchase});
  }
  const std::size_t orphans = std::max<std::size_t>(1, pairs / 100);
  for (std::size_t k = 0; k < orphans; ++k) {
    const std::string a = firm(rng.below(firms));
    out.sales.push_back({a, fmt::format("X{:06d}", k), d_low, Side::Sale});
    out.purchases.push_back({fmt::format("Y{:06d}", k), a, d_low, Side::Purchase});
  }
  auto shuffle = [&](std::vector<DeclarationRecord>& rows) {
    for (std::size_t i = rows.size() - 1; i > 0; --i) std::swap(rows[i], rows[rng.below(i + 1)]);
  };
  shuffle(out.sales);
  shuffle(out.purchases);
  return out;
}

}  // namespace vatgame
