#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gsmsim {

// Counters over one measurement window. "RACH arrivals" are transmissions
// (fresh reports plus retransmissions), "AGCH arrivals" are successful RACH
// requests entering the grant queue, "DATA arrivals" are granted connections.
struct StageStats {
  double window_s = 0.0;

  std::int64_t rach_attempts = 0;
  std::int64_t rach_first_attempts = 0;  // fresh reports entering contention
  std::int64_t rach_successes = 0;
  std::int64_t agch_granted = 0;
  std::int64_t agch_deadline_blocked = 0;
  std::int64_t data_blocked = 0;
  std::int64_t data_block_events = 0;
  std::int64_t outages = 0;
  std::int64_t delivered = 0;
  std::int64_t overruns = 0;
  std::int64_t arrivals = 0;
  std::int64_t accessing_reports = 0;

  // events per 1-second window, indexed from the start of the window
  std::vector<std::uint32_t> hist_rach;
  std::vector<std::uint32_t> hist_agch;
  std::vector<std::uint32_t> hist_data;
};

struct StageRates {
  double lambda_rach = 0.0;
  double lambda_agch = 0.0;
  double lambda_usf = 0.0;
  std::optional<double> p_rach;
  std::optional<double> p_agch;
};

inline StageRates stage_rates(const StageStats& s) {
  if (!(s.window_s > 0)) throw std::domain_error("measurement window must be positive");
  StageRates r;
  r.lambda_rach = s.rach_attempts / s.window_s;
  r.lambda_agch = s.rach_successes / s.window_s;
  r.lambda_usf = s.agch_granted / s.window_s;
  if (s.rach_attempts > 0) r.p_rach = double(s.rach_successes) / double(s.rach_attempts);
  if (s.rach_successes > 0) r.p_agch = double(s.agch_granted) / double(s.rach_successes);
  return r;
}

// Per-stage blocking and outage fractions. The DATA denominator excludes
// requests already lost at the AGCH stage; outage is per accessing report.
struct BlockingReport {
  std::optional<double> p_b_agch;
  std::optional<double> p_b_data;
  std::optional<double> outage;
};

inline BlockingReport blocking_report(const StageStats& s) {
  BlockingReport b;
  if (s.rach_successes > 0)
    b.p_b_agch = double(s.agch_deadline_blocked) / double(s.rach_successes);
  const std::int64_t reached_data = s.rach_successes - s.agch_deadline_blocked;
  if (reached_data > 0) b.p_b_data = double(s.data_blocked) / double(reached_data);
  if (s.accessing_reports > 0) b.outage = double(s.outages) / double(s.accessing_reports);
  return b;
}

enum class TruncationVariant { mass_at_cap, renormalized };

// Poisson(lambda) pmf over {0..cap} via the multiplicative recurrence.
inline std::vector<double> poisson_pmf_upto(double lambda, int cap) {
  std::vector<double> p(static_cast<std::size_t>(cap) + 1, 0.0);
  double v = std::exp(-lambda);
  for (int k = 0; k <= cap; ++k) {
    p[static_cast<std::size_t>(k)] = v;
    v *= lambda / (k + 1);
  }
  return p;
}

// Distribution of per-second arrivals seen by a stage fed at rate `lambda`
// through a bottleneck of `cap` events per second: Poisson below the cap with
// the excess either piled onto the cap (mass_at_cap) or renormalized away.
inline std::vector<double> truncated_poisson_distribution(double lambda, int cap,
                                                          TruncationVariant variant) {
  if (!(lambda > 0)) throw std::domain_error("rate must be positive");
  if (cap < 0) throw std::domain_error("cap must be >= 0");
  std::vector<double> p = poisson_pmf_upto(lambda, cap);
  double below = 0.0;
  for (int k = 0; k < cap; ++k) below += p[static_cast<std::size_t>(k)];
  if (variant == TruncationVariant::mass_at_cap) {
    p[static_cast<std::size_t>(cap)] = 1.0 - below;
  } else {
    const double total = below + p[static_cast<std::size_t>(cap)];
    for (auto& v : p) v /= total;
  }
  return p;
}

inline double truncated_poisson_pmf(double lambda, int cap, int k, TruncationVariant variant) {
  if (k < 0 || k > cap) return 0.0;
  return truncated_poisson_distribution(lambda, cap, variant)[static_cast<std::size_t>(k)];
}

// Empirical distribution of per-second counts; counts above `censor_at` are
// folded into that bin when non-negative (mirrors the mass_at_cap censoring).
inline std::vector<double> count_distribution(const std::vector<std::uint32_t>& per_second,
                                              int censor_at = -1) {
  if (per_second.empty()) return {};
  std::uint32_t maxc = 0;
  for (auto c : per_second) maxc = std::max(maxc, c);
  int top = static_cast<int>(maxc);
  if (censor_at >= 0) top = std::min(top, censor_at);
  std::vector<double> d(static_cast<std::size_t>(top) + 1, 0.0);
  for (auto c : per_second) {
    int k = static_cast<int>(c);
    if (censor_at >= 0) k = std::min(k, censor_at);
    d[static_cast<std::size_t>(k)] += 1.0;
  }
  for (auto& v : d) v /= static_cast<double>(per_second.size());
  return d;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0.0;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    tv += std::abs(x - y);
  }
  return 0.5 * tv;
}

inline double percentile(std::vector<double> sorted_values, double q) {
  if (sorted_values.empty()) return 0.0;
  const double idx = q * (static_cast<double>(sorted_values.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
  const double frac = idx - static_cast<double>(lo);
  return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
}

}  // namespace gsmsim
