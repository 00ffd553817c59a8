#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "gsmsim/rng.hpp"
#include "gsmsim/traffic.hpp"

using namespace gsmsim;

TEST_CASE("streams are reproducible and independent by identity") {
  RngStream a(42, "arrivals", 7), b(42, "arrivals", 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42, "arrivals", 8), d(42, "backoff", 7);
  RngStream a2(42, "arrivals", 7);
  bool differs_sub = false, differs_label = false;
  for (int i = 0; i < 10; ++i) {
    const auto v = a2.next_u64();
    differs_sub |= v != c.next_u64();
    differs_label |= v != d.next_u64();
  }
  CHECK(differs_sub);
  CHECK(differs_label);
}

TEST_CASE("uniform backoff draw is flat over the window") {
  // chi-square over 1e5 draws of {0..19}; 19 dof, 0.001 quantile ~ 43.8
  RngStream s(1, "backoff", 0);
  std::vector<int> counts(20, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[s.next_below(20)];
  double chi2 = 0.0;
  const double expect = n / 20.0;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 43.8);

  RngStream t(1, "backoff", 1);
  for (int i = 0; i < 1000; ++i) CHECK(t.next_below(1) == 0);
}

TEST_CASE("exponential draws have the configured mean") {
  RngStream s(3, "arrivals", 0);
  const double rate = 1.67e-2;
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += s.exponential(rate);
  const double mean = sum / n;
  CHECK(mean == Catch::Approx(1.0 / rate).epsilon(0.01));
}

TEST_CASE("beta(3,4) sampler matches the analytic distribution") {
  const int n = 100000;
  std::vector<double> xs;
  xs.reserve(n);
  RngStream s(5, "activation", 0);
  for (int i = 0; i < n; ++i) xs.push_back(s.beta34());
  std::sort(xs.begin(), xs.end());

  // Kolmogorov-Smirnov against the closed-form CDF
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = RngStream::beta34_cdf(xs[static_cast<std::size_t>(i)]);
    ks = std::max(ks, std::abs(f - (i + 1.0) / n));
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
  }
  CHECK(ks < 0.01);

  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  CHECK(mean == Catch::Approx(3.0 / 7.0).epsilon(0.01));
  CHECK(xs.front() > 0.0);
  CHECK(xs.back() < 1.0);
}

TEST_CASE("alarm activations cover the activation window once per device") {
  const auto frames = alarm_activation_frames(100000, 120.0, 0.0, 0.005, 9, "alarm");
  REQUIRE(frames.size() == 100000);
  double mean_s = 0.0;
  for (auto f : frames) {
    CHECK(f >= 0);
    CHECK(f < 120.0 / 0.005);
    mean_s += f * 0.005;
  }
  mean_s /= static_cast<double>(frames.size());
  CHECK(mean_s == Catch::Approx(120.0 * 3.0 / 7.0).epsilon(0.01));

  CHECK(alarm_activation_frames(0, 120.0, 0.0, 0.005, 9, "alarm").empty());
}

TEST_CASE("poisson arrival process: window counts have unit dispersion") {
  DeviceClass cls;
  cls.name = "meters";
  cls.count = 1;
  cls.arrival_rate = 5.0;
  cls.payload_bytes = 100;
  ArrivalProcess p(cls, RngStream(11, "arrivals", 0), 0.005);

  const int windows = 10000;
  std::vector<int> counts(windows, 0);
  for (;;) {
    const double t = p.next();
    if (t >= windows) break;
    ++counts[static_cast<std::size_t>(t)];
  }
  double mean = 0.0;
  for (int c : counts) mean += c;
  mean /= windows;
  double var = 0.0;
  for (int c : counts) var += (c - mean) * (c - mean);
  var /= windows - 1;
  const double dispersion = var / mean;
  CHECK(dispersion > 0.9);
  CHECK(dispersion < 1.1);
}

TEST_CASE("uniform-periodic arrivals are strictly periodic after a random phase") {
  DeviceClass cls;
  cls.name = "signs";
  cls.count = 1;
  cls.arrival_rate = 3.33e-2;
  cls.payload_bytes = 1;
  cls.distribution = ArrivalKind::uniform_periodic;
  ArrivalProcess p(cls, RngStream(13, "arrivals", 0), 0.005);

  const double period = 1.0 / cls.arrival_rate;
  const double first = p.next();
  CHECK(first >= 0.0);
  CHECK(first < period);
  double prev = first;
  for (int i = 0; i < 50; ++i) {
    const double t = p.next();
    CHECK(t - prev == Catch::Approx(period).epsilon(1e-12));
    prev = t;
  }
}

TEST_CASE("per-window arrivals of periodic devices stay bounded") {
  // distinct phases never synchronize: counts per window are capped by
  // ceil(window/period) per device
  const double period = 30.03;
  const int devices = 40;
  std::vector<ArrivalProcess> ps;
  DeviceClass cls;
  cls.name = "signs";
  cls.count = 1;
  cls.arrival_rate = 1.0 / period;
  cls.payload_bytes = 1;
  cls.distribution = ArrivalKind::uniform_periodic;
  for (int d = 0; d < devices; ++d)
    ps.emplace_back(cls, RngStream(17, "arrivals", static_cast<std::uint64_t>(d)), 0.005);

  std::vector<int> counts(100, 0);
  for (auto& p : ps)
    for (;;) {
      const double t = p.next();
      if (t >= 100.0) break;
      ++counts[static_cast<std::size_t>(t)];
    }
  const int cap = devices * static_cast<int>(std::ceil(1.0 / period) + 1);
  for (int c : counts) CHECK(c <= cap);
}

TEST_CASE("degenerate arrival rates are rejected") {
  DeviceClass cls;
  cls.name = "x";
  cls.count = 1;
  cls.arrival_rate = 300.0;  // period 3.3 ms, shorter than one frame
  cls.payload_bytes = 1;
  CHECK_THROWS_AS(ArrivalProcess(cls, RngStream(1, "arrivals", 0), 0.005), std::invalid_argument);
}

TEST_CASE("aggregate asynchronous rate sums per-sector class rates") {
  Scenario s;
  DeviceClass c;
  c.name = "a";
  c.count = 300;
  c.arrival_rate = 0.1;
  c.payload_bytes = 10;
  s.classes.push_back(c);
  CHECK(aggregate_async_rate(s) == Catch::Approx(10.0));

  CHECK(aggregate_async_rate(Scenario{}) == 0.0);

  const Scenario ref = suburban_m2m_scenario();
  const double rate = aggregate_async_rate(ref);
  CHECK(rate > 38.0);
  CHECK(rate < 44.0);
}

TEST_CASE("class validation names the offending field") {
  DeviceClass c;
  c.name = "bad";
  c.count = -1;
  c.payload_bytes = 10;
  c.arrival_rate = 0.1;
  CHECK_THROWS_WITH(c.validate(), Catch::Matchers::ContainsSubstring("count"));
  c.count = 1;
  c.payload_bytes = 0;
  CHECK_THROWS_WITH(c.validate(), Catch::Matchers::ContainsSubstring("payload"));
}
