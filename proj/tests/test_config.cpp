#include <catch2/catch_amalgamated.hpp>

#include "gsmsim/config.hpp"

using namespace gsmsim;

TEST_CASE("scenario text round-trips through emit and parse") {
  const Scenario ref = suburban_m2m_scenario();
  const Scenario back = parse_scenario_text(emit_scenario(ref));
  REQUIRE(back.classes.size() == ref.classes.size());
  CHECK(back.sector_fraction == ref.sector_fraction);
  for (std::size_t i = 0; i < ref.classes.size(); ++i) {
    CHECK(back.classes[i].name == ref.classes[i].name);
    CHECK(back.classes[i].count == ref.classes[i].count);
    CHECK(back.classes[i].arrival_rate == ref.classes[i].arrival_rate);
    CHECK(back.classes[i].payload_bytes == ref.classes[i].payload_bytes);
    CHECK(back.classes[i].distribution == ref.classes[i].distribution);
    CHECK(back.classes[i].reporting_interval_s == ref.classes[i].reporting_interval_s);
  }
}

TEST_CASE("the built-in reference scenario carries the catalogued fleet") {
  const Scenario s = suburban_m2m_scenario();
  CHECK(s.classes.size() == 10);
  CHECK(s.classes[0].count == 13941);
  CHECK(s.devices_per_sector(s.classes[0]) == 4647);
  int alarms = 0;
  for (const auto& c : s.classes)
    if (c.distribution == ArrivalKind::beta_alarm) ++alarms;
  CHECK(alarms == 1);

  const Scenario bg = commercial_background_scenario();
  CHECK(bg.classes.size() == 8);
  CHECK(aggregate_async_rate(bg) == Catch::Approx(40.8).margin(1.0));

  CHECK(builtin_scenario("suburban-m2m").has_value());
  CHECK(builtin_scenario("commercial-background").has_value());
  CHECK(!builtin_scenario("nope").has_value());
}

TEST_CASE("scenario parse errors carry line numbers and field names") {
  CHECK_THROWS_WITH(parse_scenario_text("[class]\nname = x\ncount = -1\npayload = 5\n"
                                        "distribution = poisson\narrival_rate = 1\n"),
                    Catch::Matchers::ContainsSubstring("count"));
  CHECK_THROWS_WITH(parse_scenario_text("[class]\ndistribution = weird\n"),
                    Catch::Matchers::ContainsSubstring("line 2"));
  CHECK_THROWS_WITH(parse_scenario_text("bogus line without equals\n"),
                    Catch::Matchers::ContainsSubstring("line 1"));
  CHECK_THROWS_WITH(parse_scenario_text("[class]\nname = x\ncount = abc\n"),
                    Catch::Matchers::ContainsSubstring("line 3"));
}

TEST_CASE("an alarm-only scenario is a valid configuration") {
  const char* text =
      "sector_fraction = 3\n[class]\nname = alarm-meters\ncount = 1500\n"
      "distribution = beta_alarm\nactivation_period = 120\npayload = 100\n";
  const Scenario s = parse_scenario_text(text);
  REQUIRE(s.classes.size() == 1);
  CHECK(s.classes[0].activation_period_s == 120.0);
}

TEST_CASE("config text round-trips") {
  SimConfig c;
  c.seed = 77;
  c.warmup_s = 12.5;
  c.measure_s = 333;
  c.variant = Variant::agch_eusf;
  c.eusf_x = 3;
  c.eusf_m_gap = 1;
  c.separate_rach = true;
  c.retain_on_usf_block = true;
  c.plan.agch_blocks_per_multiframe = 6;
  c.access.backoff_window = 10;
  c.truncation = TruncationVariant::renormalized;

  const SimConfig back = parse_config_text(emit_config(c));
  CHECK(back.seed == c.seed);
  CHECK(back.warmup_s == c.warmup_s);
  CHECK(back.measure_s == c.measure_s);
  CHECK(back.variant == c.variant);
  CHECK(back.eusf_x == c.eusf_x);
  CHECK(back.eusf_m_gap == c.eusf_m_gap);
  CHECK(back.separate_rach == c.separate_rach);
  CHECK(back.retain_on_usf_block == c.retain_on_usf_block);
  CHECK(back.plan.agch_blocks_per_multiframe == c.plan.agch_blocks_per_multiframe);
  CHECK(back.access.backoff_window == c.access.backoff_window);
  CHECK(back.truncation == c.truncation);
  CHECK(emit_config(back) == emit_config(c));
}

TEST_CASE("sweep axes rescale exactly one class") {
  const Scenario fleet = poisson_fleet("f", 3000, 40.0, 152);
  const Scenario at60 = apply_axis(fleet, SweepAxis::lambda, 60.0);
  CHECK(aggregate_async_rate(at60) == Catch::Approx(60.0));

  Scenario alarm;
  DeviceClass a;
  a.name = "alarm";
  a.count = 100;
  a.payload_bytes = 100;
  a.distribution = ArrivalKind::beta_alarm;
  alarm.classes.push_back(a);
  const Scenario n = apply_axis(alarm, SweepAxis::alarm_count, 2300);
  CHECK(n.classes[0].count == 2300);

  CHECK_THROWS(apply_axis(alarm, SweepAxis::lambda, 10.0));
  CHECK_THROWS(apply_axis(fleet, SweepAxis::alarm_count, 10.0));
  const Scenario both = suburban_m2m_scenario();
  CHECK_THROWS(apply_axis(both, SweepAxis::lambda, 10.0));  // several async classes
}

TEST_CASE("an empty sweep produces only the header") {
  SimConfig cfg;
  const auto rows = sweep(cfg, poisson_fleet("f", 300, 1.0, 22), SweepAxis::lambda, {}, {1});
  CHECK(rows.empty());
  CHECK(sweep_csv(rows) == run_csv_header() + "\n");
}

TEST_CASE("csv rows have a fixed schema") {
  const std::string header = run_csv_header();
  const auto commas = std::count(header.begin(), header.end(), ',');
  RunReport rep;
  rep.window.window_s = 1;
  const std::string row = run_csv_row(1.0, rep);
  CHECK(std::count(row.begin(), row.end(), ',') == commas);
}
