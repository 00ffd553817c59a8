#include <catch2/catch_amalgamated.hpp>

#include "gsmsim/access.hpp"

using namespace gsmsim;

TEST_CASE("a lone RACH transmitter succeeds, collisions fail everyone") {
  const std::int32_t one[] = {7};
  auto r = resolve_rach_slot(one);
  REQUIRE(r.has_value());
  CHECK(*r == 7);

  const std::int32_t two[] = {1, 2};
  CHECK(!resolve_rach_slot(two).has_value());

  CHECK(!resolve_rach_slot({}).has_value());
}

TEST_CASE("rach channel split routes alarm classes only") {
  DeviceClass meter;
  meter.distribution = ArrivalKind::beta_alarm;
  DeviceClass sign;
  sign.distribution = ArrivalKind::uniform_periodic;
  DeviceClass sensor;
  sensor.distribution = ArrivalKind::poisson;

  CHECK(select_rach_channel(meter, false) == 0);
  CHECK(select_rach_channel(sign, false) == 0);
  CHECK(select_rach_channel(meter, true) == 1);
  CHECK(select_rach_channel(sign, true) == 0);
  CHECK(select_rach_channel(sensor, true) == 0);
  CHECK(rach_channel_count(false) == 1);
  CHECK(rach_channel_count(true) == 2);
}

TEST_CASE("access parameters are validated") {
  AccessParams p;
  p.validate();
  p.backoff_window = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.max_attempts = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
