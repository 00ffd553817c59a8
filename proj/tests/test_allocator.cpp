#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <set>

#include "gsmsim/allocator.hpp"
#include "gsmsim/rng.hpp"
#include "support.hpp"

using namespace gsmsim;

namespace {
ChannelPlan default_plan() { return ChannelPlan{}; }
}  // namespace

TEST_CASE("legacy allocation is first-fit with the lowest free flag") {
  OccupancyCalendar cal(default_plan(), 1, 0);

  auto a = cal.allocate_legacy(0);
  REQUIRE(a.has_value());
  CHECK(a->pdch == 1);
  CHECK(a->usf == 1);

  // fill pdch 1, the next connection spills to pdch 2
  for (std::int32_t k = 1; k < 7; ++k) REQUIRE(cal.allocate_legacy(k).has_value());
  CHECK(cal.legacy_count(1) == 7);
  auto b = cal.allocate_legacy(7);
  REQUIRE(b.has_value());
  CHECK(b->pdch == 2);
  CHECK(b->usf == 1);
}

TEST_CASE("legacy capacity is seven per PDCH and forty-nine in total") {
  OccupancyCalendar cal(default_plan(), 1, 0);
  for (std::int32_t k = 0; k < 49; ++k) REQUIRE(cal.allocate_legacy(k).has_value());
  CHECK(cal.legacy_total() == 49);
  CHECK(!cal.allocate_legacy(49).has_value());

  cal.release(10);
  auto again = cal.allocate_legacy(100);
  REQUIRE(again.has_value());
  CHECK(cal.legacy_total() == 49);
}

TEST_CASE("release frees the flag for immediate reuse") {
  OccupancyCalendar cal(default_plan(), 1, 0);
  REQUIRE(cal.allocate_legacy(0).has_value());
  cal.release(0);
  CHECK(cal.live_claims() == 0);
  CHECK_THROWS_AS(cal.release(0), std::logic_error);

  auto a = cal.allocate_legacy(1);
  REQUIRE(a.has_value());
  CHECK(a->pdch == 1);
  CHECK(a->usf == 1);
}

TEST_CASE("expanded-USF allocation reproduces the four-device multiplexing example") {
  // X = 2 valid multiframes, 2 non-valid; every device asks for one block per
  // validity window (22 bytes per 1 s against a 0.96 s window period).
  OccupancyCalendar cal(default_plan(), 2, 2);
  const double demand = 1.0;  // blocks per second

  auto d1 = cal.allocate_eusf_periodic(1, demand, 1);
  auto d2 = cal.allocate_eusf_periodic(2, demand, 1);
  auto d3 = cal.allocate_eusf_periodic(3, demand, 1);
  auto d4 = cal.allocate_eusf_periodic(4, demand, 3);
  REQUIRE(d1.has_value());
  REQUIRE(d2.has_value());
  REQUIRE(d3.has_value());
  REQUIRE(d4.has_value());

  // devices 1 and 2 share block 0 in the same multiframes with distinct flags
  CHECK(d1->pdch == 1);
  CHECK(d1->block_set == std::vector<int>{0});
  CHECK(d1->start_multiframe == 1);
  CHECK(d1->usf == 1);
  CHECK(d2->block_set == std::vector<int>{0});
  CHECK(d2->start_multiframe == 1);
  CHECK(d2->usf != d1->usf);
  CHECK(d2->usf == 2);

  // device 3 cannot join block 0 without starving it, so it lands on block 1
  // and reuses a flag already in service on the same multiframes
  CHECK(d3->block_set == std::vector<int>{1});
  CHECK(d3->start_multiframe == 1);
  CHECK((d3->usf == d1->usf || d3->usf == d2->usf));

  // device 4 arrives two multiframes later: same block and flag as device 1,
  // multiplexed purely by the validity pattern
  CHECK(d4->block_set == std::vector<int>{0});
  CHECK(d4->start_multiframe == 3);
  CHECK(d4->usf == d1->usf);

  // validity patterns: d1 valid in mf 1,2, idle in 3,4, valid again in 5,6
  CHECK(d1->valid_at(1));
  CHECK(d1->valid_at(2));
  CHECK(!d1->valid_at(3));
  CHECK(!d1->valid_at(4));
  CHECK(d1->valid_at(5));
  CHECK(d4->valid_at(3));
  CHECK(d4->valid_at(4));
  CHECK(!d4->valid_at(5));

  std::set<int> usfs{d1->usf, d2->usf, d3->usf, d4->usf};
  CHECK(usfs.size() <= 3);  // four devices, at most three distinct flags

  // admission never starved anyone
  for (std::int32_t k = 1; k <= 4; ++k) CHECK(cal.guaranteed_rate(k) + 1e-9 >= demand);

  CHECK(gsmsim::testing::scan_distinct_usf(cal, default_plan(), 0, 12).empty());
}

TEST_CASE("periodic admission fails once the guarantee cannot be met") {
  OccupancyCalendar cal(default_plan(), 2, 2);
  // each claim needs a full exclusive block strip (2 of the 4 phase cells), so
  // a block fits two disjoint strips: 12 blocks x 7 data PDCHs x 2
  const double demand = 2.0 / 0.96;
  std::int32_t k = 0;
  int admitted = 0;
  while (cal.allocate_eusf_periodic(k, demand, 0).has_value()) {
    ++admitted;
    ++k;
    REQUIRE(admitted <= 12 * 7 * 2);
  }
  CHECK(admitted == 12 * 7 * 2);
  for (std::int32_t i = 0; i < k; ++i) CHECK(cal.guaranteed_rate(i) + 1e-9 >= demand);
}

TEST_CASE("one-shot reservations land in the earliest open window") {
  OccupancyCalendar cal(default_plan(), 2, 2);

  auto a = cal.allocate_eusf_one_shot(0, 1, 0);
  REQUIRE(a.has_value());
  CHECK(a->reserved.size() == 1);
  CHECK(a->start_multiframe == 1);  // strictly after the grant multiframe
  CHECK(a->reserved.front().first == 1);
  CHECK(a->reserved.front().second == 0);

  auto b = cal.allocate_eusf_one_shot(1, 7, 0);
  REQUIRE(b.has_value());
  CHECK(b->reserved.size() == 7);
  for (const auto& [mf, blk] : b->reserved) {
    CHECK(mf >= b->start_multiframe);
    CHECK(mf < b->start_multiframe + 2);
  }

  // demands that cannot fit any window are structural failures
  CHECK(!cal.allocate_eusf_one_shot(2, 2 * 12 + 1, 0).has_value());

  CHECK(gsmsim::testing::scan_distinct_usf(cal, default_plan(), 0, 8).empty());
}

TEST_CASE("one-shot reservations defer under load instead of overbooking") {
  ChannelPlan plan;
  plan.n_pdch = 2;  // one data PDCH
  OccupancyCalendar cal(plan, 2, 0);
  std::int64_t last_start = 0;
  for (std::int32_t k = 0; k < 10; ++k) {
    auto a = cal.allocate_eusf_one_shot(k, 12, 0);
    REQUIRE(a.has_value());
    CHECK(a->start_multiframe >= last_start);
    last_start = a->start_multiframe;
  }
  // 10 x 12 blocks on a single PDCH need at least 10 multiframes of calendar
  CHECK(last_start >= 9);
  CHECK(gsmsim::testing::scan_distinct_usf(cal, plan, 0, 16).empty());
}

TEST_CASE("agch emission: legacy sends one grant per message") {
  AgchQueue q;
  for (int i = 0; i < 3; ++i) {
    GrantRequest r;
    r.device = i;
    r.rach_success_frame = 10;
    r.deadline_frame = 10 + 105;
    q.push(r);
  }
  auto res = q.emit(23, 1, false, [](const GrantRequest&) {
    return std::optional<UsfAllocation>(UsfAllocation{});
  });
  CHECK(res.granted.size() == 1);
  CHECK(res.granted.front().request.device == 0);
  CHECK(q.size() == 2);
  CHECK(res.deadline_blocked == 0);
  CHECK(res.data_blocked == 0);
}

TEST_CASE("agch emission: the improved message carries up to four grants") {
  AgchQueue q;
  for (int i = 0; i < 3; ++i) {
    GrantRequest r;
    r.device = i;
    r.deadline_frame = 200;
    q.push(r);
  }
  auto res = q.emit(23, 4, false, [](const GrantRequest&) {
    return std::optional<UsfAllocation>(UsfAllocation{});
  });
  CHECK(res.granted.size() == 3);
  CHECK(q.empty());
}

TEST_CASE("agch emission: allocation failures are dropped and counted") {
  AgchQueue q;
  for (int i = 0; i < 4; ++i) {
    GrantRequest r;
    r.device = i;
    r.deadline_frame = 200;
    q.push(r);
  }
  auto res = q.emit(23, 4, false,
                    [](const GrantRequest&) { return std::optional<UsfAllocation>(); });
  CHECK(res.granted.empty());
  CHECK(res.data_blocked == 4);
  CHECK(q.empty());
}

TEST_CASE("agch emission: stale requests are purged without consuming capacity") {
  AgchQueue q;
  GrantRequest stale;
  stale.device = 0;
  stale.deadline_frame = 20;  // already past
  q.push(stale);
  q.push(stale);
  GrantRequest live;
  live.device = 2;
  live.deadline_frame = 23;  // delivery at the deadline still counts
  q.push(live);

  auto res = q.emit(23, 1, false, [](const GrantRequest&) {
    return std::optional<UsfAllocation>(UsfAllocation{});
  });
  CHECK(res.deadline_blocked == 2);
  CHECK(res.granted.size() == 1);
  CHECK(res.granted.front().request.device == 2);
}

TEST_CASE("agch emission: retained requests stay queued when no USF is free") {
  AgchQueue q;
  GrantRequest r;
  r.device = 0;
  r.deadline_frame = 500;
  q.push(r);
  auto res =
      q.emit(23, 4, true, [](const GrantRequest&) { return std::optional<UsfAllocation>(); });
  CHECK(res.granted.empty());
  CHECK(res.data_blocked == 0);
  CHECK(res.data_block_events == 1);
  CHECK(q.size() == 1);
}

TEST_CASE("randomized allocate/release keeps every invariant") {
  const ChannelPlan plan = default_plan();
  RngStream rng(99, "prop", 0);
  for (int mode = 0; mode < 2; ++mode) {
    OccupancyCalendar cal(plan, 2, 2);
    std::vector<std::int32_t> live;
    std::int32_t next = 0;
    std::int64_t mf = 0;
    for (int op = 0; op < 4000; ++op) {
      const auto dice = rng.next_below(10);
      if (dice < 6) {
        const std::int32_t k = next++;
        bool ok;
        if (mode == 0) {
          ok = cal.allocate_legacy(k).has_value();
        } else if (rng.next_below(2) == 0) {
          ok = cal.allocate_eusf_periodic(k, 0.2 + 0.3 * rng.next_double(), mf).has_value();
        } else {
          ok = cal.allocate_eusf_one_shot(k, 1 + static_cast<int>(rng.next_below(10)), mf)
                   .has_value();
        }
        if (ok) live.push_back(k);
      } else if (dice < 9) {
        if (!live.empty()) {
          const auto idx = rng.next_below(static_cast<std::uint32_t>(live.size()));
          cal.release(live[idx]);
          live.erase(live.begin() + idx);
        }
      } else {
        ++mf;
      }
      if (op % 64 == 0) {
        CHECK(gsmsim::testing::scan_distinct_usf(cal, plan, mf, mf + 8).empty());
        if (mode == 0) {
          CHECK(cal.legacy_total() <= 49);
          for (int p = 1; p <= 7; ++p) CHECK(cal.legacy_count(p) <= 7);
        } else {
          for (std::int32_t k : live)
            if (cal.allocation_of(k).mode == AllocMode::eusf_periodic)
              CHECK(cal.guaranteed_rate(k) + 1e-9 >= cal.demand_of(k));
        }
      }
    }
  }
}
