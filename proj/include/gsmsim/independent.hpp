#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gsmsim/data_plane.hpp"
#include "gsmsim/engine.hpp"

namespace gsmsim {

enum class Stage { agch, data };

// Result of feeding one access stage in isolation with a fresh Poisson request
// stream (no RACH contention, no retransmission feedback). This is the
// independent-stage methodology the coupled simulation is compared against.
struct IndependentStageReport {
  double offered_rate = 0.0;
  std::int64_t arrivals = 0;
  std::int64_t blocked = 0;
  std::int64_t served = 0;
  double p_b = 0.0;
};

inline IndependentStageReport independent_stage_run(double lambda, Stage stage,
                                                    const SimConfig& cfg, int payload_bytes) {
  if (!(lambda > 0)) throw std::invalid_argument("offered rate must be positive");
  IndependentStageReport rep;
  rep.offered_rate = lambda;

  const int fps = cfg.plan.frames_per_second();
  const std::int64_t warmup_frames = static_cast<std::int64_t>(cfg.warmup_s * fps + 0.5);
  const std::int64_t end_frame =
      warmup_frames + static_cast<std::int64_t>(cfg.measure_s * fps + 0.5);

  RngStream arrivals_rng(cfg.seed, stage == Stage::agch ? "indep-agch" : "indep-data");
  double next_arrival_s = arrivals_rng.exponential(lambda);

  AgchQueue queue;
  OccupancyCalendar calendar(cfg.plan, cfg.eusf_x, cfg.eusf_m_gap);
  std::vector<Connection> connections;
  std::vector<std::int32_t> free_slots;
  std::vector<std::int32_t> current_tx(static_cast<std::size_t>(cfg.plan.n_data_pdch()), -1);
  std::vector<OccupancyCalendar::Claimant> scratch;
  const int n_blocks = blocks_required(payload_bytes, cfg.coding);
  std::int32_t next_device = 0;

  auto acquire = [&]() -> std::int32_t {
    if (!free_slots.empty()) {
      const std::int32_t k = free_slots.back();
      free_slots.pop_back();
      return k;
    }
    connections.emplace_back();
    return static_cast<std::int32_t>(connections.size() - 1);
  };

  for (std::int64_t f = 0; f < end_frame; ++f) {
    const bool in_window = f >= warmup_frames;
    // fresh Poisson arrivals straight into the stage
    while (static_cast<std::int64_t>(next_arrival_s * fps) <= f) {
      if (in_window) ++rep.arrivals;
      if (stage == Stage::agch) {
        GrantRequest r;
        r.device = next_device++;
        r.rach_success_frame = f;
        r.deadline_frame = f + cfg.access.response_window;
        r.payload_bytes = payload_bytes;
        queue.push(r);
      } else {
        const std::int32_t key = acquire();
        AllocDemand d;
        if (cfg.variant == Variant::agch_eusf) {
          d.mode = AllocMode::eusf_one_shot;
          d.n_blocks = n_blocks;
        }
        auto a = calendar.allocate(key, d, f / cfg.plan.frames_per_multiframe);
        if (!a) {
          free_slots.push_back(key);
          if (in_window) ++rep.blocked;
        } else {
          Connection& c = connections[static_cast<std::size_t>(key)];
          c.device = next_device++;
          c.allocation = *a;
          c.reports.clear();
          c.reports.push_back({f, n_blocks});
          c.last_served_frame = -1;
          c.active = true;
          c.mode = TrafficMode::one_shot;
        }
      }
      next_arrival_s += arrivals_rng.exponential(lambda);
    }

    if (stage == Stage::agch) {
      if (is_agch_block_boundary(f, cfg.plan)) {
        auto res = queue.emit(f, grants_per_message(cfg.variant), false,
                              [](const GrantRequest&) { return std::optional<UsfAllocation>(UsfAllocation{}); });
        if (in_window) {
          rep.blocked += res.deadline_blocked;
          rep.served += static_cast<std::int64_t>(res.granted.size());
        }
      }
      continue;
    }

    // data stage: serve blocks exactly like the coupled simulation
    if (f % kFramesPerBlock != kFramesPerBlock - 1) continue;
    const FramePosition next = locate(f + 1, cfg.plan);
    const int first = cfg.plan.first_data_pdch();
    for (int i = 0; i < cfg.plan.n_data_pdch(); ++i) {
      const std::int32_t cur = current_tx[static_cast<std::size_t>(i)];
      if (cur >= 0) {
        Connection& c = connections[static_cast<std::size_t>(cur)];
        if (--c.reports.front().blocks_left == 0) {
          if (in_window) ++rep.served;
          c.reports.pop_front();
          c.active = false;
          calendar.release(cur);
          free_slots.push_back(cur);
        }
      }
      calendar.cell_claimants(first + i, next.block, next.multiframe, scratch);
      const auto sel = select_transmitter(scratch, connections);
      current_tx[static_cast<std::size_t>(i)] = sel.value_or(-1);
      if (sel) {
        Connection& c = connections[static_cast<std::size_t>(*sel)];
        c.last_served_frame = f;
        if (c.allocation.mode == AllocMode::eusf_one_shot)
          calendar.consume_reserved(*sel, next.multiframe, next.block);
      }
    }
  }

  if (rep.arrivals > 0) rep.p_b = double(rep.blocked) / double(rep.arrivals);
  return rep;
}

}  // namespace gsmsim
