#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gsmsim/allocator.hpp"

namespace gsmsim {

// Physical coding scheme; CS1 is the most robust one and carries 22 payload
// bytes per radio block.
struct CodingScheme {
  int block_payload_bytes = 22;

  void validate() const {
    if (block_payload_bytes < 1) throw std::invalid_argument("block payload must be >= 1 byte");
  }
};

inline int blocks_required(int payload_bytes, const CodingScheme& cs = {}) {
  if (payload_bytes < 1) throw std::domain_error("payload must be >= 1 byte");
  return (payload_bytes + cs.block_payload_bytes - 1) / cs.block_payload_bytes;
}

// One report moving through an established connection.
struct PendingReport {
  std::int64_t arrival_frame = 0;
  int blocks_left = 0;
};

// An established uplink data connection. One-shot and legacy connections close
// when their single report is fully transmitted; periodic expanded-USF
// connections persist and serve reports from a queue.
struct Connection {
  std::int32_t device = -1;
  UsfAllocation allocation;
  std::deque<PendingReport> reports;
  std::int64_t established_frame = 0;
  std::int64_t last_served_frame = -1;
  int served_blocks = 0;
  bool active = false;
  TrafficMode mode = TrafficMode::one_shot;

  bool backlogged() const { return !reports.empty(); }
};

// Selects which claimant of the upcoming block gets announced: a one-shot
// reservation owns its occurrence outright; otherwise the least recently
// served backlogged claimant wins, lower connection key breaking ties. Returns
// nullopt for an idle block.
inline std::optional<std::int32_t> select_transmitter(
    const std::vector<OccupancyCalendar::Claimant>& claimants,
    const std::vector<Connection>& connections) {
  std::optional<std::int32_t> best;
  for (const auto& cl : claimants) {
    const Connection& c = connections[static_cast<std::size_t>(cl.key)];
    if (!c.active || !c.backlogged()) continue;
    if (cl.one_shot_reserved) return cl.key;
    if (!best) {
      best = cl.key;
      continue;
    }
    const Connection& b = connections[static_cast<std::size_t>(*best)];
    if (c.last_served_frame < b.last_served_frame ||
        (c.last_served_frame == b.last_served_frame && c.device < b.device))
      best = cl.key;
  }
  return best;
}

}  // namespace gsmsim
