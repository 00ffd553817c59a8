#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "gsmsim/traffic.hpp"

namespace gsmsim {

// Broadcast access parameters: backoff window (frames), response wait window
// (frames) and the connection-attempt limit.
struct AccessParams {
  int backoff_window = 20;   // uniform wait in {0..backoff_window-1} frames
  int response_window = 105; // frames a request waits for its grant
  int max_attempts = 4;

  void validate() const {
    if (backoff_window < 1 || response_window < 1 || max_attempts < 1)
      throw std::invalid_argument("access parameters must be >= 1");
  }
};

enum class DeviceState : std::uint8_t { idle, backoff, awaiting_grant, connected };

// Per-device access state. A device carries at most one report through the
// access procedure at a time; reports arriving meanwhile are dropped and
// counted as application overruns (except on a held periodic connection,
// where they are queued on the connection instead).
struct Device {
  std::int32_t id = -1;
  std::int16_t class_index = -1;
  std::uint8_t rach_channel = 0;
  DeviceState state = DeviceState::idle;
  int attempts_used = 0;
  std::int64_t backoff_until = -1;
  std::int64_t s_expiry = -1;
  std::int64_t report_arrival = -1;
  std::int32_t connection = -1;
};

// Slotted-ALOHA outcome for one RACH slot: a lone transmitter succeeds, two or
// more all collide (no capture). Returns the winner, if any.
inline std::optional<std::int32_t> resolve_rach_slot(std::span<const std::int32_t> transmitters) {
  if (transmitters.size() == 1) return transmitters.front();
  return std::nullopt;
}

// Channel 0 carries asynchronous classes; when the requests of synchronous
// (alarm) classes are split off, they use channel 1.
inline int select_rach_channel(const DeviceClass& cls, bool separate_rach) {
  return (separate_rach && cls.distribution == ArrivalKind::beta_alarm) ? 1 : 0;
}

inline int rach_channel_count(bool separate_rach) { return separate_rach ? 2 : 1; }

}  // namespace gsmsim
