#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gsmsim {

// A point in TDMA time. With the default geometry a multiframe is 48 frames
// (12 blocks of 4 frames) lasting 240 ms.
struct FramePosition {
  std::int64_t frame = 0;
  std::int64_t multiframe = 0;
  int block = 0;           // 0..blocks_per_multiframe-1
  int frame_in_block = 0;  // 0..3
};

inline constexpr int kFramesPerBlock = 4;

// Static layout of one carrier: which PDCH carries signaling, how many
// downlink blocks per multiframe are access-grant blocks, and how many RACH
// opportunities each uplink frame offers.
struct ChannelPlan {
  int frames_per_multiframe = 48;
  int n_pdch = 8;
  int signaling_pdch = 0;
  int agch_blocks_per_multiframe = 7;
  int rach_slots_per_frame = 1;
  double frame_duration = 0.005;  // seconds

  int blocks_per_multiframe() const { return frames_per_multiframe / kFramesPerBlock; }
  double multiframe_duration() const { return frames_per_multiframe * frame_duration; }
  int frames_per_second() const {
    return static_cast<int>(std::int64_t(1.0 / frame_duration + 0.5));
  }
  int first_data_pdch() const { return signaling_pdch == 0 ? 1 : 0; }
  int n_data_pdch() const { return n_pdch - 1; }

  // Grant blocks are spread across the multiframe so that consecutive grant
  // opportunities are never more than two blocks apart; only the count is
  // protocol-significant, the placement here keeps the emission cadence smooth.
  std::vector<int> agch_block_ids() const {
    std::vector<int> ids;
    const int b = blocks_per_multiframe();
    const int c = agch_blocks_per_multiframe;
    ids.reserve(c);
    for (int i = 0; i < c; ++i) ids.push_back((i + 1) * b / c + ((i + 1) * b % c ? 1 : 0) - 1);
    return ids;
  }

  void validate() const {
    if (frames_per_multiframe <= 0 || frames_per_multiframe % kFramesPerBlock != 0)
      throw std::invalid_argument("frames_per_multiframe must be a positive multiple of 4");
    if (n_pdch < 2 || signaling_pdch < 0 || signaling_pdch >= n_pdch)
      throw std::invalid_argument("need one signaling PDCH and at least one data PDCH");
    if (agch_blocks_per_multiframe < 0 || agch_blocks_per_multiframe > blocks_per_multiframe())
      throw std::invalid_argument("agch_blocks_per_multiframe out of range");
    if (rach_slots_per_frame < 1) throw std::invalid_argument("rach_slots_per_frame must be >= 1");
    if (!(frame_duration > 0)) throw std::invalid_argument("frame_duration must be positive");
  }
};

inline FramePosition locate(std::int64_t frame, const ChannelPlan& plan = {}) {
  if (frame < 0) throw std::domain_error("frame index must be non-negative");
  FramePosition p;
  p.frame = frame;
  p.multiframe = frame / plan.frames_per_multiframe;
  const int within = static_cast<int>(frame % plan.frames_per_multiframe);
  p.block = within / kFramesPerBlock;
  p.frame_in_block = within % kFramesPerBlock;
  return p;
}

inline std::int64_t frame_of(const FramePosition& p, const ChannelPlan& plan = {}) {
  return p.multiframe * plan.frames_per_multiframe + p.block * kFramesPerBlock + p.frame_in_block;
}

// Grant messages per second the downlink signaling PDCH can carry.
inline double agch_capacity_per_second(const ChannelPlan& plan) {
  return plan.agch_blocks_per_multiframe / plan.multiframe_duration();
}

// RACH opportunities per second (per logical RACH channel).
inline double rach_capacity_per_second(const ChannelPlan& plan) {
  return plan.rach_slots_per_frame / plan.frame_duration;
}

// If `frame` is the last frame of one of the plan's grant blocks, returns the
// index of that grant block within the multiframe (0-based), else nullopt.
inline std::optional<int> is_agch_block_boundary(std::int64_t frame, const ChannelPlan& plan) {
  if (frame < 0) return std::nullopt;
  const FramePosition p = locate(frame, plan);
  if (p.frame_in_block != kFramesPerBlock - 1) return std::nullopt;
  const auto ids = plan.agch_block_ids();
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == p.block) return static_cast<int>(i);
  return std::nullopt;
}

}  // namespace gsmsim
