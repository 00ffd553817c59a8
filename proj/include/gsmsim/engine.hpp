#pragma once

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gsmsim/access.hpp"
#include "gsmsim/allocator.hpp"
#include "gsmsim/data_plane.hpp"
#include "gsmsim/geometry.hpp"
#include "gsmsim/rng.hpp"
#include "gsmsim/stats.hpp"
#include "gsmsim/traffic.hpp"

namespace gsmsim {

struct SimConfig {
  std::uint64_t seed = 1;
  double warmup_s = 300.0;
  double measure_s = 3600.0;
  ChannelPlan plan;
  AccessParams access;
  Variant variant = Variant::legacy;
  int eusf_x = 2;
  int eusf_m_gap = 2;
  CodingScheme coding;
  bool separate_rach = false;
  TruncationVariant truncation = TruncationVariant::mass_at_cap;
  bool retain_on_usf_block = false;
  double alarm_epoch_s = -1.0;  // alarm activation window start; default = end of warmup

  void validate() const {
    if (!(warmup_s >= 0)) throw std::invalid_argument("warmup_s must be >= 0");
    if (!(measure_s > 0)) throw std::invalid_argument("measure_s must be > 0");
    plan.validate();
    access.validate();
    coding.validate();
    if (eusf_x < 1 || eusf_m_gap < 0)
      throw std::invalid_argument("need eusf_x >= 1 and eusf_m_gap >= 0");
  }
};

// Whole-run totals; every generated report ends in exactly one of delivered,
// outage, overrun, or is still in flight when the run stops.
struct ConservationTotals {
  std::int64_t arrivals = 0;
  std::int64_t delivered = 0;
  std::int64_t outages = 0;
  std::int64_t overruns = 0;
  std::int64_t in_flight_end = 0;

  std::int64_t rach_successes = 0;
  std::int64_t agch_granted = 0;
  std::int64_t agch_deadline_blocked = 0;
  std::int64_t data_blocked = 0;
  std::int64_t agch_queue_residual = 0;

  bool reports_reconcile() const {
    return arrivals == delivered + outages + overruns + in_flight_end;
  }
  bool agch_reconciles() const {
    return rach_successes ==
           agch_granted + agch_deadline_blocked + data_blocked + agch_queue_residual;
  }
};

struct RunReport {
  std::uint64_t seed = 0;
  Variant variant = Variant::legacy;
  double sim_duration_s = 0.0;
  double wall_runtime_s = 0.0;

  StageStats window;
  StageRates rates;
  BlockingReport blocking;
  ConservationTotals totals;

  std::vector<double> latencies_s;  // delivered in-window, sorted ascending
  double latency_p50_s = 0.0;
  double latency_p95_s = 0.0;
  double latency_p99_s = 0.0;
};

// Frame-tick simulation of the RACH -> AGCH -> DATA pipeline. Single-threaded;
// owns all mutable state; every tick dispatches in a fixed order (arrivals,
// RACH, AGCH emission, data blocks, timers) and processes devices in ascending
// id order, so runs are bit-reproducible for a given (seed, config, scenario).
class Simulation {
 public:
  Simulation(SimConfig config, Scenario scenario)
      : cfg_(std::move(config)), scenario_(std::move(scenario)) {
    cfg_.validate();
    scenario_.validate();
    calendar_ = OccupancyCalendar(cfg_.plan, cfg_.eusf_x, cfg_.eusf_m_gap);
    fps_ = cfg_.plan.frames_per_second();
    warmup_frames_ = static_cast<std::int64_t>(cfg_.warmup_s * fps_ + 0.5);
    measure_frames_ = static_cast<std::int64_t>(cfg_.measure_s * fps_ + 0.5);
    end_frame_ = warmup_frames_ + measure_frames_;
    build_devices();
    const auto seconds = static_cast<std::size_t>((measure_frames_ + fps_ - 1) / fps_);
    window_.hist_rach.assign(seconds, 0);
    window_.hist_agch.assign(seconds, 0);
    window_.hist_data.assign(seconds, 0);
    window_.window_s = cfg_.measure_s;
  }

  RunReport run() {
    const auto t0 = std::chrono::steady_clock::now();
    for (frame_ = 0; frame_ < end_frame_; ++frame_) tick();
    RunReport rep;
    rep.seed = cfg_.seed;
    rep.variant = cfg_.variant;
    rep.sim_duration_s = (warmup_frames_ + measure_frames_) * cfg_.plan.frame_duration;
    rep.window = window_;
    rep.rates = stage_rates(window_);
    rep.blocking = blocking_report(window_);
    rep.totals = totals_;
    rep.totals.agch_queue_residual = static_cast<std::int64_t>(queue_.size());
    rep.totals.in_flight_end = in_flight_now();
    std::sort(latencies_.begin(), latencies_.end());
    rep.latencies_s = latencies_;
    rep.latency_p50_s = percentile(latencies_, 0.50);
    rep.latency_p95_s = percentile(latencies_, 0.95);
    rep.latency_p99_s = percentile(latencies_, 0.99);
    rep.wall_runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

  // One frame: arrivals, RACH resolution, AGCH block emission, data-plane
  // announcements/completions, then timer expiries.
  void tick() {
    dispatch_arrivals();
    dispatch_rach();
    dispatch_agch();
    dispatch_data();
    dispatch_timers();
  }

  const std::vector<Device>& devices() const { return devices_; }
  const OccupancyCalendar& calendar() const { return calendar_; }
  std::int64_t current_frame() const { return frame_; }

 private:
  struct DeviceTraffic {
    ArrivalProcess process;   // async classes only
    std::int64_t last_arrival_frame = -1;
    RngStream backoff;
  };

  void build_devices() {
    std::int32_t id = 0;
    for (std::size_t ci = 0; ci < scenario_.classes.size(); ++ci) {
      const DeviceClass& cls = scenario_.classes[ci];
      const std::int64_t n = scenario_.devices_per_sector(cls);
      for (std::int64_t j = 0; j < n; ++j, ++id) {
        Device d;
        d.id = id;
        d.class_index = static_cast<std::int16_t>(ci);
        d.rach_channel = static_cast<std::uint8_t>(select_rach_channel(cls, cfg_.separate_rach));
        devices_.push_back(d);
        DeviceTraffic t;
        const std::uint64_t sub = RngStream::fnv1a(cls.name) + static_cast<std::uint64_t>(j);
        t.backoff = RngStream(cfg_.seed, "backoff", sub);
        if (cls.distribution == ArrivalKind::beta_alarm) {
          RngStream act(cfg_.seed, "activation", sub);
          const double epoch = cfg_.alarm_epoch_s < 0 ? cfg_.warmup_s : cfg_.alarm_epoch_s;
          const double at = epoch + cls.activation_period_s * act.beta34();
          schedule_arrival(id, static_cast<std::int64_t>(at / cfg_.plan.frame_duration));
        } else {
          t.process = ArrivalProcess(cls, RngStream(cfg_.seed, "arrivals", sub),
                                     cfg_.plan.frame_duration);
          traffic_.push_back(t);
          schedule_next_arrival(id);
          continue;
        }
        traffic_.push_back(t);
      }
    }
  }

  void schedule_arrival(std::int32_t dev, std::int64_t frame) {
    if (frame >= end_frame_) return;
    arrivals_by_frame_[frame].push_back(dev);
  }

  void schedule_next_arrival(std::int32_t dev) {
    DeviceTraffic& t = traffic_[static_cast<std::size_t>(dev)];
    const double at = t.process.next();
    std::int64_t f = static_cast<std::int64_t>(at / cfg_.plan.frame_duration);
    f = std::max(f, t.last_arrival_frame + 1);  // at most one report per frame
    t.last_arrival_frame = f;
    schedule_arrival(dev, f);
  }

  bool in_window() const { return frame_ >= warmup_frames_; }
  std::size_t second_index() const {
    return static_cast<std::size_t>((frame_ - warmup_frames_) / fps_);
  }

  // --- tick steps -------------------------------------------------------

  void dispatch_arrivals() {
    auto it = arrivals_by_frame_.find(frame_);
    if (it == arrivals_by_frame_.end()) return;
    std::vector<std::int32_t> devs = std::move(it->second);
    arrivals_by_frame_.erase(it);
    std::sort(devs.begin(), devs.end());
    for (std::int32_t id : devs) {
      on_report_ready(id);
      const DeviceClass& cls = scenario_.classes[static_cast<std::size_t>(
          devices_[static_cast<std::size_t>(id)].class_index)];
      if (cls.distribution != ArrivalKind::beta_alarm) schedule_next_arrival(id);
    }
  }

  void on_report_ready(std::int32_t id) {
    Device& d = devices_[static_cast<std::size_t>(id)];
    const DeviceClass& cls = scenario_.classes[static_cast<std::size_t>(d.class_index)];
    ++totals_.arrivals;
    if (in_window()) ++window_.arrivals;

    if (d.state == DeviceState::connected) {
      Connection& c = connections_[static_cast<std::size_t>(d.connection)];
      if (c.mode == TrafficMode::periodic) {
        // held expanded-USF allocation: the report queues on the connection
        c.reports.push_back({frame_, blocks_required(cls.payload_bytes, cfg_.coding)});
        return;
      }
    }
    if (d.state != DeviceState::idle) {
      ++totals_.overruns;  // a prior report of this device is still in flight
      if (in_window()) ++window_.overruns;
      return;
    }
    d.state = DeviceState::backoff;
    d.attempts_used = 1;
    d.report_arrival = frame_;
    const auto wait = traffic_[static_cast<std::size_t>(id)].backoff.next_below(
        static_cast<std::uint32_t>(cfg_.access.backoff_window));
    d.backoff_until = frame_ + wait;
    rach_by_frame_[d.backoff_until].push_back(id);
  }

  void dispatch_rach() {
    auto it = rach_by_frame_.find(frame_);
    if (it == rach_by_frame_.end()) return;
    std::vector<std::int32_t> devs = std::move(it->second);
    rach_by_frame_.erase(it);
    std::sort(devs.begin(), devs.end());

    const int channels = rach_channel_count(cfg_.separate_rach);
    const int slots = cfg_.plan.rach_slots_per_frame;
    slot_groups_.assign(static_cast<std::size_t>(channels * slots), {});
    for (std::int32_t id : devs) {
      Device& d = devices_[static_cast<std::size_t>(id)];
      if (d.state != DeviceState::backoff || d.backoff_until != frame_) continue;
      int slot = 0;
      if (slots > 1)
        slot = static_cast<int>(traffic_[static_cast<std::size_t>(id)].backoff.next_below(
            static_cast<std::uint32_t>(slots)));
      slot_groups_[static_cast<std::size_t>(d.rach_channel * slots + slot)].push_back(id);
    }
    for (const auto& group : slot_groups_) {
      if (group.empty()) continue;
      const auto winner = resolve_rach_slot(std::span<const std::int32_t>(group));
      for (std::int32_t id : group) {
        Device& d = devices_[static_cast<std::size_t>(id)];
        ++totals_.rach_attempts_all;
        if (in_window()) {
          ++window_.rach_attempts;
          ++window_.hist_rach[second_index()];
        }
        if (d.attempts_used == 1) {
          ++totals_.accessing;
          if (in_window()) ++window_.accessing_reports;
          if (in_window()) ++window_.rach_first_attempts;
        }
        d.state = DeviceState::awaiting_grant;
        d.s_expiry = frame_ + cfg_.access.response_window;
        sexpiry_by_frame_[d.s_expiry].push_back(id);
        if (winner && *winner == id) {
          ++totals_.rach_successes;
          if (in_window()) {
            ++window_.rach_successes;
            ++window_.hist_agch[second_index()];
          }
          const DeviceClass& cls = scenario_.classes[static_cast<std::size_t>(d.class_index)];
          GrantRequest r;
          r.device = id;
          r.rach_success_frame = frame_;
          r.deadline_frame = frame_ + cfg_.access.response_window;
          r.mode = cls.reporting_interval_s > 0 ? TrafficMode::periodic : TrafficMode::one_shot;
          r.payload_bytes = cls.payload_bytes;
          r.reporting_interval_s = cls.reporting_interval_s;
          queue_.push(r);
        }
      }
    }
  }

  AllocDemand demand_for(const GrantRequest& r) const {
    AllocDemand d;
    if (cfg_.variant != Variant::agch_eusf) {
      d.mode = AllocMode::legacy;
      return d;
    }
    if (r.mode == TrafficMode::periodic) {
      d.mode = AllocMode::eusf_periodic;
      d.demand_blocks_per_s =
          blocks_required(r.payload_bytes, cfg_.coding) / r.reporting_interval_s;
    } else {
      d.mode = AllocMode::eusf_one_shot;
      d.n_blocks = blocks_required(r.payload_bytes, cfg_.coding);
    }
    return d;
  }

  void dispatch_agch() {
    if (!is_agch_block_boundary(frame_, cfg_.plan)) return;
    const std::int64_t mf = frame_ / cfg_.plan.frames_per_multiframe;
    pending_keys_.clear();
    auto res = queue_.emit(
        frame_, grants_per_message(cfg_.variant), cfg_.retain_on_usf_block,
        [&](const GrantRequest& r) -> std::optional<UsfAllocation> {
          const std::int32_t key = acquire_connection_slot();
          auto a = calendar_.allocate(key, demand_for(r), mf);
          if (!a) {
            release_connection_slot(key);
            return std::nullopt;
          }
          pending_keys_.push_back(key);
          return a;
        });

    totals_.agch_deadline_blocked += res.deadline_blocked;
    totals_.data_blocked += res.data_blocked;
    if (in_window()) {
      window_.agch_deadline_blocked += res.deadline_blocked;
      window_.data_blocked += res.data_blocked;
      window_.data_block_events += res.data_block_events;
    }
    for (std::size_t g = 0; g < res.granted.size(); ++g) {
      const GrantRequest& r = res.granted[g].request;
      const std::int32_t key = pending_keys_[g];
      Device& d = devices_[static_cast<std::size_t>(r.device)];
      assert(d.state == DeviceState::awaiting_grant);
      Connection& c = connections_[static_cast<std::size_t>(key)];
      c.device = r.device;
      c.allocation = res.granted[g].allocation;
      c.reports.clear();
      c.reports.push_back({d.report_arrival, blocks_required(r.payload_bytes, cfg_.coding)});
      c.established_frame = frame_;
      c.last_served_frame = -1;
      c.served_blocks = 0;
      c.active = true;
      // only the expanded-USF variant keeps periodic connections alive
      c.mode = cfg_.variant == Variant::agch_eusf ? r.mode : TrafficMode::one_shot;
      d.state = DeviceState::connected;
      d.connection = key;
      ++totals_.agch_granted;
      if (in_window()) {
        ++window_.agch_granted;
        ++window_.hist_data[second_index()];
      }
    }
  }

  void dispatch_data() {
    if (frame_ % kFramesPerBlock != kFramesPerBlock - 1) return;
    const int first = cfg_.plan.first_data_pdch();
    if (current_tx_.empty()) current_tx_.assign(static_cast<std::size_t>(cfg_.plan.n_data_pdch()), -1);
    const FramePosition next = locate(frame_ + 1, cfg_.plan);
    for (int i = 0; i < cfg_.plan.n_data_pdch(); ++i) {
      // the block ending now was served by the connection chosen one block ago
      const std::int32_t cur = current_tx_[static_cast<std::size_t>(i)];
      if (cur >= 0) complete_block(cur);
      // announce the holder of the next uplink block
      calendar_.cell_claimants(first + i, next.block, next.multiframe, claimants_scratch_);
      const auto sel = select_transmitter(claimants_scratch_, connections_);
      current_tx_[static_cast<std::size_t>(i)] = sel.value_or(-1);
      if (sel) {
        Connection& c = connections_[static_cast<std::size_t>(*sel)];
        c.last_served_frame = frame_;
        if (c.allocation.mode == AllocMode::eusf_one_shot)
          calendar_.consume_reserved(*sel, next.multiframe, next.block);
      }
    }
  }

  void complete_block(std::int32_t key) {
    Connection& c = connections_[static_cast<std::size_t>(key)];
    assert(c.active && !c.reports.empty());
    PendingReport& r = c.reports.front();
    --r.blocks_left;
    ++c.served_blocks;
    if (r.blocks_left > 0) return;
    // report fully transmitted
    ++totals_.delivered;
    if (in_window()) {
      ++window_.delivered;
      latencies_.push_back((frame_ - r.arrival_frame) * cfg_.plan.frame_duration);
    }
    c.reports.pop_front();
    Device& d = devices_[static_cast<std::size_t>(c.device)];
    if (c.mode == TrafficMode::periodic) return;  // allocation persists
    calendar_.release(key);
    c.active = false;
    release_connection_slot(key);
    d.state = DeviceState::idle;
    d.connection = -1;
    d.attempts_used = 0;
    d.report_arrival = -1;
  }

  void dispatch_timers() {
    auto it = sexpiry_by_frame_.find(frame_);
    if (it == sexpiry_by_frame_.end()) return;
    std::vector<std::int32_t> devs = std::move(it->second);
    sexpiry_by_frame_.erase(it);
    std::sort(devs.begin(), devs.end());
    for (std::int32_t id : devs) {
      Device& d = devices_[static_cast<std::size_t>(id)];
      if (d.state != DeviceState::awaiting_grant || d.s_expiry != frame_) continue;
      if (d.attempts_used < cfg_.access.max_attempts) {
        ++d.attempts_used;
        const auto wait = traffic_[static_cast<std::size_t>(id)].backoff.next_below(
            static_cast<std::uint32_t>(cfg_.access.backoff_window));
        d.state = DeviceState::backoff;
        d.backoff_until = frame_ + 1 + wait;
        rach_by_frame_[d.backoff_until].push_back(id);
      } else {
        ++totals_.outages;
        if (in_window()) ++window_.outages;
        d.state = DeviceState::idle;
        d.attempts_used = 0;
        d.report_arrival = -1;
      }
    }
  }

  // --- connection slots ---------------------------------------------------

  std::int32_t acquire_connection_slot() {
    if (!free_slots_.empty()) {
      const std::int32_t k = free_slots_.back();
      free_slots_.pop_back();
      return k;
    }
    connections_.emplace_back();
    return static_cast<std::int32_t>(connections_.size() - 1);
  }

  void release_connection_slot(std::int32_t key) { free_slots_.push_back(key); }

  std::int64_t in_flight_now() const {
    std::int64_t n = 0;
    for (const Device& d : devices_)
      if (d.state == DeviceState::backoff || d.state == DeviceState::awaiting_grant) ++n;
    for (const Connection& c : connections_)
      if (c.active) n += static_cast<std::int64_t>(c.reports.size());
    return n;
  }

  SimConfig cfg_;
  Scenario scenario_;
  OccupancyCalendar calendar_;
  AgchQueue queue_;

  std::vector<Device> devices_;
  std::vector<DeviceTraffic> traffic_;
  std::vector<Connection> connections_;
  std::vector<std::int32_t> free_slots_;
  std::vector<std::int32_t> current_tx_;
  std::vector<std::vector<std::int32_t>> slot_groups_;
  std::vector<OccupancyCalendar::Claimant> claimants_scratch_;
  std::vector<std::int32_t> pending_keys_;

  std::unordered_map<std::int64_t, std::vector<std::int32_t>> arrivals_by_frame_;
  std::unordered_map<std::int64_t, std::vector<std::int32_t>> rach_by_frame_;
  std::unordered_map<std::int64_t, std::vector<std::int32_t>> sexpiry_by_frame_;

  struct Totals : ConservationTotals {
    std::int64_t rach_attempts_all = 0;
    std::int64_t accessing = 0;
  } totals_;

  StageStats window_;
  std::vector<double> latencies_;

  std::int64_t frame_ = 0;
  std::int64_t warmup_frames_ = 0;
  std::int64_t measure_frames_ = 0;
  std::int64_t end_frame_ = 0;
  int fps_ = 200;
};

inline RunReport run_simulation(const SimConfig& cfg, const Scenario& scenario) {
  Simulation sim(cfg, scenario);
  return sim.run();
}

}  // namespace gsmsim
