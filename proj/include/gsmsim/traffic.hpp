#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsmsim/geometry.hpp"
#include "gsmsim/rng.hpp"

namespace gsmsim {

enum class ArrivalKind { poisson, uniform_periodic, beta_alarm };

inline const char* to_string(ArrivalKind k) {
  switch (k) {
    case ArrivalKind::poisson: return "poisson";
    case ArrivalKind::uniform_periodic: return "uniform_periodic";
    case ArrivalKind::beta_alarm: return "beta_alarm";
  }
  return "?";
}

// One traffic class: a population of like devices sharing arrival statistics
// and payload size. Counts are cell-level; the simulator models one sector and
// divides by Scenario::sector_fraction.
struct DeviceClass {
  std::string name;
  std::int64_t count = 0;
  double arrival_rate = 0.0;  // reports/s per device; unused for beta_alarm
  int payload_bytes = 0;
  ArrivalKind distribution = ArrivalKind::poisson;
  double beta_alpha = 3.0;
  double beta_beta = 4.0;
  double activation_period_s = 120.0;  // beta_alarm only
  // When > 0 the class reports on a fixed application interval and, under the
  // expanded-USF variant, keeps its data connection between reports.
  double reporting_interval_s = 0.0;

  void validate() const {
    if (count < 0) throw std::invalid_argument("class '" + name + "': negative count");
    if (payload_bytes < 1) throw std::invalid_argument("class '" + name + "': payload must be >= 1 byte");
    if (distribution == ArrivalKind::beta_alarm) {
      if (!(activation_period_s > 0))
        throw std::invalid_argument("class '" + name + "': activation_period must be > 0");
    } else if (!(arrival_rate > 0)) {
      throw std::invalid_argument("class '" + name + "': arrival_rate must be > 0");
    }
  }
};

struct Scenario {
  std::vector<DeviceClass> classes;
  double sector_fraction = 3.0;  // cell-level counts divided by this

  void validate() const {
    if (!(sector_fraction > 0)) throw std::invalid_argument("sector_fraction must be > 0");
    for (const auto& c : classes) c.validate();
  }

  std::int64_t devices_per_sector(const DeviceClass& c) const {
    return static_cast<std::int64_t>(std::llround(c.count / sector_fraction));
  }
};

// Expected per-sector arrival rate of the asynchronous classes (alarm classes
// excluded); exact arithmetic on the class parameters, not a simulation.
inline double aggregate_async_rate(const Scenario& s) {
  double sum = 0.0;
  for (const auto& c : s.classes)
    if (c.distribution != ArrivalKind::beta_alarm)
      sum += (c.count / s.sector_fraction) * c.arrival_rate;
  return sum;
}

// Per-device arrival sequence in continuous time, converted to frames by the
// caller. Poisson devices draw exponential gaps; uniform_periodic devices fire
// strictly every 1/rate seconds after a uniformly random initial phase.
class ArrivalProcess {
 public:
  ArrivalProcess() = default;

  ArrivalProcess(const DeviceClass& cls, RngStream stream, double frame_duration)
      : kind_(cls.distribution), rate_(cls.arrival_rate), stream_(stream) {
    if (kind_ == ArrivalKind::beta_alarm) return;
    if (!(rate_ > 0)) throw std::invalid_argument("arrival rate must be positive");
    period_ = 1.0 / rate_;
    if (period_ < frame_duration)
      throw std::invalid_argument("arrival period shorter than one frame");
    next_ = (kind_ == ArrivalKind::uniform_periodic) ? stream_.next_double() * period_
                                                     : stream_.exponential(rate_);
  }

  // Time of the next report in seconds; advances the process.
  double next() {
    const double t = next_;
    next_ += (kind_ == ArrivalKind::uniform_periodic) ? period_ : stream_.exponential(rate_);
    return t;
  }

  double peek() const { return next_; }

 private:
  ArrivalKind kind_ = ArrivalKind::poisson;
  double rate_ = 0.0;
  double period_ = 0.0;
  double next_ = 0.0;
  RngStream stream_;
};

// One activation instant per device: activation_period * Beta(3,4), offset by
// epoch_s, converted to frames.
inline std::vector<std::int64_t> alarm_activation_frames(std::int64_t n, double activation_period_s,
                                                         double epoch_s, double frame_duration,
                                                         std::uint64_t seed,
                                                         std::string_view class_name) {
  if (n < 0) throw std::invalid_argument("device count must be >= 0");
  if (!(activation_period_s > 0)) throw std::invalid_argument("activation period must be > 0");
  std::vector<std::int64_t> frames;
  frames.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    RngStream st(seed, "activation", RngStream::fnv1a(class_name) + static_cast<std::uint64_t>(i));
    const double t = epoch_s + activation_period_s * st.beta34();
    frames.push_back(static_cast<std::int64_t>(t / frame_duration));
  }
  return frames;
}

// Built-in reference scenario: the sub-urban machine-to-machine mix (smart
// meters plus home and city commercial devices) for a 1000 m cell with three
// sectors. Meter payloads are pinned at 100 bytes, the smallest metering
// payload used for capacity analysis; metering report rate defaults to the
// sparsest catalogued rate and is overridden by the experiment recipes.
inline Scenario suburban_m2m_scenario() {
  Scenario s;
  s.sector_fraction = 3.0;
  auto cls = [](std::string name, std::int64_t count, double rate, int payload,
                ArrivalKind kind) {
    DeviceClass c;
    c.name = std::move(name);
    c.count = count;
    c.arrival_rate = rate;
    c.payload_bytes = payload;
    c.distribution = kind;
    return c;
  };
  s.classes.push_back(cls("smart-meters-periodic", 13941, 1.16e-5, 100, ArrivalKind::poisson));
  DeviceClass alarm = cls("smart-meters-alarm", 13941, 0.0, 100, ArrivalKind::beta_alarm);
  alarm.activation_period_s = 120.0;
  s.classes.push_back(alarm);
  s.classes.push_back(cls("home-security", 3098, 1.67e-3, 20, ArrivalKind::poisson));
  s.classes.push_back(cls("elderly-sensors", 310, 1.67e-2, 128, ArrivalKind::poisson));
  s.classes.push_back(cls("credit-machines-grocery", 72, 8.3e-3, 24, ArrivalKind::poisson));
  s.classes.push_back(cls("credit-machines-shop", 1100, 5.56e-4, 24, ArrivalKind::poisson));
  s.classes.push_back(cls("roadway-signs", 2963, 3.33e-2, 1, ArrivalKind::uniform_periodic));
  s.classes.push_back(cls("traffic-lights", 360, 1.67e-2, 1, ArrivalKind::uniform_periodic));
  s.classes.push_back(cls("traffic-sensors", 360, 1.67e-2, 1, ArrivalKind::poisson));
  s.classes.push_back(cls("movie-rentals", 36, 1.16e-4, 152, ArrivalKind::poisson));
  return s;
}

// The commercial/home portion of the reference mix (everything except the two
// smart-meter classes); used as asynchronous background traffic.
inline Scenario commercial_background_scenario() {
  Scenario s = suburban_m2m_scenario();
  std::vector<DeviceClass> keep;
  for (auto& c : s.classes)
    if (c.name.rfind("smart-meters", 0) != 0) keep.push_back(std::move(c));
  s.classes = std::move(keep);
  return s;
}

}  // namespace gsmsim
