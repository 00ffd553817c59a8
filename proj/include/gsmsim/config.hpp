#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsmsim/engine.hpp"
#include "gsmsim/independent.hpp"

namespace gsmsim {

// ---------------------------------------------------------------------------
// parsing helpers

inline std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

inline ArrivalKind parse_arrival_kind(const std::string& s, int line) {
  if (s == "poisson") return ArrivalKind::poisson;
  if (s == "uniform_periodic") return ArrivalKind::uniform_periodic;
  if (s == "beta_alarm") return ArrivalKind::beta_alarm;
  throw std::runtime_error("line " + std::to_string(line) + ": unknown distribution '" + s + "'");
}

inline Variant parse_variant(const std::string& s) {
  if (s == "legacy") return Variant::legacy;
  if (s == "agch") return Variant::agch;
  if (s == "agch+eusf" || s == "agch_eusf") return Variant::agch_eusf;
  throw std::runtime_error("unknown variant '" + s + "' (legacy|agch|agch+eusf)");
}

// ---------------------------------------------------------------------------
// scenario files: sectioned key = value text, one [class] section per class

inline Scenario parse_scenario_text(const std::string& text) {
  Scenario s;
  DeviceClass* cur = nullptr;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string l = raw;
    if (const auto h = l.find('#'); h != std::string::npos) l.erase(h);
    l = trim(l);
    if (l.empty()) continue;
    if (l == "[class]") {
      s.classes.emplace_back();
      cur = &s.classes.back();
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(l.substr(0, eq));
    const std::string val = trim(l.substr(eq + 1));
    try {
      if (!cur) {
        if (key == "sector_fraction") s.sector_fraction = std::stod(val);
        else throw std::runtime_error("unknown scenario key '" + key + "'");
        continue;
      }
      if (key == "name") cur->name = val;
      else if (key == "count") cur->count = std::stoll(val);
      else if (key == "arrival_rate") cur->arrival_rate = std::stod(val);
      else if (key == "payload") cur->payload_bytes = std::stoi(val);
      else if (key == "distribution") cur->distribution = parse_arrival_kind(val, line);
      else if (key == "activation_period") cur->activation_period_s = std::stod(val);
      else if (key == "reporting_interval") cur->reporting_interval_s = std::stod(val);
      else throw std::runtime_error("unknown class key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("line " + std::to_string(line) + ": bad value for '" + key + "'");
    }
  }
  try {
    s.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("scenario validation: ") + e.what());
  }
  return s;
}

inline Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario_text(ss.str());
}

inline std::string round_trip_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string emit_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "sector_fraction = " << round_trip_num(s.sector_fraction) << "\n";
  for (const auto& c : s.classes) {
    out << "\n[class]\n";
    out << "name = " << c.name << "\n";
    out << "count = " << c.count << "\n";
    out << "distribution = " << to_string(c.distribution) << "\n";
    if (c.distribution == ArrivalKind::beta_alarm)
      out << "activation_period = " << round_trip_num(c.activation_period_s) << "\n";
    else
      out << "arrival_rate = " << round_trip_num(c.arrival_rate) << "\n";
    out << "payload = " << c.payload_bytes << "\n";
    if (c.reporting_interval_s > 0)
      out << "reporting_interval = " << round_trip_num(c.reporting_interval_s) << "\n";
  }
  return out.str();
}

// A scenario shipped with the tool, by name.
inline std::optional<Scenario> builtin_scenario(const std::string& name) {
  if (name == "suburban-m2m") return suburban_m2m_scenario();
  if (name == "commercial-background") return commercial_background_scenario();
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// run config files: flat key = value text

inline std::string emit_config(const SimConfig& c) {
  std::ostringstream out;
  auto num = [](double v) { return round_trip_num(v); };
  out << "seed = " << c.seed << "\n";
  out << "warmup_s = " << num(c.warmup_s) << "\n";
  out << "measure_s = " << num(c.measure_s) << "\n";
  out << "frames_per_multiframe = " << c.plan.frames_per_multiframe << "\n";
  out << "n_pdch = " << c.plan.n_pdch << "\n";
  out << "agch_blocks_per_multiframe = " << c.plan.agch_blocks_per_multiframe << "\n";
  out << "rach_slots_per_frame = " << c.plan.rach_slots_per_frame << "\n";
  out << "frame_duration = " << num(c.plan.frame_duration) << "\n";
  out << "backoff_window = " << c.access.backoff_window << "\n";
  out << "response_window = " << c.access.response_window << "\n";
  out << "max_attempts = " << c.access.max_attempts << "\n";
  out << "variant = " << to_string(c.variant) << "\n";
  out << "eusf_x = " << c.eusf_x << "\n";
  out << "eusf_m_gap = " << c.eusf_m_gap << "\n";
  out << "block_payload_bytes = " << c.coding.block_payload_bytes << "\n";
  out << "separate_rach = " << (c.separate_rach ? 1 : 0) << "\n";
  out << "truncation = "
      << (c.truncation == TruncationVariant::mass_at_cap ? "mass_at_cap" : "renormalized") << "\n";
  out << "retain_on_usf_block = " << (c.retain_on_usf_block ? 1 : 0) << "\n";
  out << "alarm_epoch_s = " << num(c.alarm_epoch_s) << "\n";
  return out.str();
}

inline SimConfig parse_config_text(const std::string& text) {
  SimConfig c;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string l = raw;
    if (const auto h = l.find('#'); h != std::string::npos) l.erase(h);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(l.substr(0, eq));
    const std::string val = trim(l.substr(eq + 1));
    if (key == "seed") c.seed = std::stoull(val);
    else if (key == "warmup_s") c.warmup_s = std::stod(val);
    else if (key == "measure_s") c.measure_s = std::stod(val);
    else if (key == "frames_per_multiframe") c.plan.frames_per_multiframe = std::stoi(val);
    else if (key == "n_pdch") c.plan.n_pdch = std::stoi(val);
    else if (key == "agch_blocks_per_multiframe") c.plan.agch_blocks_per_multiframe = std::stoi(val);
    else if (key == "rach_slots_per_frame") c.plan.rach_slots_per_frame = std::stoi(val);
    else if (key == "frame_duration") c.plan.frame_duration = std::stod(val);
    else if (key == "backoff_window") c.access.backoff_window = std::stoi(val);
    else if (key == "response_window") c.access.response_window = std::stoi(val);
    else if (key == "max_attempts") c.access.max_attempts = std::stoi(val);
    else if (key == "variant") c.variant = parse_variant(val);
    else if (key == "eusf_x") c.eusf_x = std::stoi(val);
    else if (key == "eusf_m_gap") c.eusf_m_gap = std::stoi(val);
    else if (key == "block_payload_bytes") c.coding.block_payload_bytes = std::stoi(val);
    else if (key == "separate_rach") c.separate_rach = std::stoi(val) != 0;
    else if (key == "truncation")
      c.truncation = val == "renormalized" ? TruncationVariant::renormalized
                                           : TruncationVariant::mass_at_cap;
    else if (key == "retain_on_usf_block") c.retain_on_usf_block = std::stoi(val) != 0;
    else if (key == "alarm_epoch_s") c.alarm_epoch_s = std::stod(val);
    else throw std::runtime_error("line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
  return c;
}

// ---------------------------------------------------------------------------
// CSV output

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string fmt(std::optional<double> v) { return v ? fmt(*v) : std::string(); }

inline std::string run_csv_header() {
  return "axis_value,seed,variant,lambda_rach_per_s,lambda_agch_per_s,lambda_usf_per_s,"
         "p_rach,p_agch,p_b_agch,p_b_data,outage,arrivals,delivered,outages,overruns,"
         "latency_p50_s,latency_p95_s,latency_p99_s";
}

inline std::string run_csv_row(double axis_value, const RunReport& r) {
  std::ostringstream out;
  out << fmt(axis_value) << ',' << r.seed << ',' << to_string(r.variant) << ','
      << fmt(r.rates.lambda_rach) << ',' << fmt(r.rates.lambda_agch) << ','
      << fmt(r.rates.lambda_usf) << ',' << fmt(r.rates.p_rach) << ',' << fmt(r.rates.p_agch) << ','
      << fmt(r.blocking.p_b_agch) << ',' << fmt(r.blocking.p_b_data) << ','
      << fmt(r.blocking.outage) << ',' << r.window.arrivals << ',' << r.window.delivered << ','
      << r.window.outages << ',' << r.window.overruns << ',' << fmt(r.latency_p50_s) << ','
      << fmt(r.latency_p95_s) << ',' << fmt(r.latency_p99_s);
  return out.str();
}

inline std::string histogram_csv(const StageStats& w) {
  std::ostringstream out;
  out << "second,rach_events,agch_arrivals,data_arrivals\n";
  for (std::size_t i = 0; i < w.hist_rach.size(); ++i)
    out << i << ',' << w.hist_rach[i] << ',' << w.hist_agch[i] << ',' << w.hist_data[i] << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// sweeps

enum class SweepAxis { lambda, alarm_count };

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "lambda") return SweepAxis::lambda;
  if (s == "alarm_count") return SweepAxis::alarm_count;
  throw std::runtime_error("axis must be lambda or alarm_count");
}

// Rescales the scenario so the swept quantity equals `value`: per-sector fresh
// arrival rate of the single non-alarm class, or cell-level device count of
// the single alarm class.
inline Scenario apply_axis(const Scenario& base, SweepAxis axis, double value) {
  Scenario s = base;
  int hits = 0;
  for (auto& c : s.classes) {
    if (axis == SweepAxis::lambda && c.distribution != ArrivalKind::beta_alarm) {
      if (c.count <= 0) throw std::runtime_error("swept class has no devices");
      c.arrival_rate = value * s.sector_fraction / static_cast<double>(c.count);
      ++hits;
    } else if (axis == SweepAxis::alarm_count && c.distribution == ArrivalKind::beta_alarm) {
      c.count = static_cast<std::int64_t>(std::llround(value));
      ++hits;
    }
  }
  if (hits != 1)
    throw std::runtime_error("sweep axis needs exactly one matching class in the scenario");
  return s;
}

struct SweepPoint {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  Variant variant = Variant::legacy;
  RunReport report;
};

inline std::vector<SweepPoint> sweep(const SimConfig& base, const Scenario& scenario,
                                     SweepAxis axis, const std::vector<double>& values,
                                     const std::vector<std::uint64_t>& seeds) {
  std::vector<SweepPoint> rows;
  for (double v : values)
    for (std::uint64_t seed : seeds) {
      SimConfig cfg = base;
      cfg.seed = seed;
      SweepPoint p;
      p.axis_value = v;
      p.seed = seed;
      p.variant = cfg.variant;
      p.report = run_simulation(cfg, apply_axis(scenario, axis, v));
      rows.push_back(std::move(p));
    }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepPoint>& rows) {
  std::string out = run_csv_header();
  out += "\n";
  for (const auto& p : rows) {
    out += run_csv_row(p.axis_value, p.report);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// experiment recipes and their headline requirements

namespace headline {
inline constexpr double kRachRateLo = 96.0, kRachRateHi = 144.0;     // coupled RACH rate at λ=40
inline constexpr double kAgchRateLo = 52.0, kAgchRateHi = 70.0;      // coupled AGCH rate at λ=40
inline constexpr double kDataCeilingLo = 27.0, kDataCeilingHi = 32.0;
inline constexpr int kTruncCap = 29;                                 // DATA per-second bottleneck
inline constexpr double kTruncFitTvMax = 0.15;
inline constexpr double kBlockingTarget = 0.02;
inline constexpr double kOutageTarget = 0.02;
inline constexpr double kLegacyLambdaMax = 40.0;    // legacy 2%-outage capacity upper bound
inline constexpr double kImprovedLambdaMin = 60.0;  // agch+eusf 2%-outage capacity lower bound
inline constexpr double kCapacityRatioMin = 1.75;
inline constexpr double kAlarmImprovedOutageAt1500 = 0.005;
inline constexpr double kAlarmImprovedOutageAt2300 = 0.10;
inline constexpr double kAlarmStrictOutage = 0.001;
}  // namespace headline

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline Check make_check(std::string name, bool pass, std::string detail) {
  return Check{std::move(name), pass, std::move(detail)};
}

// Poisson fleet whose per-sector fresh arrival rate is lambda_per_sector.
inline Scenario poisson_fleet(const std::string& name, std::int64_t cell_count,
                              double lambda_per_sector, int payload_bytes) {
  Scenario s;
  DeviceClass c;
  c.name = name;
  c.count = cell_count;
  c.payload_bytes = payload_bytes;
  c.distribution = ArrivalKind::poisson;
  c.arrival_rate = lambda_per_sector * s.sector_fraction / static_cast<double>(cell_count);
  s.classes.push_back(c);
  return s;
}

// fig4: coupled stage rates and arrival histograms, legacy access, metering
// fleet at 40 fresh reports/s with 100-byte reports.
struct Fig4Result {
  RunReport report;
  int data_ceiling = 0;
  double tv_raw = 0.0;       // empirical DATA histogram vs truncated Poisson
  double tv_censored = 0.0;  // same with counts folded at the cap
  std::vector<Check> checks;
};

inline Fig4Result reproduce_fig4(std::uint64_t seed = 1, double measure_s = 3600.0) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.variant = Variant::legacy;
  cfg.measure_s = measure_s;
  Fig4Result r;
  r.report = run_simulation(cfg, poisson_fleet("smart-meters", 13941, 40.0, 100));

  for (auto c : r.report.window.hist_data)
    r.data_ceiling = std::max(r.data_ceiling, static_cast<int>(c));
  const auto model = truncated_poisson_distribution(r.report.rates.lambda_agch,
                                                    headline::kTruncCap, cfg.truncation);
  r.tv_raw = total_variation(count_distribution(r.report.window.hist_data), model);
  r.tv_censored =
      total_variation(count_distribution(r.report.window.hist_data, headline::kTruncCap), model);

  const auto& rates = r.report.rates;
  r.checks.push_back(make_check(
      "lambda_rach in [96,144]",
      rates.lambda_rach >= headline::kRachRateLo && rates.lambda_rach <= headline::kRachRateHi,
      "measured " + fmt(rates.lambda_rach)));
  r.checks.push_back(make_check(
      "lambda_agch in [52,70]",
      rates.lambda_agch >= headline::kAgchRateLo && rates.lambda_agch <= headline::kAgchRateHi,
      "measured " + fmt(rates.lambda_agch)));
  r.checks.push_back(make_check(
      "data per-second ceiling in [27,32]",
      r.data_ceiling >= headline::kDataCeilingLo && r.data_ceiling <= headline::kDataCeilingHi,
      "measured " + std::to_string(r.data_ceiling)));
  r.checks.push_back(make_check(
      "truncated-poisson fit (censored TV) <= 0.15", r.tv_censored <= headline::kTruncFitTvMax,
      "censored " + fmt(r.tv_censored) + ", raw " + fmt(r.tv_raw)));
  return r;
}

// fig6a: coupled per-stage blocking vs input rate for the legacy system, and
// the same stages fed independently with the measured RACH-stage rate.
struct Fig6aPoint {
  double lambda = 0.0;
  double lambda_rach_measured = 0.0;
  std::optional<double> coupled_pb_agch;
  std::optional<double> coupled_pb_data;
  double independent_pb_agch = 0.0;
  double independent_pb_data = 0.0;
};

struct Fig6aResult {
  std::vector<Fig6aPoint> points;
  std::optional<double> agch_crossing;  // first swept rate with blocking >= 2%
  std::optional<double> data_crossing;
  std::vector<Check> checks;
};

inline Fig6aResult reproduce_fig6a(std::uint64_t seed = 1, double measure_s = 900.0) {
  const std::vector<double> grid = {10, 20, 25, 28, 30, 32, 35, 40, 50};
  Fig6aResult r;
  for (double lam : grid) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.variant = Variant::legacy;
    cfg.measure_s = measure_s;
    const RunReport rep = run_simulation(cfg, poisson_fleet("smart-meters", 13941, lam, 100));

    Fig6aPoint p;
    p.lambda = lam;
    p.lambda_rach_measured = rep.rates.lambda_rach;
    p.coupled_pb_agch = rep.blocking.p_b_agch;
    p.coupled_pb_data = rep.blocking.p_b_data;

    SimConfig icfg = cfg;
    icfg.measure_s = 600.0;
    p.independent_pb_agch =
        independent_stage_run(p.lambda_rach_measured, Stage::agch, icfg, 100).p_b;
    p.independent_pb_data =
        independent_stage_run(p.lambda_rach_measured, Stage::data, icfg, 100).p_b;
    r.points.push_back(p);

    if (!r.agch_crossing && p.coupled_pb_agch && *p.coupled_pb_agch >= headline::kBlockingTarget)
      r.agch_crossing = lam;
    if (!r.data_crossing && p.coupled_pb_data && *p.coupled_pb_data >= headline::kBlockingTarget)
      r.data_crossing = lam;
  }

  const bool ordering = r.agch_crossing && (!r.data_crossing || *r.data_crossing > *r.agch_crossing);
  r.checks.push_back(make_check(
      "legacy AGCH blocking crosses 2% before DATA blocking", ordering,
      "agch at " + (r.agch_crossing ? fmt(*r.agch_crossing) : std::string("never")) +
          ", data at " + (r.data_crossing ? fmt(*r.data_crossing) : std::string("never"))));

  const Fig6aPoint* at40 = nullptr;
  for (const auto& p : r.points)
    if (p.lambda == 40.0) at40 = &p;
  const bool agch_gap = at40 && at40->coupled_pb_agch &&
                        at40->independent_pb_agch > *at40->coupled_pb_agch;
  const bool data_gap = at40 && at40->coupled_pb_data &&
                        at40->independent_pb_data > *at40->coupled_pb_data;
  r.checks.push_back(make_check(
      "independent-stage blocking exceeds coupled blocking at 40/s (AGCH)", agch_gap,
      at40 ? "independent " + fmt(at40->independent_pb_agch) + " vs coupled " +
                 fmt(at40->coupled_pb_agch)
           : "missing point"));
  r.checks.push_back(make_check(
      "independent-stage blocking exceeds coupled blocking at 40/s (DATA)", data_gap,
      at40 ? "independent " + fmt(at40->independent_pb_data) + " vs coupled " +
                 fmt(at40->coupled_pb_data)
           : "missing point"));
  return r;
}

// fig6b: outage vs fresh arrival rate for the three access variants with
// 152-byte asynchronous reports; capacity is the largest swept rate whose
// outage stays below 2%.
struct Fig6bResult {
  std::vector<SweepPoint> rows;
  std::optional<double> legacy_capacity;
  std::optional<double> agch_capacity;
  std::optional<double> improved_capacity;
  std::vector<Check> checks;
};

inline Fig6bResult reproduce_fig6b(std::uint64_t seed = 1, double measure_s = 1200.0) {
  Fig6bResult r;
  const Scenario fleet = poisson_fleet("smart-meters", 13941, 40.0, 152);
  struct Arm {
    Variant variant;
    std::vector<double> grid;
    std::optional<double>* capacity;
  };
  const std::vector<double> low = {10, 20, 25, 30, 35, 40};
  const std::vector<double> mid = {20, 30, 40, 50};
  const std::vector<double> high = {40, 50, 60, 70};
  Arm arms[] = {{Variant::legacy, low, &r.legacy_capacity},
                {Variant::agch, mid, &r.agch_capacity},
                {Variant::agch_eusf, high, &r.improved_capacity}};
  for (const Arm& arm : arms) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.variant = arm.variant;
    cfg.measure_s = measure_s;
    auto rows = sweep(cfg, fleet, SweepAxis::lambda, arm.grid, {seed});
    for (const auto& p : rows) {
      if (p.report.blocking.outage && *p.report.blocking.outage < headline::kOutageTarget)
        if (!*arm.capacity || p.axis_value > **arm.capacity) *arm.capacity = p.axis_value;
      r.rows.push_back(p);
    }
  }

  r.checks.push_back(make_check(
      "legacy 2%-outage capacity <= 40/s",
      r.legacy_capacity && *r.legacy_capacity <= headline::kLegacyLambdaMax,
      "measured " + (r.legacy_capacity ? fmt(*r.legacy_capacity) : std::string("none"))));
  r.checks.push_back(make_check(
      "agch+eusf 2%-outage capacity >= 60/s",
      r.improved_capacity && *r.improved_capacity >= headline::kImprovedLambdaMin,
      "measured " + (r.improved_capacity ? fmt(*r.improved_capacity) : std::string("none"))));
  const bool ratio_ok = r.legacy_capacity && r.improved_capacity &&
                        *r.improved_capacity / *r.legacy_capacity >= headline::kCapacityRatioMin;
  r.checks.push_back(make_check(
      "capacity ratio >= 1.75", ratio_ok,
      r.legacy_capacity && r.improved_capacity
          ? fmt(*r.improved_capacity / *r.legacy_capacity)
          : std::string("incomplete")));
  return r;
}

// fig6c: outage vs number of synchronously-activating alarm meters (Beta(3,4)
// over 120 s, 100-byte reports, separate RACH channels) on top of the
// commercial asynchronous background.
struct Fig6cResult {
  std::vector<SweepPoint> rows;  // axis = cell-level alarm device count
  std::vector<Check> checks;
};

inline Fig6cResult reproduce_fig6c(std::uint64_t seed = 1, double measure_s = 420.0) {
  Fig6cResult r;
  Scenario base = commercial_background_scenario();
  DeviceClass alarm;
  alarm.name = "alarm-meters";
  alarm.count = 1500;
  alarm.payload_bytes = 100;
  alarm.distribution = ArrivalKind::beta_alarm;
  alarm.activation_period_s = 120.0;
  base.classes.push_back(alarm);

  const std::vector<double> grid = {500, 1000, 1500, 2000, 2300, 3000};
  auto outage_at = [&r](Variant v, double n) -> std::optional<double> {
    for (const auto& p : r.rows)
      if (p.variant == v && p.axis_value == n) return p.report.blocking.outage;
    return std::nullopt;
  };

  for (Variant v : {Variant::legacy, Variant::agch, Variant::agch_eusf}) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.variant = v;
    cfg.measure_s = measure_s;
    cfg.separate_rach = true;
    auto rows = sweep(cfg, base, SweepAxis::alarm_count, grid, {seed});
    for (auto& p : rows) r.rows.push_back(std::move(p));
  }

  const auto e1500 = outage_at(Variant::agch_eusf, 1500);
  const auto e2300 = outage_at(Variant::agch_eusf, 2300);
  const auto l1500 = outage_at(Variant::legacy, 1500);
  const auto a1500 = outage_at(Variant::agch, 1500);
  r.checks.push_back(make_check("agch+eusf outage at 1500 alarm meters <= 0.5%",
                                e1500 && *e1500 <= headline::kAlarmImprovedOutageAt1500,
                                "measured " + fmt(e1500)));
  r.checks.push_back(make_check("agch+eusf outage at 2300 alarm meters <= 10%",
                                e2300 && *e2300 <= headline::kAlarmImprovedOutageAt2300,
                                "measured " + fmt(e2300)));
  r.checks.push_back(make_check("legacy misses the 0.1% outage target at 1500",
                                l1500 && *l1500 > headline::kAlarmStrictOutage,
                                "measured " + fmt(l1500)));
  r.checks.push_back(make_check("agch-only misses the 0.1% outage target at 1500",
                                a1500 && *a1500 > headline::kAlarmStrictOutage,
                                "measured " + fmt(a1500)));
  return r;
}

// ---------------------------------------------------------------------------
// file output

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

inline std::string checks_summary(const std::vector<Check>& checks) {
  std::ostringstream out;
  for (const auto& c : checks)
    out << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  (" << c.detail << ")\n";
  return out.str();
}

inline std::string fig6a_csv(const Fig6aResult& r) {
  std::ostringstream out;
  out << "lambda_per_s,lambda_rach_measured,coupled_pb_agch,coupled_pb_data,"
         "independent_pb_agch,independent_pb_data\n";
  for (const auto& p : r.points)
    out << fmt(p.lambda) << ',' << fmt(p.lambda_rach_measured) << ',' << fmt(p.coupled_pb_agch)
        << ',' << fmt(p.coupled_pb_data) << ',' << fmt(p.independent_pb_agch) << ','
        << fmt(p.independent_pb_data) << "\n";
  return out.str();
}

// Runs the named recipe, writes its outputs under out_dir, and returns the
// checks. Known ids: fig4, fig6a, fig6b, fig6c.
inline std::vector<Check> reproduce_to_dir(const std::string& figure_id,
                                           const std::filesystem::path& out_dir,
                                           std::uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  if (figure_id == "fig4") {
    const Fig4Result r = reproduce_fig4(seed);
    write_file(out_dir / "run.csv", run_csv_header() + "\n" + run_csv_row(40.0, r.report) + "\n");
    write_file(out_dir / "histograms.csv", histogram_csv(r.report.window));
    write_file(out_dir / "summary.txt", checks_summary(r.checks));
    return r.checks;
  }
  if (figure_id == "fig6a") {
    const Fig6aResult r = reproduce_fig6a(seed);
    write_file(out_dir / "blocking.csv", fig6a_csv(r));
    write_file(out_dir / "summary.txt", checks_summary(r.checks));
    return r.checks;
  }
  if (figure_id == "fig6b") {
    const Fig6bResult r = reproduce_fig6b(seed);
    write_file(out_dir / "outage.csv", sweep_csv(r.rows));
    write_file(out_dir / "summary.txt", checks_summary(r.checks));
    return r.checks;
  }
  if (figure_id == "fig6c") {
    const Fig6cResult r = reproduce_fig6c(seed);
    write_file(out_dir / "outage.csv", sweep_csv(r.rows));
    write_file(out_dir / "summary.txt", checks_summary(r.checks));
    return r.checks;
  }
  throw std::runtime_error("unknown recipe '" + figure_id + "' (fig4|fig6a|fig6b|fig6c)");
}

}  // namespace gsmsim
