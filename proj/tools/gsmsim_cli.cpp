// Command-line front end: single runs, parameter sweeps, and the bundled
// experiment recipes (fig4, fig6a, fig6b, fig6c).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsmsim/sim.hpp"

namespace {

using namespace gsmsim;

std::string run_summary(const RunReport& r, const ConservationTotals& t) {
  std::ostringstream out;
  out << "variant            " << to_string(r.variant) << "\n";
  out << "seed               " << r.seed << "\n";
  out << "simulated_s        " << fmt(r.sim_duration_s) << "\n";
  out << "lambda_rach_per_s  " << fmt(r.rates.lambda_rach) << "\n";
  out << "lambda_agch_per_s  " << fmt(r.rates.lambda_agch) << "\n";
  out << "lambda_usf_per_s   " << fmt(r.rates.lambda_usf) << "\n";
  out << "p_rach             " << fmt(r.rates.p_rach) << "\n";
  out << "p_agch             " << fmt(r.rates.p_agch) << "\n";
  out << "p_b_agch           " << fmt(r.blocking.p_b_agch) << "\n";
  out << "p_b_data           " << fmt(r.blocking.p_b_data) << "\n";
  out << "outage             " << fmt(r.blocking.outage) << "\n";
  out << "delivered          " << r.window.delivered << "\n";
  out << "outages            " << r.window.outages << "\n";
  out << "overruns           " << r.window.overruns << "\n";
  out << "latency_p50_s      " << fmt(r.latency_p50_s) << "\n";
  out << "latency_p95_s      " << fmt(r.latency_p95_s) << "\n";
  out << "latency_p99_s      " << fmt(r.latency_p99_s) << "\n";
  out << "reports_reconcile  " << (t.reports_reconcile() ? "yes" : "NO") << "\n";
  out << "agch_reconciles    " << (t.agch_reconciles() ? "yes" : "NO") << "\n";
  return out.str();
}

void add_config_flags(CLI::App* cmd, SimConfig& cfg, std::string& variant_name) {
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--warmup", cfg.warmup_s, "warmup excluded from statistics, seconds");
  cmd->add_option("--measure", cfg.measure_s, "measurement window, seconds");
  cmd->add_option("--variant", variant_name, "access variant: legacy|agch|agch+eusf");
  cmd->add_option("--eusf-x", cfg.eusf_x, "valid multiframes per eUSF period");
  cmd->add_option("--eusf-mgap", cfg.eusf_m_gap, "non-valid multiframes per eUSF period");
  cmd->add_option("--frames-per-multiframe", cfg.plan.frames_per_multiframe);
  cmd->add_option("--n-pdch", cfg.plan.n_pdch);
  cmd->add_option("--agch-blocks", cfg.plan.agch_blocks_per_multiframe);
  cmd->add_option("--rach-slots-per-frame", cfg.plan.rach_slots_per_frame);
  cmd->add_option("--backoff-window", cfg.access.backoff_window, "frames");
  cmd->add_option("--response-window", cfg.access.response_window, "frames");
  cmd->add_option("--max-attempts", cfg.access.max_attempts);
  cmd->add_option("--block-payload", cfg.coding.block_payload_bytes, "bytes per radio block");
  cmd->add_flag("--separate-rach", cfg.separate_rach, "alarm classes use their own RACH channel");
  cmd->add_flag("--retain-on-usf-block", cfg.retain_on_usf_block,
                "keep requests queued when no USF is available");
  cmd->add_option("--alarm-epoch", cfg.alarm_epoch_s, "alarm window start, seconds");
}

Scenario load_scenario(const std::string& scenario_arg) {
  if (auto b = builtin_scenario(scenario_arg)) return *b;
  return parse_scenario(scenario_arg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GSM/GPRS random-access pipeline simulator (RACH -> AGCH -> DATA)"};
  app.require_subcommand(1);

  SimConfig cfg;
  std::string variant_name;
  std::string config_path;
  std::string scenario_arg = "suburban-m2m";
  std::string out_dir;

  // config file loads first so explicit flags override it
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream f(argv[i + 1]);
      if (!f) {
        std::cerr << "error: cannot open config file " << argv[i + 1] << "\n";
        return 2;
      }
      std::stringstream ss;
      ss << f.rdbuf();
      try {
        cfg = parse_config_text(ss.str());
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
    }
  }

  auto* run_cmd = app.add_subcommand("run", "simulate one configuration");
  run_cmd->add_option("--config", config_path, "key = value config file");
  run_cmd->add_option("--scenario", scenario_arg,
                      "scenario file, or builtin: suburban-m2m, commercial-background");
  run_cmd->add_option("--out", out_dir, "directory for run.csv, histograms.csv, summary.txt");
  add_config_flags(run_cmd, cfg, variant_name);

  std::string axis_name = "lambda";
  std::vector<double> values;
  std::vector<std::uint64_t> seeds{1};
  auto* sweep_cmd = app.add_subcommand("sweep", "run one configuration across an axis");
  sweep_cmd->add_option("--config", config_path);
  sweep_cmd->add_option("--scenario", scenario_arg);
  sweep_cmd->add_option("--axis", axis_name, "lambda | alarm_count");
  sweep_cmd->add_option("--values", values, "axis values")->required();
  sweep_cmd->add_option("--seeds", seeds, "seeds, one run per (value, seed)");
  sweep_cmd->add_option("--out", out_dir, "output CSV path (default stdout)");
  add_config_flags(sweep_cmd, cfg, variant_name);

  std::string figure_id;
  auto* repro_cmd = app.add_subcommand("reproduce", "run a bundled experiment recipe");
  repro_cmd->add_option("figure", figure_id, "fig4 | fig6a | fig6b | fig6c")->required();
  repro_cmd->add_option("--seed", cfg.seed);
  repro_cmd->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!variant_name.empty()) cfg.variant = parse_variant(variant_name);

    if (run_cmd->parsed()) {
      cfg.validate();
      const Scenario scenario = load_scenario(scenario_arg);
      const RunReport rep = run_simulation(cfg, scenario);
      const std::string csv = run_csv_header() + "\n" + run_csv_row(0.0, rep) + "\n";
      const std::string summary = run_summary(rep, rep.totals);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(std::filesystem::path(out_dir) / "run.csv", csv);
        write_file(std::filesystem::path(out_dir) / "histograms.csv", histogram_csv(rep.window));
        write_file(std::filesystem::path(out_dir) / "summary.txt", summary);
      }
      std::cout << summary;
      std::fprintf(stderr, "wall runtime: %.2f s\n", rep.wall_runtime_s);
      return 0;
    }

    if (sweep_cmd->parsed()) {
      cfg.validate();
      const Scenario scenario = load_scenario(scenario_arg);
      const auto rows = sweep(cfg, scenario, parse_axis(axis_name), values, seeds);
      const std::string csv = sweep_csv(rows);
      if (out_dir.empty())
        std::cout << csv;
      else
        write_file(out_dir, csv);
      return 0;
    }

    // reproduce
    const auto checks = reproduce_to_dir(figure_id, out_dir, cfg.seed);
    std::cout << checks_summary(checks);
    bool all = true;
    for (const auto& c : checks) all = all && c.pass;
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
