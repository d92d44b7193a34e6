#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aqmsim/cli/compare.hpp"
#include "aqmsim/cli/config_io.hpp"
#include "aqmsim/cli/runner.hpp"
#include "aqmsim/netsim/scenario.hpp"

using namespace aqmsim;

namespace {

void print_presets() {
  using netsim::AqmKind;
  struct Row {
    const char* name;
    netsim::ScenarioConfig cfg;
    const char* notes;
  };
  const Row rows[] = {
      {"proof_of_concept", netsim::proof_of_concept_preset(AqmKind::Madpie),
       "10 bulk CUBIC flows; --owd 48ms or 248ms (base RTT 100/500 ms); tau_dd 30ms"},
      {"traffic_mix", netsim::traffic_mix_preset(AqmKind::Madpie),
       "4 CBR + 20 short-flow + 10 bulk; --owd 48/148/248 ms; tau_dd 25ms"},
      {"rtt_mix", netsim::rtt_mix_preset(AqmKind::Madpie),
       "two RTT groups (100/500 ms) x (4 CBR + 20 SF + 2 bulk); queue = BDP of 500 ms"},
  };
  for (const auto& r : rows) {
    const auto& c = r.cfg;
    std::printf("%-18s %s\n", r.name, r.notes);
    std::printf(
        "  duration=%s  bottleneck=%.0fMbps/%s  access=%.0fMbps  queue=%llu B\n"
        "  flows near cbr=%d sf=%d ftp=%d  far cbr=%d sf=%d ftp=%d\n",
        format_duration(c.duration).c_str(), c.bottleneck_rate_bps / 1e6,
        format_duration(c.bottleneck_owd).c_str(), c.access_rate_bps / 1e6,
        static_cast<unsigned long long>(c.effective_queue_capacity()), c.near.cbr,
        c.near.sf, c.near.ftp, c.far.cbr, c.far.sf, c.far.ftp);
    std::printf("  pie: target=%s lambda=%s alpha=%.3f beta=%.3f burst=%s  tau_dd=%s  "
                "codel: %s/%s\n\n",
                format_duration(c.aqm.pie.target).c_str(),
                format_duration(c.aqm.pie.update_interval).c_str(), c.aqm.pie.alpha,
                c.aqm.pie.beta, format_duration(c.aqm.pie.max_burst).c_str(),
                format_duration(c.aqm.tau_dd).c_str(),
                format_duration(c.aqm.codel.target).c_str(),
                format_duration(c.aqm.codel.interval).c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic dumbbell-bottleneck AQM simulator"};
  app.require_subcommand(1);

  // ---- run ----
  auto* run = app.add_subcommand("run", "Run a scenario batch with seeded replications");
  std::string preset = "proof_of_concept";
  std::string aqm = "madpie";
  std::string owd, duration, out_dir, emit = "both", config_file, tau_dd;
  std::uint32_t reps = 20;
  std::uint64_t seed = 1;
  std::uint32_t jobs = 0;
  bool dump_config = false;
  run->add_option("--preset", preset, "proof_of_concept|traffic_mix|rtt_mix|custom");
  run->add_option("--aqm", aqm, "dt|pie|madpie|codel");
  run->add_option("--owd", owd, "bottleneck one-way delay, e.g. 248ms");
  run->add_option("--duration", duration, "run length, e.g. 300s");
  run->add_option("--reps", reps, "replications (seed+i each)");
  run->add_option("--seed", seed, "base seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--emit", emit, "csv|json|both (default both)");
  run->add_option("--jobs", jobs, "concurrent replications (0 = all cores)");
  run->add_option("--config", config_file, "manifest JSON; flags override it");
  run->add_option("--tau-dd", tau_dd, "MADPIE deterministic-drop threshold");
  run->add_flag("--dump-config", dump_config, "print the effective manifest and exit");

  // ---- compare ----
  auto* cmp = app.add_subcommand("compare", "Compare two finished run directories");
  std::string dir_a, dir_b, cmp_out;
  cmp->add_option("dir_a", dir_a)->required();
  cmp->add_option("dir_b", dir_b)->required();
  cmp->add_option("--out", cmp_out, "report directory")->required();

  // ---- presets ----
  auto* pre = app.add_subcommand("presets", "List the built-in scenario presets");

  CLI11_PARSE(app, argc, argv);

  if (pre->parsed()) {
    print_presets();
    return 0;
  }

  if (cmp->parsed()) {
    const cli::RunOutcome r = cli::compare_runs(dir_a, dir_b, cmp_out);
    if (r.exit_code != 0) std::cerr << "error: " << r.error << "\n";
    return r.exit_code;
  }

  try {
    cli::RunManifest manifest;
    const bool have_config = !config_file.empty();
    if (have_config) {
      std::ifstream in(config_file);
      if (!in) {
        std::cerr << "error: cannot open " << config_file << "\n";
        return 3;
      }
      nlohmann::json j;
      in >> j;
      manifest = j.get<cli::RunManifest>();
    } else {
      manifest.scenario = netsim::preset_config(netsim::preset_from_string(preset),
                                                netsim::aqm_kind_from_string(aqm));
    }
    if (have_config && (run->count("--preset") > 0 || run->count("--aqm") > 0)) {
      manifest.scenario = netsim::preset_config(netsim::preset_from_string(preset),
                                                netsim::aqm_kind_from_string(aqm));
    }
    if (!owd.empty()) manifest.scenario.bottleneck_owd = parse_duration(owd);
    if (!duration.empty()) manifest.scenario.duration = parse_duration(duration);
    if (!tau_dd.empty()) manifest.scenario.aqm.tau_dd = parse_duration(tau_dd);
    if (run->count("--reps") > 0 || !have_config) manifest.replications = reps;
    if (run->count("--seed") > 0 || !have_config) manifest.base_seed = seed;
    if (run->count("--emit") > 0 || !have_config) manifest.emit = cli::emit_from_string(emit);
    if (run->count("--jobs") > 0 || !have_config) manifest.jobs = jobs;
    if (!out_dir.empty()) manifest.output_dir = out_dir;

    if (dump_config) {
      std::cout << nlohmann::json(manifest).dump(2) << "\n";
      return 0;
    }

    const cli::RunOutcome r = cli::run_manifest(manifest);
    if (r.exit_code != 0) std::cerr << "error: " << r.error << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
