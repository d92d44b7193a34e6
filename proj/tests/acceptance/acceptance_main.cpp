// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Exact algorithmic checks run first, then the directional
// reproductions on the three scenario presets (20 seeded replications each).

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "aqmsim/cli/runner.hpp"
#include "aqmsim/metrics/stats.hpp"
#include "aqmsim/netsim/build.hpp"
#include "aqmsim/rng.hpp"

using namespace aqmsim;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d: %s  (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- batches

struct Batch {
  netsim::ScenarioConfig cfg;
  std::vector<metrics::MetricSeries> reps;
};

Batch run_batch(netsim::ScenarioConfig cfg, std::uint32_t reps, std::uint64_t base_seed) {
  Batch batch;
  batch.cfg = cfg;
  batch.reps.resize(reps);
  std::atomic<std::uint32_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::uint32_t i = next.fetch_add(1);
      if (i >= reps) return;
      netsim::ScenarioConfig c = cfg;
      c.seed = base_seed + i;
      c.replication = i;
      netsim::Simulation sim(c);
      batch.reps[i] = sim.run();
    }
  };
  const std::uint32_t jobs =
      std::max(1u, std::min(reps, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::uint32_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return batch;
}

std::vector<std::int64_t> pooled_qdelay(const Batch& b, int cls = -1) {
  std::vector<std::int64_t> v;
  for (const auto& r : b.reps) {
    for (const auto& s : r.qdelay) {
      if (cls < 0 || s.cls == static_cast<std::uint32_t>(cls)) v.push_back(s.delay.count());
    }
  }
  std::sort(v.begin(), v.end());
  return v;
}

double pooled_pct_ms(const Batch& b, double q, int cls = -1) {
  const auto v = pooled_qdelay(b, cls);
  return static_cast<double>(
             metrics::percentile_sorted(std::span<const std::int64_t>(v), q)) /
         1e6;
}

double mean_util(const Batch& b) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : b.reps) {
    for (const double u : r.util) sum += u;
    n += r.util.size();
  }
  return sum / static_cast<double>(n);
}

metrics::DropAttribution pooled_drops(const Batch& b) {
  std::vector<aqm::DropRecord> all;
  for (const auto& r : b.reps) all.insert(all.end(), r.drops.begin(), r.drops.end());
  return metrics::attribute_drops(all);
}

double goodput_mean_bps(const Batch& b, const std::string& cls_name) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : b.reps) {
    for (std::size_t c = 0; c < r.class_names.size(); ++c) {
      if (r.class_names[c] != cls_name) continue;
      for (const std::uint64_t bits : r.goodput_bits[c]) sum += static_cast<double>(bits);
      n += r.goodput_bits[c].size();
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

int class_index(const Batch& b, const std::string& name) {
  const auto& names = b.reps.front().class_names;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::map<std::uint64_t, double> download_median_ms_by_size(const Batch& b) {
  std::map<std::uint64_t, std::vector<std::int64_t>> by_size;
  for (const auto& r : b.reps) {
    for (const auto& d : r.downloads) {
      if (d.completed) by_size[d.size_bytes].push_back(d.duration.count());
    }
  }
  std::map<std::uint64_t, double> medians;
  for (auto& [size, v] : by_size) {
    std::sort(v.begin(), v.end());
    medians[size] =
        static_cast<double>(
            metrics::percentile_sorted(std::span<const std::int64_t>(v), 50.0)) /
        1e6;
  }
  return medians;
}

// Suite-wide ledgers for criteria 2 and 6.
struct SuiteChecks {
  std::uint64_t conservation_runs = 0;
  std::uint64_t conservation_violations = 0;
  std::uint64_t madpie_runs = 0;
  std::uint64_t madpie_interval_violations = 0;

  void absorb(const Batch& b, bool madpie) {
    for (const auto& r : b.reps) {
      ++conservation_runs;
      if (r.queue.offered != r.queue.delivered + r.queue.dropped + r.queue.resident) {
        ++conservation_violations;
      }
      if (!madpie) continue;
      ++madpie_runs;
      // Between consecutive deterministic drops there must be an update
      // tick, in observation order.
      std::vector<std::uint64_t> dd_ords;
      for (const auto& d : r.drops) {
        if (d.cause == aqm::DropCause::DeterministicDrop) dd_ords.push_back(d.ord);
      }
      const auto& ticks = r.update_tick_ords;
      std::size_t t = 0;
      for (std::size_t i = 1; i < dd_ords.size(); ++i) {
        while (t < ticks.size() && ticks[t] < dd_ords[i - 1]) ++t;
        if (t >= ticks.size() || ticks[t] > dd_ords[i]) {
          ++madpie_interval_violations;
          break;
        }
      }
    }
  }
};

SuiteChecks g_suite;

// ------------------------------------------------------------ criterion 1

double oracle_eq1(double p, double est_s, double est_old_s, double alpha, double beta,
                  double tau_s) {
  const double next = p + (alpha * (est_s - tau_s) + beta * (est_s - est_old_s));
  return std::clamp(next, 0.0, 1.0);
}

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  aqm::PieConfig cfg;
  cfg.prob_range_scaling = false;
  Rng rng(20'240'817);
  std::int64_t worst = 0;
  bool clamped_ok = true;
  for (int i = 0; i < 10'000; ++i) {
    cfg.alpha = rng.uniform01() * 2.0;
    cfg.beta = rng.uniform01() * 4.0;
    cfg.target = Duration(static_cast<std::int64_t>(rng.uniform01() * 100e6));
    aqm::PieState st = aqm::make_pie_state(cfg);
    st.p_drop = rng.uniform01();
    st.est_delay = Duration(static_cast<std::int64_t>(rng.uniform01() * 500e6));
    st.est_delay_old = Duration(static_cast<std::int64_t>(rng.uniform01() * 500e6));
    const double expected =
        oracle_eq1(st.p_drop, to_seconds(st.est_delay), to_seconds(st.est_delay_old),
                   cfg.alpha, cfg.beta, to_seconds(cfg.target));
    aqm::pie_update(st, cfg);
    const auto ia = std::bit_cast<std::int64_t>(st.p_drop);
    const auto ib = std::bit_cast<std::int64_t>(expected);
    worst = std::max(worst, ia > ib ? ia - ib : ib - ia);
    if (st.p_drop < 0.0 || st.p_drop > 1.0) clamped_ok = false;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(1, "probability update matches scalar recomputation within 1 ulp",
         worst <= 1 && clamped_ok && secs < 1.0,
         fmt("worst ulp distance %" PRId64 ", clamp ok %d, %.3f s for 1e4 cases", worst,
             clamped_ok ? 1 : 0, secs));
}

// ------------------------------------------------------------ criterion 3

void criterion_3() {
  netsim::ScenarioConfig pie = netsim::proof_of_concept_preset(netsim::AqmKind::Pie, 248ms);
  pie.duration = 60s;
  pie.seed = 7;
  netsim::ScenarioConfig mad = pie;
  mad.aqm.kind = netsim::AqmKind::Madpie;
  mad.aqm.tau_dd = Duration::max();

  auto sa = netsim::Simulation(pie).run();
  auto sb = netsim::Simulation(mad).run();
  bool same = sa.qdelay.size() == sb.qdelay.size() && sa.drops.size() == sb.drops.size() &&
              sa.util == sb.util && sa.events_processed == sb.events_processed;
  if (same) {
    for (std::size_t i = 0; i < sa.qdelay.size(); ++i) {
      if (sa.qdelay[i].at != sb.qdelay[i].at || sa.qdelay[i].delay != sb.qdelay[i].delay) {
        same = false;
        break;
      }
    }
    for (std::size_t i = 0; same && i < sa.drops.size(); ++i) {
      if (sa.drops[i].at != sb.drops[i].at || sa.drops[i].cause != sb.drops[i].cause) {
        same = false;
      }
    }
  }
  report(3, "MADPIE with tau_dd = +inf reproduces PIE decision-for-decision", same,
         fmt("%zu delay samples, %zu drops compared", sa.qdelay.size(), sa.drops.size()));
}

// ------------------------------------------------------------ criterion 4

void criterion_4() {
  aqm::CodelConfig cfg;
  aqm::CodelState st;
  PacketFifo q;
  std::vector<std::int64_t> drop_times;
  auto opportunity = [&](SimTime now) {
    while (!q.empty()) q.pop();
    for (int i = 0; i < 6; ++i) {
      Packet p;
      p.wire_bytes = 1'500;
      p.enqueue_ts = now - 10ms;  // constant 10 ms sojourn
      q.push(std::move(p));
    }
    aqm::codel_dequeue(st, cfg, q, now,
                       [&](const Packet&, Duration) { drop_times.push_back(now.ns()); });
  };
  for (int i = 0; i <= 100; ++i) opportunity(SimTime::from_ns(i * 1'000'000));
  bool ok = drop_times.size() == 1 && drop_times[0] == 100'000'000;
  for (int k = 0; k < 5; ++k) opportunity(st.next_drop_at);
  ok = ok && drop_times.size() == 6;
  std::int64_t expected = 100'000'000;
  for (std::size_t k = 1; ok && k < drop_times.size(); ++k) {
    expected += aqm::codel_drop_spacing(cfg, static_cast<std::uint32_t>(k)).count();
    if (drop_times[k] != expected) ok = false;
  }
  report(4,
         "codel trace: first drop one interval after first-above, spacing interval/sqrt(count)",
         ok,
         fmt("drops at %" PRId64 ", %" PRId64 ", %" PRId64 " ... ns",
             drop_times.size() > 0 ? drop_times[0] : -1,
             drop_times.size() > 1 ? drop_times[1] : -1,
             drop_times.size() > 2 ? drop_times[2] : -1));
}

// ------------------------------------------------------------ criterion 5

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_5() {
  cli::RunManifest m;
  m.scenario = netsim::proof_of_concept_preset(netsim::AqmKind::Madpie, 248ms);
  m.scenario.duration = 60s;
  m.replications = 2;
  m.base_seed = 5;
  m.jobs = 2;
  const fs::path a = fs::temp_directory_path() / "aqmsim_acc_det_a";
  const fs::path b = fs::temp_directory_path() / "aqmsim_acc_det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  m.output_dir = a.string();
  const bool ra = cli::run_manifest(m).exit_code == 0;
  m.output_dir = b.string();
  const bool rb = cli::run_manifest(m).exit_code == 0;
  bool same = ra && rb;
  std::size_t files = 0;
  for (const char* rep : {"rep_000", "rep_001"}) {
    for (const char* f :
         {"qdelay.csv", "util.csv", "goodput.csv", "drops.csv", "downloads.csv", "owd.csv"}) {
      ++files;
      if (slurp(a / rep / f) != slurp(b / rep / f)) same = false;
    }
  }
  report(5, "identical manifests produce byte-identical CSVs", same,
         fmt("%zu files compared across 2 replications", files));
}

}  // namespace

int main() {
  std::printf("== exact algorithmic checks ==\n");
  criterion_1();
  // Criteria 2 and 6 accumulate over every simulation the suite runs;
  // they are reported after the directional batches.
  criterion_3();
  criterion_4();
  criterion_5();

  std::printf("== directional reproductions (20 seeded replications each) ==\n");

  // Proof of concept: 10 bulk CUBIC flows, 300 s.
  Batch poc_pie_100 =
      run_batch(netsim::proof_of_concept_preset(netsim::AqmKind::Pie, 48ms), 20, 1);
  g_suite.absorb(poc_pie_100, false);
  Batch poc_mad_100 =
      run_batch(netsim::proof_of_concept_preset(netsim::AqmKind::Madpie, 48ms), 20, 1);
  g_suite.absorb(poc_mad_100, true);
  Batch poc_pie_500 =
      run_batch(netsim::proof_of_concept_preset(netsim::AqmKind::Pie, 248ms), 20, 1);
  g_suite.absorb(poc_pie_500, false);
  Batch poc_mad_500 =
      run_batch(netsim::proof_of_concept_preset(netsim::AqmKind::Madpie, 248ms), 20, 1);
  g_suite.absorb(poc_mad_500, true);

  {
    const double pie_p50 = pooled_pct_ms(poc_pie_100, 50.0);
    const double mad_p50 = pooled_pct_ms(poc_mad_100, 50.0);
    const double pie_util = mean_util(poc_pie_100);
    const double mad_util = mean_util(poc_mad_100);
    report(7, "RTT 100 ms: PIE and MADPIE are indistinguishable at the median",
           std::abs(pie_p50 - mad_p50) < 5.0 && std::abs(pie_util - mad_util) < 0.02,
           fmt("median %.2f vs %.2f ms, mean util %.4f vs %.4f", pie_p50, mad_p50, pie_util,
               mad_util));
  }
  {
    const double mad_p90 = pooled_pct_ms(poc_mad_500, 90.0);
    const double pie_p90 = pooled_pct_ms(poc_pie_500, 90.0);
    report(8, "RTT 500 ms: MADPIE p90 queuing delay <= 40 ms and below PIE's",
           mad_p90 <= 40.0 && mad_p90 < pie_p90,
           fmt("MADPIE p90 %.1f ms, PIE p90 %.1f ms", mad_p90, pie_p90));
  }
  {
    const double mad_max = pooled_pct_ms(poc_mad_500, 100.0);
    const double pie_max = pooled_pct_ms(poc_pie_500, 100.0);
    report(9, "RTT 500 ms: MADPIE cuts the maximum queuing delay by >= 20 ms",
           pie_max - mad_max >= 20.0, fmt("max %.1f vs %.1f ms", pie_max, mad_max));
  }
  {
    const auto at500 = pooled_drops(poc_mad_500);
    const auto at100 = pooled_drops(poc_mad_100);
    const double r_dd = at500.r_DD.value_or(0.0);
    const double r_rd = at100.r_RD.value_or(0.0);
    report(10, "drop attribution flips with RTT: r_DD >= 0.5 at 500 ms, r_RD >= 0.7 at 100 ms",
           r_dd >= 0.5 && r_rd >= 0.7,
           fmt("r_DD %.2f at 500 ms, r_RD %.2f at 100 ms", r_dd, r_rd));
  }
  {
    const double pie_util = mean_util(poc_pie_500);
    const double mad_util = mean_util(poc_mad_500);
    report(11, "RTT 500 ms: MADPIE does not sacrifice utilization (within 5% of PIE)",
           std::abs(pie_util - mad_util) <= 0.05,
           fmt("mean util %.4f vs %.4f", pie_util, mad_util));
  }

  // Traffic mix at 500 ms base RTT, 100 s.
  Batch mix_dt =
      run_batch(netsim::traffic_mix_preset(netsim::AqmKind::DropTail, 248ms), 20, 1);
  g_suite.absorb(mix_dt, false);
  Batch mix_pie = run_batch(netsim::traffic_mix_preset(netsim::AqmKind::Pie, 248ms), 20, 1);
  g_suite.absorb(mix_pie, false);
  Batch mix_mad = run_batch(netsim::traffic_mix_preset(netsim::AqmKind::Madpie, 248ms), 20, 1);
  g_suite.absorb(mix_mad, true);

  {
    const double dt_p50 = pooled_pct_ms(mix_dt, 50.0, class_index(mix_dt, "cbr"));
    const double pie_p50 = pooled_pct_ms(mix_pie, 50.0, class_index(mix_pie, "cbr"));
    const double mad_p50 = pooled_pct_ms(mix_mad, 50.0, class_index(mix_mad, "cbr"));
    const auto dt_dl = download_median_ms_by_size(mix_dt);
    const auto pie_dl = download_median_ms_by_size(mix_pie);
    const auto mad_dl = download_median_ms_by_size(mix_mad);
    bool downloads_worse = dt_dl.size() == 4;
    for (const auto& [size, dt_median] : dt_dl) {
      if (!pie_dl.count(size) || !mad_dl.count(size) || dt_median <= pie_dl.at(size) ||
          dt_median <= mad_dl.at(size)) {
        downloads_worse = false;
      }
    }
    report(12, "traffic mix: DropTail doubles CBR median delay and slows every file size",
           dt_p50 >= 2.0 * pie_p50 && dt_p50 >= 2.0 * mad_p50 && downloads_worse,
           fmt("CBR median DT %.1f, PIE %.1f, MADPIE %.1f ms; DT slower for %zu sizes",
               dt_p50, pie_p50, mad_p50, dt_dl.size()));
  }
  {
    const double pie_p95 = pooled_pct_ms(mix_pie, 95.0, class_index(mix_pie, "cbr"));
    const double mad_p95 = pooled_pct_ms(mix_mad, 95.0, class_index(mix_mad, "cbr"));
    report(13, "traffic mix at 500 ms: MADPIE trims the CBR p95 by >= 10 ms",
           pie_p95 - mad_p95 >= 10.0, fmt("p95 %.1f vs %.1f ms", pie_p95, mad_p95));
  }

  // RTT mix: 100 ms and 500 ms sender groups share the bottleneck.
  Batch rmx_pie = run_batch(netsim::rtt_mix_preset(netsim::AqmKind::Pie), 20, 1);
  g_suite.absorb(rmx_pie, false);
  Batch rmx_mad = run_batch(netsim::rtt_mix_preset(netsim::AqmKind::Madpie), 20, 1);
  g_suite.absorb(rmx_mad, true);
  Batch rmx_codel = run_batch(netsim::rtt_mix_preset(netsim::AqmKind::Codel), 20, 1);
  g_suite.absorb(rmx_codel, false);

  {
    const double pie_p95 = pooled_pct_ms(rmx_pie, 95.0, class_index(rmx_pie, "cbr_100"));
    const double mad_p95 = pooled_pct_ms(rmx_mad, 95.0, class_index(rmx_mad, "cbr_100"));
    const double codel_p95 =
        pooled_pct_ms(rmx_codel, 95.0, class_index(rmx_codel, "cbr_100"));
    const double pie_ftp =
        goodput_mean_bps(rmx_pie, "ftp_100") + goodput_mean_bps(rmx_pie, "ftp_500");
    const double codel_ftp =
        goodput_mean_bps(rmx_codel, "ftp_100") + goodput_mean_bps(rmx_codel, "ftp_500");
    const bool delay_ok = mad_p95 <= 0.9 * pie_p95 && std::abs(mad_p95 - codel_p95) <= 10.0;
    const bool goodput_ok = codel_ftp < pie_ftp;
    report(14, "RTT mix: MADPIE nears CoDel's CBR latency; CoDel pays in bulk goodput",
           delay_ok && goodput_ok,
           fmt("cbr_100 p95: PIE %.1f, MADPIE %.1f, CoDel %.1f ms; ftp PIE %.0f vs CoDel %.0f",
               pie_p95, mad_p95, codel_p95, pie_ftp, codel_ftp));
  }

  report(2, "at most one deterministic drop per update interval, every MADPIE run",
         g_suite.madpie_runs > 0 && g_suite.madpie_interval_violations == 0,
         fmt("%" PRIu64 " MADPIE runs checked, %" PRIu64 " violations", g_suite.madpie_runs,
             g_suite.madpie_interval_violations));
  report(6, "queue conservation holds in every run of the suite",
         g_suite.conservation_runs > 0 && g_suite.conservation_violations == 0,
         fmt("%" PRIu64 " runs checked, %" PRIu64 " violations", g_suite.conservation_runs,
             g_suite.conservation_violations));

  if (g_failures == 0) {
    std::printf("acceptance: all 14 criteria passed\n");
  } else {
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
