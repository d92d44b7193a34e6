// Minimal library usage: run one short MADPIE scenario in-process and
// print a few headline numbers.

#include <cstdio>
#include <vector>

#include "aqmsim/metrics/stats.hpp"
#include "aqmsim/netsim/build.hpp"

int main() {
  using namespace aqmsim;
  using namespace std::chrono_literals;

  netsim::ScenarioConfig cfg = netsim::proof_of_concept_preset(netsim::AqmKind::Madpie, 248ms);
  cfg.duration = 30s;
  cfg.seed = 7;

  netsim::Simulation sim(cfg);
  metrics::MetricSeries series = sim.run();

  std::vector<std::int64_t> delays;
  delays.reserve(series.qdelay.size());
  for (const auto& s : series.qdelay) delays.push_back(s.delay.count());
  const auto attribution = metrics::attribute_drops(series.drops);

  std::printf("delivered packets : %llu\n",
              static_cast<unsigned long long>(series.queue.delivered));
  std::printf("median qdelay     : %.2f ms\n",
              metrics::percentile(delays, 50.0) / 1e6);
  std::printf("p95 qdelay        : %.2f ms\n",
              metrics::percentile(delays, 95.0) / 1e6);
  std::printf("drops             : %llu (deterministic %llu, random %llu, overflow %llu)\n",
              static_cast<unsigned long long>(attribution.n_tot),
              static_cast<unsigned long long>(attribution.n_DD),
              static_cast<unsigned long long>(attribution.n_RD),
              static_cast<unsigned long long>(attribution.n_BO));
  double util = 0.0;
  for (const double u : series.util) util += u;
  std::printf("mean utilization  : %.3f\n", util / static_cast<double>(series.util.size()));
  return 0;
}
