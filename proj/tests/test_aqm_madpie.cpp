#include <catch2/catch_amalgamated.hpp>
#include <cstdint>
#include <vector>

#include "aqmsim/aqm/madpie.hpp"
#include "aqmsim/rng.hpp"

using namespace aqmsim;
using namespace aqmsim::aqm;
using namespace std::chrono_literals;

namespace {

MadpieConfig cfg_30ms() {
  MadpieConfig cfg;
  cfg.pie.prob_range_scaling = false;
  cfg.tau_dd = 30ms;
  return cfg;
}

}  // namespace

TEST_CASE("update arms p_max when the estimate exceeds tau_dd") {
  MadpieConfig cfg = cfg_30ms();
  MadpieState st = make_madpie_state(cfg);
  st.pie.est_delay = 35ms;
  madpie_update(st, cfg);
  CHECK(st.p_max);
}

TEST_CASE("boundary is strict: estimate equal to tau_dd does not arm") {
  MadpieConfig cfg = cfg_30ms();
  MadpieState st = make_madpie_state(cfg);
  st.pie.est_delay = 30ms;
  madpie_update(st, cfg);
  CHECK_FALSE(st.p_max);
}

TEST_CASE("an armed, unconsumed p_max survives low-delay ticks") {
  MadpieConfig cfg = cfg_30ms();
  MadpieState st = make_madpie_state(cfg);
  st.p_max = true;
  st.pie.est_delay = 10ms;
  madpie_update(st, cfg);
  CHECK(st.p_max);
}

TEST_CASE("a random drop leaves p_max armed") {
  MadpieConfig cfg = cfg_30ms();
  MadpieState st = make_madpie_state(cfg);
  st.pie.burst_remaining = Duration{0};
  st.pie.p_drop = 0.5;
  st.p_max = true;
  const auto dec = madpie_enqueue_decision(st, 1'500, 1'000'000, 0.4);  // u <= p_drop
  REQUIRE_FALSE(dec.accepted());
  CHECK(*dec.drop == DropCause::RandomDrop);
  CHECK(st.p_max);
}

TEST_CASE("a packet the random policy admits is taken deterministically") {
  MadpieConfig cfg = cfg_30ms();
  MadpieState st = make_madpie_state(cfg);
  st.pie.burst_remaining = Duration{0};
  st.pie.p_drop = 0.5;
  st.p_max = true;
  const auto dec = madpie_enqueue_decision(st, 1'500, 1'000'000, 0.9);  // u > p_drop
  REQUIRE_FALSE(dec.accepted());
  CHECK(*dec.drop == DropCause::DeterministicDrop);
  CHECK_FALSE(st.p_max);
  CHECK(st.pie.queue_bytes == 0);  // the packet never entered the queue
}

TEST_CASE("burst allowance does not shield the deterministic policy") {
  MadpieConfig cfg = cfg_30ms();
  MadpieState st = make_madpie_state(cfg);
  st.pie.burst_remaining = 50ms;
  st.p_max = true;
  const auto dec = madpie_enqueue_decision(st, 1'500, 1'000'000, 0.9);
  REQUIRE_FALSE(dec.accepted());
  CHECK(*dec.drop == DropCause::DeterministicDrop);
}

TEST_CASE("at most one deterministic drop per update interval") {
  MadpieConfig cfg = cfg_30ms();
  MadpieState st = make_madpie_state(cfg);
  st.pie.burst_remaining = Duration{0};
  Rng rng(5);
  for (int tick = 0; tick < 50; ++tick) {
    st.pie.est_delay = 40ms;  // always above tau_dd
    madpie_update(st, cfg);
    int dd_this_interval = 0;
    for (int pkt = 0; pkt < 100; ++pkt) {
      const auto dec = madpie_enqueue_decision(st, 1'500, 100'000'000, rng.uniform01());
      if (!dec.accepted() && *dec.drop == DropCause::DeterministicDrop) ++dd_this_interval;
      if (dec.accepted()) pie_on_dequeue(st.pie, 1'500);  // keep the queue shallow
    }
    CHECK(dd_this_interval == 1);
  }
}

TEST_CASE("no deterministic drops while the estimate never exceeds tau_dd") {
  MadpieConfig cfg = cfg_30ms();
  MadpieState st = make_madpie_state(cfg);
  st.pie.burst_remaining = Duration{0};
  Rng rng(6);
  for (int tick = 0; tick < 200; ++tick) {
    st.pie.est_delay = Duration(static_cast<std::int64_t>(rng.uniform01() * 30e6));
    madpie_update(st, cfg);
    for (int pkt = 0; pkt < 20; ++pkt) {
      const auto dec = madpie_enqueue_decision(st, 1'500, 100'000'000, rng.uniform01());
      if (!dec.accepted()) CHECK(*dec.drop != DropCause::DeterministicDrop);
      if (dec.accepted()) pie_on_dequeue(st.pie, 1'500);
    }
  }
}

TEST_CASE("tau_dd = +inf reproduces PIE decision-for-decision") {
  MadpieConfig mcfg = cfg_30ms();
  mcfg.tau_dd = Duration::max();
  PieConfig pcfg = mcfg.pie;
  MadpieState mad = make_madpie_state(mcfg);
  PieState pie = make_pie_state(pcfg);

  Rng rng(99);
  for (int step = 0; step < 10'000; ++step) {
    if (step % 7 == 0) {
      const Duration est{static_cast<std::int64_t>(rng.uniform01() * 200e6)};
      mad.pie.est_delay = est;
      pie.est_delay = est;
      madpie_update(mad, mcfg);
      pie_update(pie, pcfg);
    }
    const double u = rng.uniform01();
    const auto a = madpie_enqueue_decision(mad, 1'500, 62'500, u);
    const auto b = pie_enqueue_decision(pie, 1'500, 62'500, u);
    REQUIRE(a.accepted() == b.accepted());
    if (!a.accepted()) REQUIRE(*a.drop == *b.drop);
    if (step % 3 == 0 && mad.pie.queue_bytes >= 1'500) {
      madpie_on_dequeue(mad, 1'500);
      pie_on_dequeue(pie, 1'500);
    }
    REQUIRE(mad.pie.queue_bytes == pie.queue_bytes);
    REQUIRE(mad.pie.p_drop == pie.p_drop);
  }
}
