#include <catch2/catch_amalgamated.hpp>

#include "aqmsim/rng.hpp"
#include "aqmsim/time.hpp"

using namespace aqmsim;
using namespace std::chrono_literals;

TEST_CASE("duration parsing accepts unit suffixes and normalizes to ns") {
  CHECK(parse_duration("300s") == 300s);
  CHECK(parse_duration("30ms") == 30ms);
  CHECK(parse_duration("5us") == 5us);
  CHECK(parse_duration("174400ns") == Duration(174'400));
  CHECK(parse_duration("42") == Duration(42));
  CHECK(parse_duration("0.5s") == 500ms);
  CHECK(parse_duration("inf") == Duration::max());
  CHECK_THROWS_AS(parse_duration(""), ConfigError);
  CHECK_THROWS_AS(parse_duration("12parsecs"), ConfigError);
}

TEST_CASE("duration formatting round-trips") {
  for (const Duration d : {Duration(20'045'977), Duration(30ms), Duration(300s),
                           Duration(5us), Duration(0), Duration::max()}) {
    CHECK(parse_duration(format_duration(d)) == d);
  }
}

TEST_CASE("transmission time examples") {
  CHECK(transmission_time(1500, 10'000'000) == 1'200us);  // 1.2 ms
  CHECK(transmission_time(1500, 100'000'000) == 120us);   // 0.12 ms
  CHECK(transmission_time(218, 87'000) == Duration(20'045'977));
}

TEST_CASE("sim time arithmetic") {
  const SimTime t = SimTime::from_ns(1'000);
  CHECK((t + 500ns).ns() == 1'500);
  CHECK((t + 1ms) - t == 1ms);
  CHECK(SimTime{2s} > SimTime{1s});
}

TEST_CASE("rng exponential mean matches within 3 percent") {
  Rng rng(42);
  const Duration mean = 9'500ms;
  double sum = 0.0;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) sum += to_seconds(rng.exponential(mean));
  const double avg = sum / n;
  CHECK(avg == Catch::Approx(9.5).margin(9.5 * 0.03));
}

TEST_CASE("rng uniform01 stays in [0,1) and is seed-reproducible") {
  Rng a(7);
  Rng b(7);
  for (int i = 0; i < 1'000; ++i) {
    const double u = a.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform01());
  }
}

TEST_CASE("rng pick_index covers the whole range") {
  Rng rng(3);
  bool seen[4] = {false, false, false, false};
  for (int i = 0; i < 1'000; ++i) seen[rng.pick_index(4)] = true;
  CHECK((seen[0] && seen[1] && seen[2] && seen[3]));
}
