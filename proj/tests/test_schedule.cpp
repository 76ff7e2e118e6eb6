#include "distsdp/error.hpp"
#include "distsdp/schedule.hpp"
#include "doctest.h"
#include "instances.hpp"

using namespace distsdp;

namespace {

AgentPartition path3() {
  CoefficientMatrix M(4);
  M.add(0, 1, 1.0);
  M.add(1, 2, 1.0);
  M.add(2, 3, 1.0);
  return build_partition({{0, 1}, {1, 2}, {2, 3}}, M, {0, 1, 2});
}

constexpr ScheduleMode kModes[] = {ScheduleMode::UniformRandom, ScheduleMode::RoundRobin,
                                   ScheduleMode::AdversarialMaxDelay};

}  // namespace

TEST_CASE("mode names") {
  CHECK(parse_schedule_mode("uniform") == ScheduleMode::UniformRandom);
  CHECK(parse_schedule_mode("uniform-random") == ScheduleMode::UniformRandom);
  CHECK(parse_schedule_mode("round-robin") == ScheduleMode::RoundRobin);
  CHECK(parse_schedule_mode("adversarial-max-delay") == ScheduleMode::AdversarialMaxDelay);
  for (ScheduleMode m : kModes) CHECK(parse_schedule_mode(schedule_mode_name(m)) == m);
  CHECK_THROWS_AS(parse_schedule_mode("lazy"), Error);
}

TEST_CASE("B = 1 forces every agent awake with current reads") {
  const AgentPartition part = build_partition(fixtures::example1());
  for (ScheduleMode mode : kModes) {
    DelaySchedule s(part, 1, 3, mode);
    for (long t = 0; t < 50; ++t) {
      const auto& plan = s.at(t);
      for (int a = 0; a < part.m; ++a) {
        CHECK(plan[a].active);
        for (long tau : plan[a].copy_stamp) CHECK(tau == t);
        for (long tau : plan[a].message_stamp) CHECK(tau == t);
      }
    }
  }
}

TEST_CASE("round robin over three agents with B = 3") {
  const AgentPartition part = path3();
  DelaySchedule s(part, 3, 0, ScheduleMode::RoundRobin);
  for (long t = 0; t < 30; ++t) {
    const auto& plan = s.at(t);
    for (int a = 0; a < 3; ++a) CHECK(plan[a].active == (t % 3 == a));
  }
  const ScheduleScan scan = scan_schedule(part, 3, 0, ScheduleMode::RoundRobin, 300);
  CHECK(scan.ok);
  CHECK(scan.windows_checked == 298);
}

TEST_CASE("uniform schedule with B = 5 and seed 42 passes the scan") {
  const AgentPartition part = build_partition(fixtures::example1());
  const ScheduleScan scan = scan_schedule(part, 5, 42, ScheduleMode::UniformRandom, 2000);
  CHECK_MESSAGE(scan.ok, scan.violation);
  CHECK(scan.reads_checked > 0);
}

TEST_CASE("adversarial reads the oldest admissible stamps") {
  const AgentPartition part = build_partition(fixtures::example1());
  DelaySchedule s(part, 4, 0, ScheduleMode::AdversarialMaxDelay);
  for (long t = 0; t < 40; ++t) {
    const auto& plan = s.at(t);
    for (int a = 0; a < part.m; ++a) {
      CHECK(plan[a].active);
      for (long tau : plan[a].copy_stamp) CHECK(tau == std::max(0L, t - 3));
    }
  }
}

TEST_CASE("schedules are reproducible and seed dependent") {
  const AgentPartition part = build_partition(fixtures::example1());
  DelaySchedule a(part, 5, 9, ScheduleMode::UniformRandom);
  DelaySchedule b(part, 5, 9, ScheduleMode::UniformRandom);
  DelaySchedule c(part, 5, 10, ScheduleMode::UniformRandom);
  bool differs = false;
  for (long t = 0; t < 200; ++t) {
    const auto pa = a.at(t);
    const auto& pb = b.at(t);
    const auto& pc = c.at(t);
    for (int k = 0; k < part.m; ++k) {
      CHECK(pa[k].active == pb[k].active);
      if (pa[k].active) {
        CHECK(pa[k].copy_stamp == pb[k].copy_stamp);
        CHECK(pa[k].message_stamp == pb[k].message_stamp);
      }
      differs = differs || pa[k].active != pc[k].active;
    }
  }
  CHECK(differs);
}

TEST_CASE("misuse") {
  const AgentPartition part = path3();
  CHECK_THROWS_AS(DelaySchedule(part, 0, 1, ScheduleMode::UniformRandom), Error);
  DelaySchedule s(part, 2, 1, ScheduleMode::UniformRandom);
  s.at(0);
  s.at(0);
  CHECK_THROWS_AS(s.at(5), Error);
}

TEST_CASE("scan holds for random trees across modes and bounds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const AgentPartition part = build_partition(fixtures::random_tree(seed));
    for (ScheduleMode mode : kModes)
      for (int B : {1, 2, 3, 5, 8}) {
        const ScheduleScan scan = scan_schedule(part, B, seed, mode, 400);
        CHECK_MESSAGE(scan.ok, scan.violation);
      }
  }
}
