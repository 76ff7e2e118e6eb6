#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "distsdp/partition.hpp"

namespace distsdp {

enum class ScheduleMode { UniformRandom, RoundRobin, AdversarialMaxDelay };

// Accepts uniform/roundrobin/adversarial and the long forms
// uniform-random/round-robin/adversarial-max-delay.
ScheduleMode parse_schedule_mode(std::string_view name);
std::string_view schedule_mode_name(ScheduleMode mode);

struct AgentTick {
  bool active = false;
  std::vector<long> copy_stamp;     // one per index of S_i, in S_i order
  std::vector<long> message_stamp;  // one per child, in children order
};

// Activation times and read stamps for every agent. Ticks are produced in
// order and are a pure function of (partition shape, B, seed, mode).
//
// - uniform-random: an agent wakes with probability 1/2 and is forced awake
//   when it has slept B-1 ticks; stamps are drawn uniformly from the
//   admissible range.
// - round-robin: agent i wakes when t = i (mod B); reads are as fresh as
//   possible.
// - adversarial-max-delay: every agent wakes every tick and reads the oldest
//   admissible stamp.
//
// A copy read at tick t is held until the agent's next activation, so its
// stamp is also kept no older than next_activation - B. Message stamps are
// always times at which the child actually composed a message (0 or one past
// an activation) and never go backwards on a link.
class DelaySchedule {
 public:
  DelaySchedule(const AgentPartition& part, int B, std::uint64_t seed, ScheduleMode mode);

  // Must be called with t = 0, 1, 2, ... (repeating the last t is allowed).
  const std::vector<AgentTick>& at(long t);

  bool active(int agent, long t);
  int B() const { return B_; }
  int agents() const { return static_cast<int>(children_.size()); }
  const std::vector<int>& children(int agent) const { return children_[agent]; }
  int copy_slots(int agent) const { return s_size_[agent]; }

 private:
  void extend_activations(long upto);
  long next_activation(int agent, long t);
  double draw(std::uint64_t kind, int agent, int slot, long t) const;

  int B_;
  std::uint64_t seed_;
  ScheduleMode mode_;
  std::vector<std::vector<int>> children_;
  std::vector<int> s_size_;
  std::vector<std::vector<char>> act_;  // act_[agent][t]
  std::vector<long> last_act_;
  long generated_ = 0;
  long current_ = -1;
  std::vector<AgentTick> plan_;
  std::vector<std::vector<long>> last_copy_;
  std::vector<std::vector<long>> last_msg_;
};

struct ScheduleScan {
  bool ok = true;
  long windows_checked = 0;
  long reads_checked = 0;
  std::string violation;  // first failure, empty when ok
};

// Exhaustive check over ticks 0..horizon-1 of a freshly built schedule: every
// window of B ticks holds an activation of every agent, every read stamp lies
// in [max(0, t-B+1), t], message stamps are real composition times and never
// decrease, and held copies are never older than B ticks.
ScheduleScan scan_schedule(const AgentPartition& part, int B, std::uint64_t seed,
                           ScheduleMode mode, long horizon);

}  // namespace distsdp
