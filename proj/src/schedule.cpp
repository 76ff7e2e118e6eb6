#include "distsdp/schedule.hpp"

#include <algorithm>
#include <sstream>

#include "distsdp/error.hpp"
#include "distsdp/rng.hpp"

namespace distsdp {

ScheduleMode parse_schedule_mode(std::string_view name) {
  if (name == "uniform" || name == "uniform-random") return ScheduleMode::UniformRandom;
  if (name == "roundrobin" || name == "round-robin") return ScheduleMode::RoundRobin;
  if (name == "adversarial" || name == "adversarial-max-delay")
    return ScheduleMode::AdversarialMaxDelay;
  throw Error(ErrorCode::InvalidProblem, "unknown schedule '" + std::string(name) + "'");
}

std::string_view schedule_mode_name(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::UniformRandom: return "uniform";
    case ScheduleMode::RoundRobin: return "roundrobin";
    case ScheduleMode::AdversarialMaxDelay: return "adversarial";
  }
  return "uniform";
}

DelaySchedule::DelaySchedule(const AgentPartition& part, int B, std::uint64_t seed,
                             ScheduleMode mode)
    : B_(B), seed_(seed), mode_(mode), children_(part.children) {
  if (B < 1) throw Error(ErrorCode::InvalidProblem, "B must be at least 1");
  const int m = part.m;
  for (int a = 0; a < m; ++a) s_size_.push_back(static_cast<int>(part.S[a].size()));
  act_.assign(m, {});
  last_act_.assign(m, -1);
  plan_.resize(m);
  last_copy_.resize(m);
  last_msg_.resize(m);
  for (int a = 0; a < m; ++a) {
    plan_[a].copy_stamp.assign(s_size_[a], 0);
    plan_[a].message_stamp.assign(children_[a].size(), 0);
    last_copy_[a].assign(s_size_[a], 0);
    last_msg_[a].assign(children_[a].size(), 0);
  }
}

double DelaySchedule::draw(std::uint64_t kind, int agent, int slot, long t) const {
  return unit_from_hash(derive_seed(seed_, {kind, static_cast<std::uint64_t>(agent),
                                            static_cast<std::uint64_t>(slot),
                                            static_cast<std::uint64_t>(t)}));
}

void DelaySchedule::extend_activations(long upto) {
  const int m = agents();
  for (; generated_ <= upto; ++generated_) {
    const long t = generated_;
    for (int a = 0; a < m; ++a) {
      bool on = true;
      switch (mode_) {
        case ScheduleMode::UniformRandom:
          on = (t - last_act_[a] >= B_) || draw(1, a, 0, t) < 0.5;
          break;
        case ScheduleMode::RoundRobin:
          on = (t % B_) == (a % B_);
          break;
        case ScheduleMode::AdversarialMaxDelay:
          on = true;
          break;
      }
      act_[a].push_back(on ? 1 : 0);
      if (on) last_act_[a] = t;
    }
  }
}

bool DelaySchedule::active(int agent, long t) {
  if (t < 0) return false;
  extend_activations(t);
  return act_[agent][t] != 0;
}

long DelaySchedule::next_activation(int agent, long t) {
  extend_activations(t + B_);
  for (long u = t + 1; u <= t + B_; ++u)
    if (act_[agent][u]) return u;
  throw Error(ErrorCode::StaleBeyondB, "agent " + std::to_string(agent + 1) + " idle for more than B ticks");
}

const std::vector<AgentTick>& DelaySchedule::at(long t) {
  if (t == current_) return plan_;
  if (t != current_ + 1)
    throw Error(ErrorCode::InvalidProblem, "schedule ticks must be requested in order");
  current_ = t;
  extend_activations(t + B_);
  const long floor_t = std::max(0L, t - B_ + 1);
  for (int a = 0; a < agents(); ++a) {
    AgentTick& tick = plan_[a];
    tick.active = act_[a][t] != 0;
    if (!tick.active) continue;

    const long hold_floor = next_activation(a, t) - B_;
    for (int k = 0; k < s_size_[a]; ++k) {
      const long lo = std::max({floor_t, hold_floor, last_copy_[a][k]});
      long tau = t;
      if (mode_ == ScheduleMode::AdversarialMaxDelay) {
        tau = lo;
      } else if (mode_ == ScheduleMode::UniformRandom) {
        tau = lo + static_cast<long>(draw(2, a, k, t) * static_cast<double>(t - lo + 1));
        tau = std::min(tau, t);
      }
      tick.copy_stamp[k] = tau;
      last_copy_[a][k] = tau;
    }

    for (std::size_t c = 0; c < children_[a].size(); ++c) {
      const int child = children_[a][c];
      const long lo = std::max(floor_t, last_msg_[a][c]);
      std::vector<long> stamps;
      for (long u = lo; u <= t; ++u)
        if (u == 0 || act_[child][u - 1]) stamps.push_back(u);
      if (stamps.empty())
        throw Error(ErrorCode::StaleBeyondB, "no fresh message from agent " + std::to_string(child + 1));
      long tau = stamps.back();
      if (mode_ == ScheduleMode::AdversarialMaxDelay) {
        tau = stamps.front();
      } else if (mode_ == ScheduleMode::UniformRandom) {
        const auto idx = static_cast<std::size_t>(draw(3, a, static_cast<int>(c), t) *
                                                  static_cast<double>(stamps.size()));
        tau = stamps[std::min(idx, stamps.size() - 1)];
      }
      tick.message_stamp[c] = tau;
      last_msg_[a][c] = tau;
    }
  }
  return plan_;
}

ScheduleScan scan_schedule(const AgentPartition& part, int B, std::uint64_t seed,
                           ScheduleMode mode, long horizon) {
  DelaySchedule sched(part, B, seed, mode);
  ScheduleScan out;
  const int m = part.m;
  auto fail = [&](const std::string& msg) {
    if (out.ok) {
      out.ok = false;
      out.violation = msg;
    }
  };

  std::vector<std::vector<char>> act(m, std::vector<char>(horizon, 0));
  std::vector<std::vector<long>> held(m), last_copy(m), last_msg(m);
  for (int a = 0; a < m; ++a) {
    held[a].assign(part.S[a].size(), 0);
    last_copy[a].assign(part.S[a].size(), 0);
    last_msg[a].assign(part.children[a].size(), 0);
  }

  for (long t = 0; t < horizon; ++t) {
    const auto& plan = sched.at(t);
    const long lo = std::max(0L, t - B + 1);
    for (int a = 0; a < m; ++a) {
      // Copy held in state t must be no older than t - B.
      for (std::size_t k = 0; k < held[a].size(); ++k) {
        ++out.reads_checked;
        if (held[a][k] < t - B) {
          std::ostringstream os;
          os << "agent " << a + 1 << " holds a copy stamped " << held[a][k] << " at t=" << t;
          fail(os.str());
        }
      }
      act[a][t] = plan[a].active ? 1 : 0;
      if (!plan[a].active) continue;
      for (std::size_t k = 0; k < held[a].size(); ++k) {
        const long tau = plan[a].copy_stamp[k];
        if (tau < lo || tau > t || tau < last_copy[a][k]) {
          std::ostringstream os;
          os << "agent " << a + 1 << " copy stamp " << tau << " out of range at t=" << t;
          fail(os.str());
        }
        last_copy[a][k] = tau;
        held[a][k] = tau;
      }
      for (std::size_t c = 0; c < part.children[a].size(); ++c) {
        ++out.reads_checked;
        const long tau = plan[a].message_stamp[c];
        const int child = part.children[a][c];
        const bool composed = tau == 0 || (tau >= 1 && tau - 1 <= t && act[child][tau - 1]);
        if (tau < lo || tau > t || tau < last_msg[a][c] || !composed) {
          std::ostringstream os;
          os << "agent " << a + 1 << " message stamp " << tau << " from agent " << child + 1
             << " invalid at t=" << t;
          fail(os.str());
        }
        last_msg[a][c] = tau;
      }
    }
  }
  for (long t = 0; t + B <= horizon; ++t) {
    ++out.windows_checked;
    for (int a = 0; a < m; ++a) {
      bool any = false;
      for (long u = t; u < t + B; ++u) any = any || act[a][u];
      if (!any) {
        std::ostringstream os;
        os << "agent " << a + 1 << " idle over window starting at t=" << t;
        fail(os.str());
      }
    }
  }
  return out;
}

}  // namespace distsdp
