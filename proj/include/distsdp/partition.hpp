#pragma once

#include <string>
#include <vector>

#include "distsdp/problem.hpp"

namespace distsdp {

// Agent decomposition: index sets, entry ownership, the parent/child tree and
// the coupling (S) and uncoupling (R) sets. Everything is 0-based.
struct AgentPartition {
  int n = 0;
  int m = 0;
  std::vector<std::vector<int>> J;  // sorted
  std::vector<int> owner;           // per entry of M
  std::vector<int> parent;          // -1 for the root
  std::vector<std::vector<int>> children;
  std::vector<std::vector<int>> S;  // J_i ∩ J_par(i), empty for the root
  std::vector<std::vector<int>> R;  // J_i \ S_i: the columns agent i updates
  std::vector<int> home;            // per index, the agent with it in R
  std::vector<std::string> warnings;

  int shared_count() const;
  bool contains(int agent, int j) const;
};

// Parent of agent i is a lower-numbered agent whose index set contains every
// index agent i shares with agents 0..i-1. When several qualify, the one with
// the most overlap-graph neighbours wins, then the lowest number.
AgentPartition build_partition(const std::vector<std::vector<int>>& J,
                               const CoefficientMatrix& M, const std::vector<int>& owner);

AgentPartition build_partition(const Problem& problem);

// perm[new] = old. Under the new labels every agent's children's R sets come
// before its own R, which comes before its S.
std::vector<int> reorder_indices(const AgentPartition& part);

// True when the ordering predicate above holds for every agent.
bool ordering_holds(const AgentPartition& part);

// Relabels columns: new index k is old index perm[k].
Problem permute_problem(const Problem& problem, const std::vector<int>& perm);
AgentPartition permute_partition(const AgentPartition& part, const CoefficientMatrix& permuted_M,
                                 const std::vector<int>& perm);

struct StepSizes {
  Vector theta;  // per index
};

StepSizes sync_step_sizes(const AgentPartition& part, const CoefficientMatrix& M, double sigma);
StepSizes async_step_sizes(const AgentPartition& part, const CoefficientMatrix& M, int B,
                           double sigma);

// Agent-local matrix M^i: owned entries only.
double agent_max_row_norm(const AgentPartition& part, const CoefficientMatrix& M, int agent);

// Human-readable tree, S/R sets, sn and warnings (1-based).
std::string describe_partition(const AgentPartition& part);

}  // namespace distsdp
