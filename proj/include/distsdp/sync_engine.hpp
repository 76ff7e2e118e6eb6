#pragma once

#include <functional>
#include <vector>

#include "distsdp/partition.hpp"
#include "distsdp/problem.hpp"
#include "distsdp/trace.hpp"

namespace distsdp {

// Message-passing state of the synchronous algorithm. Each agent keeps local
// copies of the columns in its index set; sweeps run agents from last to
// first and, inside an agent, home columns in increasing label order.
class SyncEngine {
 public:
  SyncEngine(const CoefficientMatrix& M, const AgentPartition& part, const Vector& theta,
             const Matrix& V0);

  // Clears the per-sweep "messages sent" marks.
  void begin_sweep();

  // Subtree contribution of `child` to row j of its parent. Zero when j is
  // not shared between them. Throws NotAChild.
  Vector child_message(int child, int parent, int j) const;

  // What `agent` forwards to its parent for j in its S set. Throws NoParent.
  Vector parent_message(int agent, int j) const;

  // Moves home column j of `agent` and pushes the value to every descendant
  // holding a copy. Throws MissingMessage if a child sharing j has not
  // finished this sweep.
  Vector update_uncoupled(int agent, int j);

  // Marks the agent's parent messages as sent for this sweep.
  void finish_agent(int agent);

  void sweep();

  Matrix global() const;
  const Matrix& local(int agent) const { return local_[agent]; }
  int local_index(int agent, int j) const { return pos_[agent][j]; }
  // Max over copies of ||v_j^i - v_j|| with v_j the home value.
  double consensus_gap() const;

  // Row products and normalization denominators of the last sweep, by label.
  const Matrix& last_g() const { return g_; }
  const Vector& last_y() const { return y_; }

 private:
  Vector own_row(int agent, int j) const;
  void push_down(int agent, int j, const Vector& value);

  const CoefficientMatrix& M_;
  const AgentPartition& part_;
  Vector theta_;
  std::vector<std::vector<int>> pos_;
  std::vector<Matrix> local_;
  std::vector<std::vector<std::vector<std::pair<int, double>>>> owned_;  // [agent][local col]
  std::vector<char> finished_;
  Matrix g_;
  Vector y_;
};

struct SyncOptions {
  long max_iters = -1;  // -1 selects 10 n
  double grad_tol = 1e-6;
};

// Everything one sweep produced, in the reordered labels used internally.
struct SyncSweepInfo {
  long iter;
  const std::vector<int>& perm;  // perm[new] = old
  const Matrix& before;
  const Matrix& after;
  const Matrix& g;
  const Vector& y;
  const Vector& theta;
  double f_before;
  double f_after;
  double consensus_gap;
};

struct SyncResult {
  Matrix V;
  Trace trace;
  bool converged = false;
  long iters = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double max_decrease_residual = 0.0;  // max |decrease - predicted| / (1 + |f|)
  double max_consensus_gap = 0.0;
};

using SyncObserver = std::function<void(const SyncSweepInfo&)>;

// Reorders labels, sweeps until the Riemannian gradient norm drops below
// grad_tol or max_iters, and returns V in the caller's labels.
SyncResult run_sync(const Problem& problem, const AgentPartition& part, const StepSizes& steps,
                    const Matrix& V0, const SyncOptions& opts, const SyncObserver& observer = {});

// |f(t) - f(t+1) - sum_i (1 + y_i)/theta_i ||v_i(t) - v_i(t+1)||^2|
double decrease_identity_residual(double f_before, double f_after, const Matrix& before,
                                  const Matrix& after, const Vector& theta, const Vector& y);

}  // namespace distsdp
