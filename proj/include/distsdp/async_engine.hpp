#pragma once

#include <deque>
#include <functional>
#include <vector>

#include "distsdp/partition.hpp"
#include "distsdp/problem.hpp"
#include "distsdp/schedule.hpp"
#include "distsdp/trace.hpp"

namespace distsdp {

// Block descent check for one moved column. s = (v_new - v_old)/theta and h
// is the gradient of f with respect to that column, 2 * bracket.
struct DescentCheck {
  double residual = 0.0;     // s'h + ||s||^2, expected <= 0
  double closed_form = 0.0;  // s'h + (1 + y)||s||^2, expected 0
  double scale = 1.0;        // 1 + ||h||^2
  double s_norm = 0.0;
};

DescentCheck descent_check(const Vector& v_old, const Vector& v_new, const Vector& bracket,
                           double theta, double y);

struct AsyncTickStats {
  double max_s_norm = 0.0;
  double max_descent = -1e300;      // max residual / scale this tick
  double max_closed_form = 0.0;     // max |closed_form| / scale this tick
  double max_bound_excess = -1e300; // max (gap - bound) over copies
  long updates = 0;
  std::vector<int> changed;  // home columns moved this tick
  Matrix old_cols;
  Matrix new_cols;
};

// Deterministic simulator of the asynchronous algorithm on a global tick.
// Agents active at tick t read their own columns at t, their children's
// messages and their parent's columns at the stamps the schedule picks, and
// all writes land at t + 1.
class AsyncEngine {
 public:
  AsyncEngine(const CoefficientMatrix& M, const AgentPartition& part, const Vector& theta,
              const Matrix& V0, DelaySchedule& schedule);

  AsyncTickStats tick();

  long time() const { return t_; }
  const Matrix& global() const { return V_; }
  const Matrix& local(int agent) const { return local_[agent]; }
  int local_index(int agent, int j) const { return pos_[agent][j]; }
  // Max over agents and copied indices of ||v_j^i - v_j||.
  double consensus_gap() const;

  // Message agent `child` composed for stamp `stamp` (p x |S_child|).
  // Throws StaleBeyondB when it is no longer (or never was) available.
  const Matrix& message(int child, long stamp) const;
  // Home value of column j as of `stamp`.
  const Vector& value_at(int j, long stamp) const;

 private:
  Vector own_row(int agent, const Matrix& L, int pj) const;
  void prune();

  const CoefficientMatrix& M_;
  const AgentPartition& part_;
  Vector theta_;
  DelaySchedule& schedule_;
  int B_;
  long t_ = 0;
  Matrix V_;
  std::vector<std::vector<int>> pos_;
  std::vector<Matrix> local_;
  std::vector<std::vector<std::vector<std::pair<int, double>>>> owned_;
  std::vector<std::deque<std::pair<long, Vector>>> history_;   // per index
  std::vector<std::deque<std::pair<long, Matrix>>> messages_;  // per agent, toward parent
  std::vector<std::deque<std::pair<long, double>>> steps_;     // per index, ||v(t+1)-v(t)||
};

struct AsyncOptions {
  long max_iters = 100000;
  double tol = 1e-7;
};

struct AsyncResult {
  Matrix V;
  Trace trace;
  bool converged = false;
  long iters = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double consensus_gap = 0.0;
  double max_descent_residual = -1e300;  // scaled by 1 + ||h||^2
  double max_closed_form_error = 0.0;    // scaled by 1 + ||h||^2
  double max_bound_excess = -1e300;      // gap minus its staleness bound
  long updates = 0;
};

// Runs ticks until the largest ||s_j|| over the last B ticks is below tol, or
// max_iters ticks. A zero matrix returns immediately.
AsyncResult run_async(const Problem& problem, const AgentPartition& part, const StepSizes& steps,
                      DelaySchedule& schedule, const Matrix& V0, const AsyncOptions& opts);

}  // namespace distsdp
