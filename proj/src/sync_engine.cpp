#include "distsdp/sync_engine.hpp"

#include <chrono>
#include <cmath>

#include "distsdp/error.hpp"
#include "distsdp/oracles.hpp"

namespace distsdp {

SyncEngine::SyncEngine(const CoefficientMatrix& M, const AgentPartition& part, const Vector& theta,
                       const Matrix& V0)
    : M_(M), part_(part), theta_(theta) {
  const int n = M.n();
  if (part.n != n || V0.cols() != n || theta.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "engine inputs disagree on n");
  const int m = part.m;
  pos_.assign(m, std::vector<int>(n, -1));
  local_.resize(m);
  owned_.resize(m);
  for (int a = 0; a < m; ++a) {
    const auto& J = part.J[a];
    local_[a].resize(V0.rows(), static_cast<Eigen::Index>(J.size()));
    owned_[a].resize(J.size());
    for (std::size_t k = 0; k < J.size(); ++k) {
      pos_[a][J[k]] = static_cast<int>(k);
      local_[a].col(static_cast<Eigen::Index>(k)) = V0.col(J[k]);
    }
  }
  const auto& entries = M.entries();
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const int a = part.owner[e];
    const int pj = pos_[a][entries[e].j];
    const int pl = pos_[a][entries[e].l];
    owned_[a][pj].push_back({pl, entries[e].w});
    owned_[a][pl].push_back({pj, entries[e].w});
  }
  finished_.assign(m, 0);
  g_ = Matrix::Zero(V0.rows(), n);
  y_ = Vector::Ones(n);
}

void SyncEngine::begin_sweep() { std::fill(finished_.begin(), finished_.end(), 0); }

Vector SyncEngine::own_row(int agent, int j) const {
  Vector s = Vector::Zero(local_[agent].rows());
  const int pj = pos_[agent][j];
  if (pj < 0) return s;
  for (const auto& [pl, w] : owned_[agent][pj]) s += w * local_[agent].col(pl);
  return s;
}

Vector SyncEngine::child_message(int child, int parent, int j) const {
  if (child < 0 || child >= part_.m || part_.parent[child] != parent)
    throw Error(ErrorCode::NotAChild,
                "agent " + std::to_string(child + 1) + " is not a child of agent " + std::to_string(parent + 1));
  if (pos_[child][j] < 0 || part_.home[j] == child) return Vector::Zero(local_[child].rows());
  Vector s = own_row(child, j);
  for (int c : part_.children[child]) s += child_message(c, child, j);
  return s;
}

Vector SyncEngine::parent_message(int agent, int j) const {
  if (part_.parent[agent] < 0)
    throw Error(ErrorCode::NoParent, "agent " + std::to_string(agent + 1) + " is the root");
  return child_message(agent, part_.parent[agent], j);
}

void SyncEngine::push_down(int agent, int j, const Vector& value) {
  for (int c : part_.children[agent]) {
    const int pc = pos_[c][j];
    if (pc < 0) continue;
    local_[c].col(pc) = value;
    push_down(c, j, value);
  }
}

Vector SyncEngine::update_uncoupled(int agent, int j) {
  if (part_.home[j] != agent)
    throw Error(ErrorCode::InvalidProblem,
                "index " + std::to_string(j + 1) + " is not updated by agent " + std::to_string(agent + 1));
  const int pj = pos_[agent][j];
  if (M_.row(j).empty()) return local_[agent].col(pj);
  Vector bracket = own_row(agent, j);
  for (int c : part_.children[agent]) {
    if (pos_[c][j] < 0) continue;
    if (!finished_[c])
      throw Error(ErrorCode::MissingMessage,
                  "agent " + std::to_string(c + 1) + " has not reported index " + std::to_string(j + 1));
    bracket += child_message(c, agent, j);
  }
  const Vector step = local_[agent].col(pj) - theta_(j) * bracket;
  g_.col(j) = bracket;
  y_(j) = step.norm();
  const Vector next = normalize(step);
  local_[agent].col(pj) = next;
  push_down(agent, j, next);
  return next;
}

void SyncEngine::finish_agent(int agent) { finished_[agent] = 1; }

void SyncEngine::sweep() {
  begin_sweep();
  g_.setZero();
  y_.setOnes();
  for (int a = part_.m - 1; a >= 0; --a) {
    for (int j : part_.R[a]) update_uncoupled(a, j);
    finish_agent(a);
  }
}

Matrix SyncEngine::global() const {
  Matrix V(local_.empty() ? 0 : local_[0].rows(), M_.n());
  for (int j = 0; j < M_.n(); ++j) {
    const int a = part_.home[j];
    V.col(j) = local_[a].col(pos_[a][j]);
  }
  return V;
}

double SyncEngine::consensus_gap() const {
  double gap = 0.0;
  for (int a = 0; a < part_.m; ++a) {
    for (int j : part_.S[a]) {
      const int h = part_.home[j];
      gap = std::max(gap, (local_[a].col(pos_[a][j]) - local_[h].col(pos_[h][j])).norm());
    }
  }
  return gap;
}

double decrease_identity_residual(double f_before, double f_after, const Matrix& before,
                                  const Matrix& after, const Vector& theta, const Vector& y) {
  return std::abs((f_before - f_after) - predicted_decrease(before, after, theta, y));
}

SyncResult run_sync(const Problem& problem, const AgentPartition& part, const StepSizes& steps,
                    const Matrix& V0, const SyncOptions& opts, const SyncObserver& observer) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const int n = problem.M.n();
  if (V0.cols() != n || steps.theta.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "initial factor or step sizes do not match n");

  const std::vector<int> perm = reorder_indices(part);
  const Problem pp = permute_problem(problem, perm);
  const AgentPartition ppart = permute_partition(part, pp.M, perm);
  Vector theta(n);
  Matrix V(V0.rows(), n);
  for (int k = 0; k < n; ++k) {
    theta(k) = steps.theta(perm[k]);
    V.col(k) = V0.col(perm[k]);
  }

  SyncEngine engine(pp.M, ppart, theta, V);
  GramStepTracker tracker(V);
  std::vector<int> all(n);
  for (int k = 0; k < n; ++k) all[k] = k;

  SyncResult res;
  double f = objective(pp.M, V);
  res.trace.rows.push_back({0, f, riemannian_grad_norm(pp.M, V), engine.consensus_gap(), 0.0,
                            std::nullopt, 0.0});
  const long max_iters = opts.max_iters >= 0 ? opts.max_iters : 10L * n;
  double grad = res.trace.rows.back().grad_norm;
  for (long it = 1; it <= max_iters; ++it) {
    engine.sweep();
    const Matrix next = engine.global();
    const double f_next = objective(pp.M, next);
    grad = riemannian_grad_norm(pp.M, next);
    const double gap = engine.consensus_gap();
    const double dx = tracker.step(all, V, next);
    const double resid =
        decrease_identity_residual(f, f_next, V, next, theta, engine.last_y()) / (1.0 + std::abs(f));
    res.max_decrease_residual = std::max(res.max_decrease_residual, resid);
    res.max_consensus_gap = std::max(res.max_consensus_gap, gap);
    if (observer)
      observer(SyncSweepInfo{it, perm, V, next, engine.last_g(), engine.last_y(), theta, f, f_next, gap});
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    res.trace.rows.push_back({it, f_next, grad, gap, dx, std::nullopt, ms});
    V = next;
    f = f_next;
    res.iters = it;
    if (grad < opts.grad_tol) {
      res.converged = true;
      break;
    }
  }
  res.f = f;
  res.grad_norm = grad;
  res.V.resize(V.rows(), n);
  for (int k = 0; k < n; ++k) res.V.col(perm[k]) = V.col(k);
  return res;
}

}  // namespace distsdp
