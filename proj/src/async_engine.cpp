#include "distsdp/async_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "distsdp/error.hpp"

namespace distsdp {

DescentCheck descent_check(const Vector& v_old, const Vector& v_new, const Vector& bracket,
                           double theta, double y) {
  const Vector s = (v_new - v_old) / theta;
  const Vector h = 2.0 * bracket;
  const double sh = s.dot(h);
  const double ss = s.squaredNorm();
  return {sh + ss, sh + (1.0 + y) * ss, 1.0 + h.squaredNorm(), std::sqrt(ss)};
}

AsyncEngine::AsyncEngine(const CoefficientMatrix& M, const AgentPartition& part,
                         const Vector& theta, const Matrix& V0, DelaySchedule& schedule)
    : M_(M), part_(part), theta_(theta), schedule_(schedule), B_(schedule.B()), V_(V0) {
  const int n = M.n();
  const int m = part.m;
  if (part.n != n || V0.cols() != n || theta.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "engine inputs disagree on n");
  if (schedule.agents() != m)
    throw Error(ErrorCode::DimensionMismatch, "schedule built for a different partition");
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
  history_.resize(n);
  steps_.resize(n);
  for (int j = 0; j < n; ++j) history_[j].push_back({0, V0.col(j)});

  // Stamp-0 messages, deepest agents first so parents can fold them in.
  messages_.resize(m);
  for (int a = m - 1; a >= 0; --a) {
    if (part.parent[a] < 0) continue;
    Matrix msg(V0.rows(), static_cast<Eigen::Index>(part.S[a].size()));
    for (std::size_t k = 0; k < part.S[a].size(); ++k) {
      const int j = part.S[a][k];
      Vector s = own_row(a, local_[a], pos_[a][j]);
      for (int c : part.children[a]) {
        const auto& Sc = part.S[c];
        const auto it = std::lower_bound(Sc.begin(), Sc.end(), j);
        if (it != Sc.end() && *it == j) s += messages_[c].front().second.col(it - Sc.begin());
      }
      msg.col(static_cast<Eigen::Index>(k)) = s;
    }
    messages_[a].push_back({0, msg});
  }
}

Vector AsyncEngine::own_row(int agent, const Matrix& L, int pj) const {
  Vector s = Vector::Zero(L.rows());
  for (const auto& [pl, w] : owned_[agent][pj]) s += w * L.col(pl);
  return s;
}

const Matrix& AsyncEngine::message(int child, long stamp) const {
  for (const auto& [st, msg] : messages_[child])
    if (st == stamp) return msg;
  throw Error(ErrorCode::StaleBeyondB, "message from agent " + std::to_string(child + 1) +
                                           " stamped " + std::to_string(stamp) + " is unavailable");
}

const Vector& AsyncEngine::value_at(int j, long stamp) const {
  const auto& h = history_[j];
  for (auto it = h.rbegin(); it != h.rend(); ++it)
    if (it->first <= stamp) return it->second;
  throw Error(ErrorCode::StaleBeyondB, "value of column " + std::to_string(j + 1) + " at stamp " +
                                           std::to_string(stamp) + " is unavailable");
}

double AsyncEngine::consensus_gap() const {
  double gap = 0.0;
  for (int a = 0; a < part_.m; ++a)
    for (int j : part_.S[a]) gap = std::max(gap, (local_[a].col(pos_[a][j]) - V_.col(j)).norm());
  return gap;
}

void AsyncEngine::prune() {
  const long readable = t_ - B_ + 1;
  for (auto& h : history_)
    while (h.size() >= 2 && h[1].first <= readable) h.pop_front();
  for (auto& q : messages_)
    while (q.size() >= 2 && q.front().first < readable) q.pop_front();
  for (auto& s : steps_)
    while (!s.empty() && s.front().first < t_ - B_) s.pop_front();
}

AsyncTickStats AsyncEngine::tick() {
  struct Staged {
    int agent;
    Matrix L;
    Matrix msg;
    std::vector<int> moved;
  };
  const long t = t_;
  const long lower = std::max(0L, t - B_ + 1);
  const auto& plan = schedule_.at(t);
  AsyncTickStats stats;
  std::vector<Staged> staged;

  for (int a = 0; a < part_.m; ++a) {
    if (!plan[a].active) continue;
    const Matrix& cur = local_[a];
    Matrix agg = Matrix::Zero(cur.rows(), cur.cols());
    for (std::size_t c = 0; c < part_.children[a].size(); ++c) {
      const int child = part_.children[a][c];
      const long tau = plan[a].message_stamp[c];
      if (tau < lower || tau > t)
        throw Error(ErrorCode::StaleBeyondB, "message stamp " + std::to_string(tau) +
                                                 " outside the window at t=" + std::to_string(t));
      const Matrix& msg = message(child, tau);
      for (std::size_t k = 0; k < part_.S[child].size(); ++k)
        agg.col(pos_[a][part_.S[child][k]]) += msg.col(static_cast<Eigen::Index>(k));
    }

    Staged st{a, cur, Matrix(), {}};
    for (int j : part_.R[a]) {
      if (M_.row(j).empty()) continue;
      const int pj = pos_[a][j];
      const Vector bracket = own_row(a, cur, pj) + agg.col(pj);
      const Vector step = cur.col(pj) - theta_(j) * bracket;
      const double y = step.norm();
      const Vector next = normalize(step);
      const DescentCheck dc = descent_check(cur.col(pj), next, bracket, theta_(j), y);
      stats.max_s_norm = std::max(stats.max_s_norm, dc.s_norm);
      stats.max_descent = std::max(stats.max_descent, dc.residual / dc.scale);
      stats.max_closed_form = std::max(stats.max_closed_form, std::abs(dc.closed_form) / dc.scale);
      ++stats.updates;
      st.L.col(pj) = next;
      st.moved.push_back(j);
    }
    for (std::size_t k = 0; k < part_.S[a].size(); ++k) {
      const long tau = plan[a].copy_stamp[k];
      if (tau < lower || tau > t)
        throw Error(ErrorCode::StaleBeyondB, "copy stamp " + std::to_string(tau) +
                                                 " outside the window at t=" + std::to_string(t));
      const int j = part_.S[a][k];
      st.L.col(pos_[a][j]) = value_at(j, tau);
    }
    if (part_.parent[a] >= 0) {
      st.msg.resize(cur.rows(), static_cast<Eigen::Index>(part_.S[a].size()));
      for (std::size_t k = 0; k < part_.S[a].size(); ++k) {
        const int pj = pos_[a][part_.S[a][k]];
        st.msg.col(static_cast<Eigen::Index>(k)) = own_row(a, st.L, pj) + agg.col(pj);
      }
    }
    staged.push_back(std::move(st));
  }

  std::size_t total_moved = 0;
  for (const Staged& st : staged) total_moved += st.moved.size();
  stats.old_cols.resize(V_.rows(), static_cast<Eigen::Index>(total_moved));
  stats.new_cols.resize(V_.rows(), static_cast<Eigen::Index>(total_moved));
  Eigen::Index col = 0;
  for (Staged& st : staged) {
    for (int j : st.moved) {
      const Vector next = st.L.col(pos_[st.agent][j]);
      stats.changed.push_back(j);
      stats.old_cols.col(col) = V_.col(j);
      stats.new_cols.col(col) = next;
      ++col;
      steps_[j].push_back({t, (next - V_.col(j)).norm()});
      history_[j].push_back({t + 1, next});
      V_.col(j) = next;
    }
    local_[st.agent] = std::move(st.L);
    if (part_.parent[st.agent] >= 0) messages_[st.agent].push_back({t + 1, std::move(st.msg)});
  }
  t_ = t + 1;

  // Staleness bound on every copy: ||v_j^i(t) - v_j(t)|| <= sum of the last B
  // step lengths of column j.
  for (int a = 0; a < part_.m; ++a) {
    for (int j : part_.S[a]) {
      double bound = 0.0;
      for (const auto& [tau, len] : steps_[j])
        if (tau >= t_ - B_ && tau <= t_ - 1) bound += len;
      const double gap = (local_[a].col(pos_[a][j]) - V_.col(j)).norm();
      stats.max_bound_excess = std::max(stats.max_bound_excess, gap - bound);
    }
  }
  prune();
  return stats;
}

AsyncResult run_async(const Problem& problem, const AgentPartition& part, const StepSizes& steps,
                      DelaySchedule& schedule, const Matrix& V0, const AsyncOptions& opts) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const CoefficientMatrix& M = problem.M;
  const int n = M.n();
  if (V0.cols() != n || steps.theta.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "initial factor or step sizes do not match n");

  AsyncResult res;
  res.V = V0;
  res.f = objective(M, V0);
  res.grad_norm = riemannian_grad_norm(M, V0);
  res.trace.rows.push_back({0, res.f, res.grad_norm, 0.0, 0.0, 0.0, 0.0});
  if (M.is_zero()) {
    res.converged = true;
    res.max_descent_residual = 0.0;
    res.max_bound_excess = 0.0;
    return res;
  }

  AsyncEngine engine(M, part, steps.theta, V0, schedule);
  GramStepTracker tracker(V0);
  const int B = schedule.B();
  std::deque<double> window;
  for (long it = 1; it <= opts.max_iters; ++it) {
    const AsyncTickStats st = engine.tick();
    const Matrix& V = engine.global();
    const double dx = tracker.step(st.changed, st.old_cols, st.new_cols);
    res.f = objective(M, V);
    res.grad_norm = riemannian_grad_norm(M, V);
    res.consensus_gap = engine.consensus_gap();
    res.max_descent_residual = std::max(res.max_descent_residual, st.max_descent);
    res.max_closed_form_error = std::max(res.max_closed_form_error, st.max_closed_form);
    res.max_bound_excess = std::max(res.max_bound_excess, st.max_bound_excess);
    res.updates += st.updates;
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    res.trace.rows.push_back({it, res.f, res.grad_norm, res.consensus_gap, dx, st.max_s_norm, ms});
    res.iters = it;
    window.push_back(st.max_s_norm);
    if (static_cast<int>(window.size()) > B) window.pop_front();
    if (static_cast<int>(window.size()) == B &&
        *std::max_element(window.begin(), window.end()) < opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.V = engine.global();
  return res;
}

}  // namespace distsdp
