#include <cmath>

#include "distsdp/error.hpp"
#include "distsdp/oracles.hpp"
#include "distsdp/sync_engine.hpp"
#include "doctest.h"
#include "instances.hpp"

using namespace distsdp;

namespace {

// Sum of w * v_l over entries touching j whose owner is in `owners`.
Vector dense_partial_row(const Problem& p, const Matrix& V, int j, const std::vector<int>& owners) {
  Vector s = Vector::Zero(V.rows());
  for (std::size_t e = 0; e < p.M.entries().size(); ++e) {
    if (std::find(owners.begin(), owners.end(), p.owner[e]) == owners.end()) continue;
    const Entry& x = p.M.entries()[e];
    if (x.j == j) s += x.w * V.col(x.l);
    if (x.l == j) s += x.w * V.col(x.j);
  }
  return s;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("single update by hand") {
  const Problem p = fixtures::single_edge(1.0);
  const AgentPartition part = build_partition(p);
  Matrix V(2, 2);
  V << 0, 1, 1, 0;
  SyncEngine eng(p.M, part, Vector::Constant(2, 0.45), V);
  eng.begin_sweep();
  const Vector v = eng.update_uncoupled(0, 0);
  CHECK(v(0) == doctest::Approx(-0.4103).epsilon(1e-4));
  CHECK(v(1) == doctest::Approx(0.9120).epsilon(1e-4));
  CHECK(v(0) == doctest::Approx(-0.45 / std::sqrt(1.2025)).epsilon(1e-15));

  // Zero bracket leaves the column alone.
  const Problem z = fixtures::zero_problem(2);
  const AgentPartition pz = build_partition(z);
  SyncEngine ez(z.M, pz, Vector::Ones(2), V);
  CHECK(ez.update_uncoupled(0, 0) == V.col(0));
}

TEST_CASE("child messages") {
  // J_1 = {1,2}, J_2 = {2,3}; the child owns M_{2,3} = 2 and v_3 = (1,0).
  CoefficientMatrix M(3);
  M.add(0, 1, 1.0);
  M.add(1, 2, 2.0);
  const AgentPartition part = build_partition({{0, 1}, {1, 2}}, M, {0, 1});
  Matrix V(2, 3);
  V << 0, 0, 1, 1, 1, 0;
  SyncEngine eng(M, part, Vector::Constant(3, 0.1), V);
  const Vector msg = eng.child_message(1, 0, 1);
  CHECK(msg(0) == 2.0);
  CHECK(msg(1) == 0.0);
  CHECK(eng.child_message(1, 0, 0).isZero());
  CHECK(eng.parent_message(1, 1) == msg);

  // Child holds j but owns nothing in its row.
  CoefficientMatrix M2(3);
  M2.add(0, 1, 1.0);
  M2.add(0, 2, 1.0);
  const AgentPartition p2 = build_partition({{0, 1, 2}, {1, 2}}, M2, {0, 0});
  SyncEngine e2(M2, p2, Vector::Constant(3, 0.1), random_init(2, 3, 1));
  CHECK(e2.child_message(1, 0, 1).isZero());

  CHECK(code_of([&] { eng.child_message(0, 1, 1); }) == ErrorCode::NotAChild);
  CHECK(code_of([&] { eng.parent_message(0, 1); }) == ErrorCode::NoParent);
}

TEST_CASE("worked example messages match the dense oracle") {
  const Problem p = fixtures::example1(21, true);
  const AgentPartition part = build_partition(p);
  const Matrix V = random_init(5, 8, 21);
  SyncEngine eng(p.M, part, sync_step_sizes(part, p.M, 0.1).theta, V);
  // Agent 3 to agent 2 at index 4 (0-based: 2 -> 1 at 3).
  CHECK((eng.child_message(2, 1, 3) - dense_partial_row(p, V, 3, {2})).norm() < 1e-15);
  // Agent 2 at index 1 carries its whole subtree.
  CHECK((eng.parent_message(1, 0) - dense_partial_row(p, V, 0, {1, 2, 3, 4})).norm() < 1e-14);
  CHECK((eng.parent_message(1, 3) - dense_partial_row(p, V, 3, {1, 2, 3, 4})).norm() < 1e-14);
  // Leaf agents send their own row sums.
  CHECK((eng.parent_message(3, 2) - dense_partial_row(p, V, 2, {3})).norm() < 1e-15);

  // Updating agent 2's home column before its children finish is refused.
  eng.begin_sweep();
  CHECK(code_of([&] { eng.update_uncoupled(1, 2); }) == ErrorCode::MissingMessage);
  CHECK(code_of([&] { eng.update_uncoupled(1, 0); }) == ErrorCode::InvalidProblem);
}

TEST_CASE("a sweep equals the mixing sweep in reordered labels") {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const Problem p = fixtures::example1(s, true);
    const AgentPartition part = build_partition(p);
    const StepSizes st = sync_step_sizes(part, p.M, 0.1);
    SyncOptions opts;
    opts.max_iters = 30;
    opts.grad_tol = 0.0;
    double worst = 0.0;
    double worst_gap = 0.0;
    const SyncResult r = run_sync(p, part, st, random_init(5, 8, s), opts, [&](const SyncSweepInfo& info) {
      const Problem q = permute_problem(p, info.perm);
      const Matrix want = mixing_sweep(q.M, info.before, info.theta);
      worst = std::max(worst, (want - info.after).cwiseAbs().maxCoeff());
      worst_gap = std::max(worst_gap, info.consensus_gap);
    });
    CHECK(worst < 1e-12);
    CHECK(worst_gap == 0.0);
    CHECK(r.max_consensus_gap == 0.0);
    CHECK(r.iters == 30);
    CHECK(r.trace.rows.size() == 31);
    CHECK(r.max_decrease_residual < 1e-10);
    CHECK(max_unit_deviation(r.V) < 1e-14);
    // Returned factor is in the caller's labels.
    CHECK(objective(p.M, r.V) == doctest::Approx(r.f).epsilon(1e-12));
  }
}

TEST_CASE("zero matrix stops after one sweep") {
  const Problem z = fixtures::zero_problem(4);
  const AgentPartition part = build_partition(z);
  const Matrix V0 = random_init(3, 4, 5);
  const SyncResult r = run_sync(z, part, sync_step_sizes(part, z.M, 0.1), V0, {});
  CHECK(r.converged);
  CHECK(r.iters == 1);
  CHECK(r.f == 0.0);
  CHECK(r.V == V0);
}

TEST_CASE("triangle reaches the known optimum") {
  const Problem tri = fixtures::triangle();
  const AgentPartition part = build_partition(tri);
  SyncOptions opts;
  opts.grad_tol = 1e-8;
  opts.max_iters = 10000;
  const SyncResult r = run_sync(tri, part, sync_step_sizes(part, tri.M, 0.1), random_init(3, 3, 8), opts);
  CHECK(r.converged);
  CHECK(r.f == doctest::Approx(-3.0).epsilon(1e-6));
  for (std::size_t k = 1; k < r.trace.rows.size(); ++k)
    CHECK(r.trace.rows[k].f <= r.trace.rows[k - 1].f + 1e-12);
}

TEST_CASE("decrease identity") {
  const Matrix V = random_init(3, 4, 1);
  CHECK(decrease_identity_residual(1.0, 1.0, V, V, Vector::Ones(4), Vector::Ones(4)) == 0.0);

  const Problem tri = fixtures::triangle();
  const AgentPartition part = build_partition(tri);
  const Vector theta = sync_step_sizes(part, tri.M, 0.1).theta;
  SyncEngine eng(tri.M, part, theta, V.leftCols(3));
  const Matrix before = eng.global();
  eng.sweep();
  const Matrix after = eng.global();
  const double fb = objective(tri.M, before);
  const double res = decrease_identity_residual(fb, objective(tri.M, after), before, after, theta, eng.last_y());
  CHECK(res < 1e-10 * (1.0 + std::abs(fb)));
  CHECK(fb - objective(tri.M, after) > 0.0);
}
