#include <cmath>
#include <numbers>

#include "distsdp/error.hpp"
#include "distsdp/problem.hpp"
#include "doctest.h"
#include "instances.hpp"

using namespace distsdp;

namespace {

Matrix triangle_120() {
  Matrix V(2, 3);
  for (int k = 0; k < 3; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 3.0;
    V(0, k) = std::cos(a);
    V(1, k) = std::sin(a);
  }
  return V;
}

Matrix equal_columns(int p, int n) {
  Matrix V = Matrix::Zero(p, n);
  V.row(0).setOnes();
  return V;
}

// Dense reference objective: trace(M V'V).
double dense_objective(const CoefficientMatrix& M, const Matrix& V) {
  return (M.dense() * (V.transpose() * V)).trace();
}

double dense_grad_norm(const CoefficientMatrix& M, const Matrix& V) {
  const Matrix G = V * M.dense();
  double s = 0.0;
  for (int i = 0; i < V.cols(); ++i) {
    const Vector proj = G.col(i) - V.col(i).dot(G.col(i)) * V.col(i);
    s += proj.squaredNorm();
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("coefficient matrix is symmetric and rejects bad entries") {
  CoefficientMatrix M(4);
  M.add(0, 2, 1.5);
  M.add(3, 1, 2.0);
  CHECK(M.weight(0, 2) == 1.5);
  CHECK(M.weight(2, 0) == 1.5);
  CHECK(M.weight(1, 3) == 2.0);
  CHECK(M.weight(0, 1) == 0.0);
  CHECK(M.row_norm1(1) == 2.0);
  CHECK(M.total_weight() == doctest::Approx(7.0));
  CHECK(M.entries()[1].j == 1);
  CHECK(M.entries()[1].l == 3);

  CHECK_THROWS_AS(M.add(1, 1, 1.0), Error);
  CHECK_THROWS_AS(M.add(0, 4, 1.0), Error);
  CHECK_THROWS_AS(M.add(0, 1, -1.0), Error);
  CHECK_THROWS_AS(M.add(0, 1, std::nan("")), Error);
  CHECK_THROWS_AS(M.add(2, 0, 1.0), Error);
  try {
    M.add(2, 0, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidProblem);
  }
  CHECK(CoefficientMatrix(3).is_zero());
  CHECK(!M.is_zero());
}

TEST_CASE("normalize") {
  Vector a(3);
  a << 2, 0, 0;
  CHECK((normalize(a) - Vector::Unit(3, 0)).norm() < 1e-15);
  CHECK((normalize(Vector::Unit(3, 0)) - Vector::Unit(3, 0)).norm() < 1e-15);
  Vector b(3);
  b << 3, 4, 0;
  Vector want(3);
  want << 0.6, 0.8, 0.0;
  CHECK((normalize(b) - want).norm() < 1e-15);
  CHECK(std::abs(normalize(b).norm() - 1.0) < 1e-15);
  try {
    normalize(Vector::Zero(3));
    FAIL("expected ZeroVector");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroVector);
  }
}

TEST_CASE("objective examples") {
  CHECK(objective(CoefficientMatrix(3), random_init(2, 3, 1)) == 0.0);
  const auto tri = fixtures::triangle();
  CHECK(objective(tri.M, equal_columns(2, 3)) == doctest::Approx(6.0));
  CHECK(std::abs(objective(tri.M, triangle_120()) + 3.0) < 1e-12);
}

TEST_CASE("objective minimum on the triangle by angular grid search") {
  // Fix v_1 = (1, 0) by rotation invariance and scan the other two angles.
  const auto tri = fixtures::triangle();
  double best = 1e300;
  const int steps = 720;
  Matrix V(2, 3);
  V.col(0) << 1, 0;
  for (int a = 0; a < steps; ++a)
    for (int b = 0; b < steps; ++b) {
      const double x = 2 * std::numbers::pi * a / steps, y = 2 * std::numbers::pi * b / steps;
      V.col(1) << std::cos(x), std::sin(x);
      V.col(2) << std::cos(y), std::sin(y);
      best = std::min(best, objective(tri.M, V));
    }
  CHECK(best == doctest::Approx(-3.0).epsilon(1e-9));
}

TEST_CASE("riemannian gradient norm") {
  const auto tri = fixtures::triangle();
  CHECK(riemannian_grad_norm(CoefficientMatrix(3), random_init(2, 3, 4)) == 0.0);
  CHECK(riemannian_grad_norm(tri.M, triangle_120()) < 1e-12);
  CHECK(riemannian_grad_norm(tri.M, equal_columns(3, 3)) < 1e-12);

  // At 120 degrees g_i is antiparallel to v_i.
  const Matrix V = triangle_120();
  const Matrix G = row_products(tri.M, V);
  for (int i = 0; i < 3; ++i) CHECK(G.col(i).dot(V.col(i)) == doctest::Approx(-G.col(i).norm()));

  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto p = fixtures::random_graph(s, 9);
    const Matrix W = random_init(5, 9, s);
    CHECK(objective(p.M, W) == doctest::Approx(dense_objective(p.M, W)).epsilon(1e-12));
    CHECK(riemannian_grad_norm(p.M, W) == doctest::Approx(dense_grad_norm(p.M, W)).epsilon(1e-12));
  }
}

TEST_CASE("gram") {
  CHECK((gram(equal_columns(2, 4)) - Matrix::Ones(4, 4)).norm() == 0.0);
  CHECK((gram(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() == 0.0);
  const Matrix X = gram(triangle_120());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(X(i, j) == doctest::Approx(i == j ? 1.0 : -0.5));
}

TEST_CASE("choose_rank") {
  CHECK(choose_rank(8) == 5);
  CHECK(choose_rank(2) == 3);
  CHECK(choose_rank(18) == 7);
  for (int n = 1; n <= 500; ++n) {
    const int p = choose_rank(n);
    CHECK(p > std::sqrt(2.0 * n));
    CHECK(p - 1 >= std::sqrt(2.0 * n) - 1e-12);
    CHECK(p - 2 < std::sqrt(2.0 * n));
  }
}

TEST_CASE("initial factors have unit columns and are seeded") {
  const Matrix A = random_init(5, 20, 11);
  CHECK(max_unit_deviation(A) < 1e-15);
  CHECK(A == random_init(5, 20, 11));
  CHECK(A != random_init(5, 20, 12));
  const Matrix C = common_init(5, 20, 11);
  CHECK(max_unit_deviation(C) < 1e-15);
  for (int j = 1; j < 20; ++j) CHECK(C.col(j) == C.col(0));
}

TEST_CASE("gram step tracker matches the dense difference") {
  Rng rng(3);
  Matrix V = random_init(4, 12, 3);
  GramStepTracker tracker(V);
  for (int round = 0; round < 20; ++round) {
    std::vector<int> cols;
    for (int j = 0; j < 12; ++j)
      if ((rng() & 3) == 0) cols.push_back(j);
    Matrix old_cols(4, cols.size()), new_cols(4, cols.size());
    Matrix W = V;
    const Matrix fresh = random_init(4, 12, 100 + round);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      old_cols.col(k) = V.col(cols[k]);
      W.col(cols[k]) = fresh.col(cols[k]);
      new_cols.col(k) = W.col(cols[k]);
    }
    const double want = (gram(W) - gram(V)).norm();
    const double got = tracker.step(cols, old_cols, new_cols);
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
    V = W;
  }
}
