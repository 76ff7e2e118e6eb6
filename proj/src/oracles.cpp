#include "distsdp/oracles.hpp"

#include <random>

#include "distsdp/error.hpp"

namespace distsdp {

Matrix mixing_sweep(const CoefficientMatrix& M, const Matrix& V, const Vector& theta,
                    SweepDetail* detail) {
  const int n = M.n();
  if (V.cols() != n || theta.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "mixing sweep dimensions disagree");
  Matrix W = V;
  if (detail) {
    detail->g = Matrix::Zero(V.rows(), n);
    detail->y = Vector::Ones(n);
  }
  Vector g(V.rows());
  for (int j = 0; j < n; ++j) {
    const auto& row = M.row(j);
    if (row.empty()) continue;
    // Columns before j already hold their new values in W.
    g.setZero();
    for (const Neighbor& nb : row) g += nb.w * W.col(nb.col);
    const Vector step = W.col(j) - theta(j) * g;
    const double y = step.norm();
    W.col(j) = normalize(step);
    if (detail) {
      detail->g.col(j) = g;
      detail->y(j) = y;
    }
  }
  return W;
}

double predicted_decrease(const Matrix& before, const Matrix& after, const Vector& theta,
                          const Vector& y) {
  double s = 0.0;
  for (int j = 0; j < before.cols(); ++j)
    s += (1.0 + y(j)) / theta(j) * (before.col(j) - after.col(j)).squaredNorm();
  return s;
}

double cut_value(const CoefficientMatrix& M, const Signs& x) {
  if (static_cast<int>(x.size()) != M.n())
    throw Error(ErrorCode::DimensionMismatch, "assignment length differs from n");
  double c = 0.0;
  for (const Entry& e : M.entries())
    if (x[e.j] != x[e.l]) c += e.w;
  return c;
}

CutResult brute_force_maxcut(const CoefficientMatrix& M) {
  const int n = M.n();
  if (n > 24) throw Error(ErrorCode::TooLarge, "brute force limited to n <= 24");
  Signs x(n, 1);
  double cur = 0.0;
  CutResult best{0.0, x};
  // Gray code over x_2..x_n; flipping one sign changes the cut by the
  // signed weight of that vertex's row.
  const std::uint64_t count = n > 1 ? (std::uint64_t{1} << (n - 1)) : 1;
  for (std::uint64_t k = 1; k < count; ++k) {
    const int bit = __builtin_ctzll(k);
    const int v = bit + 1;
    double delta = 0.0;
    for (const Neighbor& nb : M.row(v)) delta += (x[nb.col] == x[v]) ? nb.w : -nb.w;
    x[v] = -x[v];
    cur += delta;
    if (cur > best.value) {
      best.value = cur;
      best.signs = x;
    }
  }
  // Recompute from scratch to shed accumulated rounding.
  best.value = cut_value(M, best.signs);
  return best;
}

CutResult hyperplane_round(const Matrix& V, const CoefficientMatrix& M, int trials,
                           std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidProblem, "trials must be at least 1");
  if (V.cols() != M.n()) throw Error(ErrorCode::DimensionMismatch, "factor and matrix sizes differ");
  CutResult best{-1.0, {}};
  Signs x(M.n());
  Vector r(V.rows());
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, {0x726f756e64ULL, static_cast<std::uint64_t>(t)}));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < r.size(); ++k) r(k) = normal(rng);
    const Vector proj = V.transpose() * r;
    for (int j = 0; j < M.n(); ++j) x[j] = proj(j) >= 0.0 ? 1 : -1;
    const double c = cut_value(M, x);
    if (c > best.value) {
      best.value = c;
      best.signs = x;
    }
  }
  return best;
}

double sdp_cut_bound(const CoefficientMatrix& M, double f_star) {
  return 0.25 * (M.total_weight() - f_star);
}

}  // namespace distsdp
