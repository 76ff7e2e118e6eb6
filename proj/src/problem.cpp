#include "distsdp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "distsdp/error.hpp"

namespace distsdp {

CoefficientMatrix::CoefficientMatrix(int n) : n_(n), rows_(n) {
  if (n < 1) throw Error(ErrorCode::InvalidProblem, "n must be positive");
}

int CoefficientMatrix::add(int j, int l, double w) {
  if (j < 0 || l < 0 || j >= n_ || l >= n_) {
    std::ostringstream os;
    os << "index pair (" << j + 1 << ", " << l + 1 << ") outside 1.." << n_;
    throw Error(ErrorCode::InvalidProblem, os.str());
  }
  if (j == l) throw Error(ErrorCode::InvalidProblem, "diagonal entry");
  if (!std::isfinite(w) || w < 0.0) {
    std::ostringstream os;
    os << "weight at (" << j + 1 << ", " << l + 1 << ") must be finite and >= 0";
    throw Error(ErrorCode::InvalidProblem, os.str());
  }
  if (j > l) std::swap(j, l);
  for (const Neighbor& nb : rows_[j]) {
    if (nb.col == l) {
      std::ostringstream os;
      os << "duplicate entry (" << j + 1 << ", " << l + 1 << ")";
      throw Error(ErrorCode::InvalidProblem, os.str());
    }
  }
  const int id = static_cast<int>(entries_.size());
  entries_.push_back({j, l, w});
  rows_[j].push_back({l, w, id});
  rows_[l].push_back({j, w, id});
  return id;
}

double CoefficientMatrix::weight(int j, int l) const {
  for (const Neighbor& nb : rows_[j])
    if (nb.col == l) return nb.w;
  return 0.0;
}

double CoefficientMatrix::row_norm1(int j) const {
  double s = 0.0;
  for (const Neighbor& nb : rows_[j]) s += nb.w;
  return s;
}

double CoefficientMatrix::total_weight() const {
  double s = 0.0;
  for (const Entry& e : entries_) s += e.w;
  return 2.0 * s;
}

bool CoefficientMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return e.w == 0.0; });
}

Matrix CoefficientMatrix::dense() const {
  Matrix D = Matrix::Zero(n_, n_);
  for (const Entry& e : entries_) {
    D(e.j, e.l) = e.w;
    D(e.l, e.j) = e.w;
  }
  return D;
}

Vector normalize(const Vector& x) {
  const double nrm = x.norm();
  if (!(nrm > 1e-300)) throw Error(ErrorCode::ZeroVector, "cannot normalize a zero vector");
  return x / nrm;
}

static void check_dims(const CoefficientMatrix& M, const Matrix& V) {
  if (V.cols() != M.n()) {
    std::ostringstream os;
    os << "factor has " << V.cols() << " columns, matrix has n=" << M.n();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

double objective(const CoefficientMatrix& M, const Matrix& V) {
  check_dims(M, V);
  double f = 0.0;
  for (const Entry& e : M.entries()) f += e.w * V.col(e.j).dot(V.col(e.l));
  return 2.0 * f;
}

Matrix row_products(const CoefficientMatrix& M, const Matrix& V) {
  check_dims(M, V);
  Matrix G = Matrix::Zero(V.rows(), V.cols());
  for (const Entry& e : M.entries()) {
    G.col(e.j) += e.w * V.col(e.l);
    G.col(e.l) += e.w * V.col(e.j);
  }
  return G;
}

double riemannian_grad_norm(const CoefficientMatrix& M, const Matrix& V) {
  const Matrix G = row_products(M, V);
  double s = 0.0;
  for (int i = 0; i < V.cols(); ++i) {
    // Project explicitly; ||g||^2 - <v,g>^2 cancels to ~1e-8 near critical points.
    const double a = G.col(i).dot(V.col(i));
    s += (G.col(i) - a * V.col(i)).squaredNorm();
  }
  return std::sqrt(s);
}

Matrix gram(const Matrix& V) { return V.transpose() * V; }

int choose_rank(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidProblem, "n must be positive");
  // Integer ceil(sqrt(2n)) to avoid rounding at perfect squares.
  const long target = 2L * n;
  long r = static_cast<long>(std::sqrt(static_cast<double>(target)));
  while (r * r < target) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= target) --r;
  return static_cast<int>(r) + 1;
}

Matrix random_init(int p, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix V(p, n);
  for (int j = 0; j < n; ++j) {
    Vector x(p);
    do {
      for (int k = 0; k < p; ++k) x(k) = normal(rng);
    } while (x.norm() <= 1e-300);
    V.col(j) = x / x.norm();
  }
  return V;
}

Matrix common_init(int p, int n, std::uint64_t seed) {
  const Matrix v = random_init(p, 1, seed);
  return v.replicate(1, n);
}

double max_unit_deviation(const Matrix& V) {
  double dev = 0.0;
  for (int j = 0; j < V.cols(); ++j) dev = std::max(dev, std::abs(V.col(j).norm() - 1.0));
  return dev;
}

GramStepTracker::GramStepTracker(const Matrix& V) { reset(V); }

void GramStepTracker::reset(const Matrix& V) {
  outer_ = V * V.transpose();
}

double GramStepTracker::step(const std::vector<int>& cols, const Matrix& old_cols,
                             const Matrix& new_cols) {
  if (cols.empty()) return 0.0;
  // Pairs inside the moved set, then moved-vs-fixed pairs (counted twice).
  // N'N - O'O written as O'D + D'N keeps precision when D is tiny.
  const Matrix D = new_cols - old_cols;
  const Matrix inner = old_cols.transpose() * D + D.transpose() * new_cols;
  const Matrix old_outer = old_cols * old_cols.transpose();
  const Matrix fixed = outer_ - old_outer;
  const double cross = (D.transpose() * fixed * D).trace();
  outer_ += new_cols * new_cols.transpose() - old_outer;
  return std::sqrt(std::max(0.0, inner.squaredNorm() + 2.0 * cross));
}

}  // namespace distsdp
