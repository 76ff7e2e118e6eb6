#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "distsdp/rng.hpp"

namespace distsdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Neighbor {
  int col;
  double w;
  int entry;  // index into CoefficientMatrix::entries()
};

struct Entry {
  int j;  // j < l, 0-based
  int l;
  double w;
};

// Symmetric, zero-diagonal, nonnegative sparse matrix stored as a coordinate
// list of the upper triangle plus a per-row adjacency index.
class CoefficientMatrix {
 public:
  CoefficientMatrix() = default;
  explicit CoefficientMatrix(int n);

  // Adds w at (j, l) and (l, j). Throws InvalidProblem on j == l, a negative or
  // non-finite weight, an out-of-range index, or a duplicate pair.
  int add(int j, int l, double w);

  int n() const { return n_; }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<Neighbor>& row(int j) const { return rows_[j]; }
  double weight(int j, int l) const;
  double row_norm1(int j) const;
  // Sum over all ordered pairs, i.e. twice the stored total.
  double total_weight() const;
  bool is_zero() const;
  Matrix dense() const;

 private:
  int n_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::vector<Neighbor>> rows_;
};

// A problem as read from disk: matrix, agent index sets and entry ownership,
// all 0-based.
struct Problem {
  CoefficientMatrix M;
  std::vector<std::vector<int>> agents;
  std::vector<int> owner;  // parallel to M.entries()
  std::vector<std::string> warnings;
};

Vector normalize(const Vector& x);

double objective(const CoefficientMatrix& M, const Matrix& V);

// g_i = sum_j M_ij v_j for every column, as a p x n matrix.
Matrix row_products(const CoefficientMatrix& M, const Matrix& V);

double riemannian_grad_norm(const CoefficientMatrix& M, const Matrix& V);

Matrix gram(const Matrix& V);

int choose_rank(int n);

Matrix random_init(int p, int n, std::uint64_t seed);
Matrix common_init(int p, int n, std::uint64_t seed);

double max_unit_deviation(const Matrix& V);

// Tracks ||X(t+1) - X(t)||_F for X = V'V without forming X. Holds V V'
// (p x p) and only touches the columns that moved.
class GramStepTracker {
 public:
  explicit GramStepTracker(const Matrix& V);

  // old_cols/new_cols are the p x k before/after values of the listed columns.
  double step(const std::vector<int>& cols, const Matrix& old_cols,
              const Matrix& new_cols);

  void reset(const Matrix& V);

 private:
  Matrix outer_;
};

}  // namespace distsdp
