#pragma once

#include <cstdint>
#include <vector>

#include "distsdp/problem.hpp"

namespace distsdp {

struct SweepDetail {
  Matrix g;  // p x n, the Gauss-Seidel row products used for each column
  Vector y;  // normalization denominators ||v_j - theta_j g_j||
};

// One Gauss-Seidel pass j = 0..n-1 over the global factor. Zero rows are
// left untouched.
Matrix mixing_sweep(const CoefficientMatrix& M, const Matrix& V, const Vector& theta,
                    SweepDetail* detail = nullptr);

// Sum over j of (1 + y_j)/theta_j ||v_j(t) - v_j(t+1)||^2, the predicted
// objective decrease of one sweep.
double predicted_decrease(const Matrix& before, const Matrix& after, const Vector& theta,
                          const Vector& y);

using Signs = std::vector<int>;

double cut_value(const CoefficientMatrix& M, const Signs& x);

struct CutResult {
  double value = 0.0;
  Signs signs;
};

// Exhaustive search with x_1 = +1. Throws TooLarge for n > 24.
CutResult brute_force_maxcut(const CoefficientMatrix& M);

// Best of `trials` random hyperplanes; sign(0) is +1.
CutResult hyperplane_round(const Matrix& V, const CoefficientMatrix& M, int trials,
                           std::uint64_t seed);

double sdp_cut_bound(const CoefficientMatrix& M, double f_star);

}  // namespace distsdp
