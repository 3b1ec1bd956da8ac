#pragma once

#include <span>

#include "ssar/numerics/matrix.hpp"

namespace ssar {

double squared_distance(std::span<const double> a, std::span<const double> b);

// Gaussian RBF exp(-|a-b|^2 / (2 bandwidth^2)).
double rbf_kernel(std::span<const double> a, std::span<const double> b, double bandwidth);

// Kernel matrix K(i, j) = rbf(a_i, b_j) over row vectors.
Matrix rbf_gram(const Matrix& a, const Matrix& b, double bandwidth);

// sqrt(median of pairwise squared distances / 2) over all unordered row pairs.
// Throws std::invalid_argument when fewer than 2 rows or the median is 0.
double median_heuristic_bandwidth(const Matrix& points);

}  // namespace ssar
