#pragma once

#include "ssar/numerics/matrix.hpp"
#include "ssar/numerics/tape.hpp"

namespace ssar {

// Biased (V-statistic) squared MMD with a Gaussian kernel:
//   mean K(A,A) + mean K(B,B) - 2 mean K(A,B), clipped at 0.
// Throws std::invalid_argument when either set is empty.
double mmd_squared(const Matrix& a, const Matrix& b, double bandwidth);
Var mmd_squared(Tape& tape, Var a, Var b, double bandwidth);

// How the MMD kernel width is chosen for each pair of feature sets.
struct BandwidthPolicy {
    bool median_heuristic = true;
    double fixed = 1.0;

    // Median heuristic over the union of both sets. The result is treated as a
    // constant by the gradient. Falls back to the mean pairwise distance, then
    // to 1, when the median is zero.
    double resolve(const Matrix& a, const Matrix& b) const;
};

}  // namespace ssar
