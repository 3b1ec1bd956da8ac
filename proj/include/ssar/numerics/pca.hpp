#pragma once

#include <cstddef>
#include <vector>

#include "ssar/numerics/matrix.hpp"

namespace ssar {

struct PcaResult {
    Matrix projection;          // rows x k, centered features times components
    Matrix components;          // cols x k, orthonormal columns
    RowVector mean;             // per-column mean removed before projection
    std::vector<double> explained_variance;  // length k, non-increasing (n-1 denominator)
};

// Principal component projection onto the top-k covariance eigenvectors.
// Component signs are fixed so the largest-magnitude loading is positive.
PcaResult pca_project(const Matrix& features, std::size_t k);

}  // namespace ssar
