#include "ssar/numerics/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ssar {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("squared_distance: dimension mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double bandwidth) {
    if (a.size() != b.size()) throw std::invalid_argument("rbf_kernel: dimension mismatch");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw std::invalid_argument("rbf_kernel: bandwidth must be positive and finite");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
            throw std::invalid_argument("rbf_kernel: non-finite input");
        }
    }
    return std::exp(-squared_distance(a, b) / (2.0 * bandwidth * bandwidth));
}

Matrix rbf_gram(const Matrix& a, const Matrix& b, double bandwidth) {
    if (a.cols() != b.cols()) throw std::invalid_argument("rbf_gram: dimension mismatch");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("rbf_gram: bandwidth must be positive");
    const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
    Matrix k(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            k(i, j) = std::exp(-(a.row(i) - b.row(j)).squaredNorm() * inv);
        }
    }
    return k;
}

double median_heuristic_bandwidth(const Matrix& points) {
    const Eigen::Index n = points.rows();
    if (n < 2) throw std::invalid_argument("median_heuristic_bandwidth: need at least 2 rows");
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d2.push_back((points.row(i) - points.row(j)).squaredNorm());
        }
    }
    const std::size_t mid = d2.size() / 2;
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
    double median = d2[mid];
    if (d2.size() % 2 == 0) {
        const double lower = *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (median + lower);
    }
    if (!(median > 0.0) || !std::isfinite(median)) {
        throw std::invalid_argument("median_heuristic_bandwidth: degenerate bandwidth (rows identical)");
    }
    return std::sqrt(median / 2.0);
}

}  // namespace ssar
