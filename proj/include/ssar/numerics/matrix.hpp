#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace ssar {

// Dense row-major 64-bit matrix; every vector/matrix quantity in the library.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

// True iff every entry is finite.
bool all_finite(const Matrix& m);

// Throws std::invalid_argument naming `what` if any entry is non-finite.
void require_finite(const Matrix& m, std::string_view what);

// Rows of `m` selected by index, in the given order.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows);

// Stacks matrices with equal column counts; empty inputs are skipped.
Matrix vstack(std::span<const Matrix* const> parts);

inline std::span<const double> row_span(const Matrix& m, Eigen::Index r) {
    return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace ssar
