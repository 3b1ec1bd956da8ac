#include "ssar/numerics/matrix.hpp"

#include <stdexcept>
#include <string>

namespace ssar {

bool all_finite(const Matrix& m) {
    return m.allFinite();
}

void require_finite(const Matrix& m, std::string_view what) {
    if (!all_finite(m)) {
        throw std::invalid_argument(std::string(what) + " contains non-finite values");
    }
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= static_cast<std::size_t>(m.rows())) {
            throw std::invalid_argument("gather_rows: row index out of range");
        }
        out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

Matrix vstack(std::span<const Matrix* const> parts) {
    Eigen::Index rows = 0;
    Eigen::Index cols = -1;
    for (const Matrix* p : parts) {
        if (p->rows() == 0) continue;
        if (cols >= 0 && p->cols() != cols) {
            throw std::invalid_argument("vstack: column count mismatch");
        }
        cols = p->cols();
        rows += p->rows();
    }
    Matrix out(rows, cols < 0 ? 0 : cols);
    Eigen::Index at = 0;
    for (const Matrix* p : parts) {
        if (p->rows() == 0) continue;
        out.middleRows(at, p->rows()) = *p;
        at += p->rows();
    }
    return out;
}

}  // namespace ssar
