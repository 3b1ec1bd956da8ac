#include "ssar/numerics/pca.hpp"

#include <algorithm>
#include <stdexcept>

namespace ssar {

PcaResult pca_project(const Matrix& features, std::size_t k) {
    const auto n = features.rows();
    const auto d = features.cols();
    if (k < 1 || k > static_cast<std::size_t>(d)) {
        throw std::invalid_argument("pca_project: k must be in [1, cols]");
    }
    if (static_cast<std::size_t>(n) < k || n < 2) {
        throw std::invalid_argument("pca_project: need rows >= k and at least 2 rows");
    }
    PcaResult out;
    out.mean = features.colwise().mean();
    const Matrix centered = features.rowwise() - out.mean;
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw std::runtime_error("pca_project: eigensolver failed");

    // Eigen returns ascending eigenvalues.
    const auto kk = static_cast<Eigen::Index>(k);
    out.components.resize(d, kk);
    out.explained_variance.resize(k);
    for (Eigen::Index c = 0; c < kk; ++c) {
        const Eigen::Index src = d - 1 - c;
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        out.components.col(c) = v;
        out.explained_variance[static_cast<std::size_t>(c)] = std::max(0.0, solver.eigenvalues()(src));
    }
    out.projection = centered * out.components;
    return out;
}

}  // namespace ssar
