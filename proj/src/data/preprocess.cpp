#include "ssar/data/preprocess.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ssar {

Matrix gaussian_smooth(const Matrix& counts, double bin_width, double sd_seconds) {
    if (!(sd_seconds > 0.0)) throw std::invalid_argument("gaussian_smooth: sd must be > 0");
    if (!(bin_width > 0.0)) throw std::invalid_argument("gaussian_smooth: bin_width must be > 0");
    if (counts.rows() == 0) throw std::invalid_argument("gaussian_smooth: empty session");

    const auto half = static_cast<Eigen::Index>(std::floor(4.0 * sd_seconds / bin_width + 1e-9));
    std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
    for (Eigen::Index k = -half; k <= half; ++k) {
        const double t = static_cast<double>(k) * bin_width;
        taps[static_cast<std::size_t>(k + half)] = std::exp(-t * t / (2.0 * sd_seconds * sd_seconds));
    }

    const Eigen::Index n = counts.rows();
    Matrix out = Matrix::Zero(n, counts.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
        const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half);
        double norm = 0.0;
        for (Eigen::Index j = lo; j <= hi; ++j) {
            const double w = taps[static_cast<std::size_t>(j - i + half)];
            norm += w;
            out.row(i) += w * counts.row(j);
        }
        out.row(i) /= norm;
    }
    return out;
}

Matrix gaussian_smooth(const RawSession& raw, double sd_seconds) {
    raw.validate();
    return gaussian_smooth(raw.spike_counts, raw.bin_width, sd_seconds);
}

namespace {

bool is_zero_variance(double sd, double mean) {
    return !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
}

}  // namespace

ZScored zscore(const Matrix& rates) {
    if (rates.rows() < 2) throw std::invalid_argument("zscore: need at least 2 rows");
    const auto n = static_cast<double>(rates.rows());
    ZScored out;
    out.features.resize(rates.rows(), rates.cols());
    auto& norm = out.normalization;
    for (Eigen::Index c = 0; c < rates.cols(); ++c) {
        const double mean = rates.col(c).sum() / n;
        const double var = (rates.col(c).array() - mean).square().sum() / n;
        const double sd = std::sqrt(var);
        const bool flat = is_zero_variance(sd, mean);
        norm.mean.push_back(mean);
        norm.sd.push_back(flat ? 0.0 : sd);
        norm.zero_variance.push_back(flat);
    }
    out.features = apply_normalization(rates, norm);
    return out;
}

Matrix apply_normalization(const Matrix& rates, const Normalization& norm) {
    if (norm.channels() != static_cast<std::size_t>(rates.cols())) {
        throw std::invalid_argument("apply_normalization: channel count mismatch");
    }
    Matrix out(rates.rows(), rates.cols());
    for (Eigen::Index c = 0; c < rates.cols(); ++c) {
        const auto ci = static_cast<std::size_t>(c);
        if (norm.zero_variance[ci]) {
            out.col(c).setZero();
        } else {
            out.col(c) = (rates.col(c).array() - norm.mean[ci]) / norm.sd[ci];
        }
    }
    return out;
}

Session preprocess(const RawSession& raw, double smooth_sd_seconds) {
    ZScored z = zscore(gaussian_smooth(raw, smooth_sd_seconds));
    Session s;
    s.day_id = raw.day_id;
    s.bin_width = raw.bin_width;
    s.features = std::move(z.features);
    s.velocity = raw.velocity;
    s.normalization = std::move(z.normalization);
    s.validate();
    return s;
}

}  // namespace ssar
