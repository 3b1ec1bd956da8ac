#pragma once

// Brute-force reference implementations, written directly from the defining
// formulas with plain loops. Shared by the unit tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "ssar/numerics/matrix.hpp"
#include "ssar/numerics/random.hpp"

namespace oracle {

using ssar::Matrix;

inline Matrix random_matrix(ssar::Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo = -1.0,
                            double hi = 1.0) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
    return m;
}

inline double gauss(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j, double s) {
    double d2 = 0.0;
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
        const double d = a(i, k) - b(j, k);
        d2 += d * d;
    }
    return std::exp(-d2 / (2.0 * s * s));
}

// Biased squared MMD, three separate double sums.
inline double mmd(const Matrix& a, const Matrix& b, double s) {
    const double m = static_cast<double>(a.rows());
    const double n = static_cast<double>(b.rows());
    double kxx = 0.0, kyy = 0.0, kxy = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.rows(); ++j) kxx += gauss(a, i, a, j, s);
    for (Eigen::Index i = 0; i < b.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) kyy += gauss(b, i, b, j, s);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) kxy += gauss(a, i, b, j, s);
    return std::max(0.0, kxx / (m * m) + kyy / (n * n) - 2.0 * kxy / (m * n));
}

// Mean over all ordered pairs of the squared similarity gap.
inline double ccc(const Matrix& f, const Matrix& y, double sf = 1.0, double sy = 1.0) {
    const Eigen::Index n = f.rows();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double gap = gauss(f, i, f, j, sf) - gauss(y, i, y, j, sy);
            total += gap * gap;
        }
    return total / static_cast<double>(n * n);
}

inline double regression(const Matrix& pred, const Matrix& y) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index k = 0; k < y.cols(); ++k) total += (pred(i, k) - y(i, k)) * (pred(i, k) - y(i, k));
    return total / static_cast<double>(y.rows());
}

// Direct convolution: every output bin sums the in-range taps within 4 sd.
inline Matrix smooth(const Matrix& counts, double bin_width, double sd) {
    Matrix out(counts.rows(), counts.cols());
    for (Eigen::Index c = 0; c < counts.cols(); ++c)
        for (Eigen::Index i = 0; i < counts.rows(); ++i) {
            double num = 0.0, den = 0.0;
            for (Eigen::Index j = 0; j < counts.rows(); ++j) {
                const double dt = static_cast<double>(j - i) * bin_width;
                if (std::abs(dt) > 4.0 * sd * (1.0 + 1e-9)) continue;
                const double w = std::exp(-0.5 * (dt / sd) * (dt / sd));
                num += w * counts(j, c);
                den += w;
            }
            out(i, c) = num / den;
        }
    return out;
}

inline double pearson_column(const Matrix& a, const Matrix& b, Eigen::Index c) {
    const double n = static_cast<double>(a.rows());
    double ma = 0.0, mb = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        ma += a(i, c);
        mb += b(i, c);
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        sab += (a(i, c) - ma) * (b(i, c) - mb);
        saa += (a(i, c) - ma) * (a(i, c) - ma);
        sbb += (b(i, c) - mb) * (b(i, c) - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline double r2_column(const Matrix& truth, const Matrix& pred, Eigen::Index c) {
    double mean = 0.0;
    for (Eigen::Index i = 0; i < truth.rows(); ++i) mean += truth(i, c);
    mean /= static_cast<double>(truth.rows());
    double res = 0.0, tot = 0.0;
    for (Eigen::Index i = 0; i < truth.rows(); ++i) {
        res += (truth(i, c) - pred(i, c)) * (truth(i, c) - pred(i, c));
        tot += (truth(i, c) - mean) * (truth(i, c) - mean);
    }
    return 1.0 - res / tot;
}

// Bin by scanning the C+1 edges v_min + k*delta; the top bin is closed.
inline std::size_t edge_scan_bin(double speed, double v_min, double v_max, std::size_t count) {
    if (v_max == v_min) return 1;
    const double delta = (v_max - v_min) / static_cast<double>(count);
    if (speed >= v_max) return count;
    for (std::size_t k = count; k >= 1; --k) {
        if (speed >= v_min + static_cast<double>(k - 1) * delta) return k;
    }
    return 1;
}

// Central differences of f over every entry of `x`.
inline Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, Matrix x, double h = 1e-6) {
    Matrix g(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double keep = x(i, j);
            x(i, j) = keep + h;
            const double up = f(x);
            x(i, j) = keep - h;
            const double down = f(x);
            x(i, j) = keep;
            g(i, j) = (up - down) / (2.0 * h);
        }
    return g;
}

// Norm-wise relative error |a - b| / max(|a|, |b|, floor).
inline double relative_error(const Matrix& a, const Matrix& b, double floor = 1e-8) {
    const double denom = std::max({a.norm(), b.norm(), floor});
    return (a - b).norm() / denom;
}

}  // namespace oracle
