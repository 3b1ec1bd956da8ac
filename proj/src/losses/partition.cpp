#include "ssar/losses/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ssar/diagnostics.hpp"

namespace ssar {

std::size_t SpeedBins::bin_of(double speed) const {
    if (degenerate) return 1;
    const double u = (speed - v_min) / delta;
    const double b = u > 0.0 ? std::floor(u) + 1.0 : 1.0;
    std::size_t k = b >= static_cast<double>(count) ? count : static_cast<std::size_t>(b);
    // The quotient can land one bin off the rounded edges when the range spans a few ulps.
    while (k < count && speed >= v_min + static_cast<double>(k) * delta) ++k;
    while (k > 1 && speed < v_min + static_cast<double>(k - 1) * delta) --k;
    return k;
}

std::size_t SpeedBins::bin_of_velocity(double vx, double vy) const {
    return bin_of(std::hypot(vx, vy));
}

std::vector<std::size_t> SpeedBins::assign(const Matrix& velocity) const {
    std::vector<std::size_t> out(static_cast<std::size_t>(velocity.rows()));
    for (Eigen::Index r = 0; r < velocity.rows(); ++r) {
        out[static_cast<std::size_t>(r)] = bin_of_velocity(velocity(r, 0), velocity(r, 1));
    }
    return out;
}

SubdomainPartition partition_subdomains(const Matrix& source_labels, const Matrix& labeled_target_labels,
                                        std::size_t subdomains, std::size_t unlabeled_count) {
    if (subdomains < 1) throw std::invalid_argument("partition_subdomains: C must be >= 1");
    if (source_labels.rows() + labeled_target_labels.rows() == 0) {
        throw std::invalid_argument("partition_subdomains: need at least one labeled sample");
    }
    for (const Matrix* m : {&source_labels, &labeled_target_labels}) {
        if (m->rows() > 0 && m->cols() != 2) throw std::invalid_argument("partition_subdomains: labels must be 2-D");
    }

    SpeedBins bins;
    bins.count = subdomains;
    bins.v_min = std::numeric_limits<double>::infinity();
    bins.v_max = -std::numeric_limits<double>::infinity();
    for (const Matrix* m : {&source_labels, &labeled_target_labels}) {
        for (Eigen::Index r = 0; r < m->rows(); ++r) {
            const double s = std::hypot((*m)(r, 0), (*m)(r, 1));
            bins.v_min = std::min(bins.v_min, s);
            bins.v_max = std::max(bins.v_max, s);
        }
    }
    bins.delta = (bins.v_max - bins.v_min) / static_cast<double>(subdomains);
    if (!(bins.delta > 0.0)) {
        bins.degenerate = true;
        bins.delta = 0.0;
        warn("partition_subdomains: all labeled speeds are equal; every sample assigned to bin 1");
    }

    SubdomainPartition p;
    p.bins = bins;
    p.source_bins = bins.assign(source_labels);
    p.labeled_target_bins = bins.assign(labeled_target_labels);
    p.star_source.resize(static_cast<std::size_t>(source_labels.rows()));
    std::iota(p.star_source.begin(), p.star_source.end(), std::size_t{0});
    p.star_target.resize(unlabeled_count);
    std::iota(p.star_target.begin(), p.star_target.end(), std::size_t{0});
    return p;
}

}  // namespace ssar
