#pragma once

#include <cstddef>
#include <vector>

#include "ssar/numerics/matrix.hpp"

namespace ssar {

// Equal-width speed bins over [v_min, v_max]. Bin i (1-based) holds speeds with
// (speed - v_min) / delta in [i-1, i); the top bin is closed. Speeds outside
// the range clamp to the nearest bin.
struct SpeedBins {
    std::size_t count = 1;
    double v_min = 0.0;
    double v_max = 0.0;
    double delta = 0.0;
    bool degenerate = false;  // v_max == v_min: everything maps to bin 1

    std::size_t bin_of(double speed) const;
    std::size_t bin_of_velocity(double vx, double vy) const;
    std::vector<std::size_t> assign(const Matrix& velocity) const;
};

struct SubdomainPartition {
    SpeedBins bins;
    std::vector<std::size_t> source_bins;          // per source row, 1..C
    std::vector<std::size_t> labeled_target_bins;  // per labeled target row, 1..C
    std::vector<std::size_t> star_source;          // global subdomain: every source row
    std::vector<std::size_t> star_target;          // global subdomain: every unlabeled target row
};

// Speed extrema over source and labeled-target labels together, then one bin
// per labeled sample. Warns when all speeds coincide.
SubdomainPartition partition_subdomains(const Matrix& source_labels, const Matrix& labeled_target_labels,
                                        std::size_t subdomains, std::size_t unlabeled_count = 0);

}  // namespace ssar
