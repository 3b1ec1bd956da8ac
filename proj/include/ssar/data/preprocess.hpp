#pragma once

#include "ssar/data/session.hpp"

namespace ssar {

// Convolves each channel with a Gaussian of standard deviation `sd_seconds`,
// sampled at bin centers and truncated at +-4 sd. Near the edges the kernel is
// renormalized over the taps that fall inside the recording. Output is in
// spike counts per bin.
Matrix gaussian_smooth(const Matrix& counts, double bin_width, double sd_seconds = 0.1);
Matrix gaussian_smooth(const RawSession& raw, double sd_seconds = 0.1);

struct ZScored {
    Matrix features;
    Normalization normalization;
};

// Column-wise z-score with the population standard deviation.
ZScored zscore(const Matrix& rates);

// Re-applies stored statistics to new rates.
Matrix apply_normalization(const Matrix& rates, const Normalization& norm);

// smooth -> zscore on the day's own statistics.
Session preprocess(const RawSession& raw, double smooth_sd_seconds = 0.1);

}  // namespace ssar
