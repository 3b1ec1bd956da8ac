#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ssar/numerics/matrix.hpp"

namespace ssar {

// One day's recording before preprocessing: binned spike counts and hand velocity.
struct RawSession {
    std::string day_id;
    double bin_width = 0.05;  // seconds
    Matrix spike_counts;      // bins x channels, non-negative integers
    Matrix velocity;          // bins x 2, cm/s

    void validate() const;
};

// Per-channel z-score statistics (population sd). Channels whose variance is
// zero are flagged and mapped to all-zero features.
struct Normalization {
    std::vector<double> mean;
    std::vector<double> sd;
    std::vector<bool> zero_variance;

    std::size_t channels() const { return mean.size(); }
    bool operator==(const Normalization&) const = default;
};

// A preprocessed day: smoothed, z-scored features plus velocity labels.
struct Session {
    std::string day_id;
    double bin_width = 0.05;
    Matrix features;  // N x d
    Matrix velocity;  // N x 2
    Normalization normalization;

    std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t channels() const { return static_cast<std::size_t>(features.cols()); }
    void validate() const;
};

// Labels withheld from training. Every reveal() is counted so tests can prove
// that training code never reads them.
class SealedLabels {
public:
    SealedLabels() = default;
    explicit SealedLabels(Matrix labels) : labels_(std::move(labels)) {}

    const Matrix& reveal() const {
        ++reveals_;
        return labels_;
    }
    std::size_t reveal_count() const { return reveals_; }
    Eigen::Index rows() const { return labels_.rows(); }

private:
    Matrix labels_;
    mutable std::size_t reveals_ = 0;
};

struct HeldOutSet {
    Matrix features;
    SealedLabels labels;
    std::vector<std::size_t> rows;  // row indices into the target session
};

// Source day, labeled/unlabeled target rows, and the evaluation rows of one
// cross-day recalibration problem.
struct RecalibrationTask {
    Session source;
    Session labeled_target;
    Matrix unlabeled_target;
    HeldOutSet eval_target;
    std::vector<std::size_t> labeled_rows;
    std::vector<std::size_t> unlabeled_rows;
};

}  // namespace ssar
