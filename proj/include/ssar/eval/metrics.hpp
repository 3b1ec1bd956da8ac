#pragma once

#include <cstddef>
#include <vector>

#include "ssar/data/session.hpp"
#include "ssar/model/decoder.hpp"

namespace ssar {

// Multi-output metrics are computed per output dimension and averaged.
inline constexpr const char* kMetricConvention = "per-dimension mean over (vx, vy)";

struct DimensionScores {
    std::vector<double> per_dim;
    double mean = 0.0;
};

// Pearson correlation per column. Throws std::invalid_argument when a column
// of either input has zero variance or fewer than 2 rows are given.
DimensionScores pearson_cc(const Matrix& truth, const Matrix& predicted);

// 1 - SS_res / SS_tot per column; can be negative. Throws when a truth column
// has zero variance.
DimensionScores r_squared(const Matrix& truth, const Matrix& predicted);

struct MetricReport {
    double cc = 0.0;
    double r2 = 0.0;
    std::vector<double> cc_per_dim;
    std::vector<double> r2_per_dim;
    std::size_t n_eval = 0;
};

MetricReport score_predictions(const Matrix& truth, const Matrix& predicted);

// Predicts on the task's evaluation features and only then unseals the labels.
MetricReport evaluate(const DecoderParams& params, const RecalibrationTask& task);

// Metrics on an arbitrary labeled session.
MetricReport evaluate_session(const DecoderParams& params, const Session& session);

// Spearman rank correlation between pairwise feature distances and pairwise
// label distances over all unordered pairs. Needs >= 3 rows; throws when
// either distance list is constant.
double consistency_score(const Matrix& features, const Matrix& labels);

}  // namespace ssar
