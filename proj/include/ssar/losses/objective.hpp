#pragma once

#include <cstddef>
#include <vector>

#include "ssar/losses/mmd.hpp"
#include "ssar/losses/partition.hpp"
#include "ssar/model/decoder.hpp"

namespace ssar {

struct LossWeights {
    double alpha = 1.0;   // global alignment
    double beta = 0.1;    // speed-conditional alignment
    double gamma = 1.0;   // alignment block as a whole
    double theta = 0.01;  // feature-label consistency

    void validate() const;
};

struct LossBreakdown {
    double reg = 0.0;
    double sesa_global = 0.0;
    double sesa_conditional = 0.0;
    double ccc = 0.0;
    double total = 0.0;
    LossWeights weights;

    // reg + gamma * (alpha * global + beta * conditional) + theta * ccc
    static double combine(double reg, double global, double conditional, double ccc, const LossWeights& w);
};

struct SesaTerms {
    double global = 0.0;
    double conditional = 0.0;
    double combined = 0.0;
    std::size_t nonempty_bins = 0;
};

// Global term: MMD between all source features and all unlabeled target
// features. Conditional term: MMD between source and labeled-target features
// sharing a speed bin, averaged over bins populated on both sides.
SesaTerms sesa_loss(const SubdomainPartition& partition, const Matrix& source_features,
                    const Matrix& labeled_target_features, const Matrix& unlabeled_target_features, double alpha,
                    double beta, const BandwidthPolicy& bandwidth = {});

// Mean over ordered pairs (self-pairs included) of
//   (exp(-|f_i - f_j|^2 / 2 s_f^2) - exp(-|y_i - y_j|^2 / 2 s_y^2))^2.
double ccc_loss(const Matrix& features, const Matrix& labels, double feature_bandwidth = 1.0,
                double label_bandwidth = 1.0);
Var ccc_loss(Tape& tape, Var features, const Matrix& labels, double feature_bandwidth = 1.0,
             double label_bandwidth = 1.0);

// Mean over samples of the squared error summed across output dimensions.
double regression_loss(const Matrix& predictions, const Matrix& labels);
Var regression_loss(Tape& tape, Var predictions, const Matrix& labels);

// Per-dimension standardization of labels by source-day statistics (population sd).
struct LabelScaler {
    RowVector mean;
    RowVector sd;

    static LabelScaler fit(const Matrix& labels);
    static LabelScaler identity(Eigen::Index dims);
    Matrix apply(const Matrix& labels) const;
};

struct ObjectiveSettings {
    LossWeights weights;
    std::size_t subdomains = 8;
    BandwidthPolicy bandwidth;
    double ccc_feature_bandwidth = 1.0;
    double ccc_label_bandwidth = 1.0;
    // Adds labeled target rows to the target side of the global subdomain.
    bool star_includes_labeled_target = false;
};

// One composite mini-batch. Bins are 1-based indices from a task-level
// SpeedBins; unlabeled rows carry no labels.
struct LossBatch {
    Matrix source_x;
    Matrix source_y;
    std::vector<std::size_t> source_bins;
    Matrix labeled_x;
    Matrix labeled_y;
    std::vector<std::size_t> labeled_bins;
    Matrix unlabeled_x;
};

struct ObjectiveResult {
    LossBreakdown breakdown;
    std::vector<Matrix> gradients;  // one per parameter block; empty without gradients
    std::size_t nonempty_bins = 0;
};

// Evaluates every term on the batch. Gradients flow through the terms whose
// weight is non-zero; zero-weighted terms are still reported. Blocks outside
// `trainable` receive zero gradients. Regression and CCC compare labels in the
// decoder's standardized output units.
ObjectiveResult evaluate_objective(const DecoderParams& params, const LossBatch& batch,
                                   const ObjectiveSettings& settings, bool with_gradients = true,
                                   const std::vector<bool>& trainable = {});

LossBreakdown total_loss(const DecoderParams& params, const LossBatch& batch, const ObjectiveSettings& settings);

}  // namespace ssar
