#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "ssar/data/session.hpp"
#include "ssar/error.hpp"
#include "ssar/losses/objective.hpp"
#include "ssar/model/decoder.hpp"
#include "ssar/numerics/adam.hpp"

namespace ssar {

struct TrainConfig {
    std::size_t epochs = 500;
    std::size_t batch_size = 128;
    AdamHyper optimizer;
    ObjectiveSettings objective;
    std::uint64_t seed = 0;
    bool relu_after_last = true;
    // Start recalibration from the supplied source decoder instead of a random init.
    bool warm_start = false;
    // Emit a checkpoint every K epochs (0 disables).
    std::size_t checkpoint_every = 0;
    // Keep one log record per step in TrainResult::log.
    bool keep_step_log = true;

    void validate() const;
};

struct TrainLogRecord {
    std::size_t epoch = 0;  // 1-based
    std::size_t step = 0;   // 1-based, global across epochs
    LossBreakdown loss;
    double wall_ms = 0.0;
};

struct EpochSummary {
    std::size_t epoch = 0;
    LossBreakdown mean_loss;  // step-averaged terms
};

struct TrainResult {
    DecoderParams params;
    std::vector<TrainLogRecord> log;
    std::vector<EpochSummary> epochs;
};

struct TrainHooks {
    std::function<void(const TrainLogRecord&)> on_step;
    std::function<void(std::size_t epoch, const DecoderParams&)> on_checkpoint;
};

// Raised when any loss term turns non-finite. Carries the last parameters for
// which every term was finite.
class TrainingDiverged : public DivergenceError {
public:
    TrainingDiverged(const std::string& what, DecoderParams last_finite)
        : DivergenceError(what), last_finite_(std::move(last_finite)) {}
    const DecoderParams& last_finite() const { return last_finite_; }

private:
    DecoderParams last_finite_;
};

// Supervised source-day training: regression loss only, source rows only.
TrainResult pretrain_source(const Session& source, const TrainConfig& config, const TrainHooks& hooks = {});

// Trains on the full recalibration objective from a random init (or from
// `warm_start_params` when config.warm_start is set). Never reads eval labels.
TrainResult recalibrate_ssar(const RecalibrationTask& task, const TrainConfig& config, const TrainHooks& hooks = {},
                             const DecoderParams* warm_start_params = nullptr);

// Trains a fresh extractor on labeled target data while the regressor stays
// fixed to `frozen`'s regressor (used by the feature-distribution probe).
TrainResult train_extractor_frozen_regressor(const Session& target, const DecoderParams& frozen,
                                             const TrainConfig& config, const TrainHooks& hooks = {});

// Named weight masks for the baselines.
LossWeights naive_weights(LossWeights base);       // gamma = theta = 0
LossWeights global_mmd_weights(LossWeights base);  // beta = theta = 0

}  // namespace ssar
