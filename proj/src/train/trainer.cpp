#include "ssar/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ssar/diagnostics.hpp"
#include "ssar/numerics/random.hpp"
#include "ssar/train/batches.hpp"

namespace ssar {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (batch_size < 2) throw std::invalid_argument("train: batch_size must be >= 2");
    if (objective.subdomains < 1) throw std::invalid_argument("train: subdomain count must be >= 1");
    objective.weights.validate();
    if (!(optimizer.lr > 0.0)) throw std::invalid_argument("train: lr must be > 0");
}

LossWeights naive_weights(LossWeights base) {
    base.gamma = 0.0;
    base.theta = 0.0;
    return base;
}

LossWeights global_mmd_weights(LossWeights base) {
    base.beta = 0.0;
    base.theta = 0.0;
    return base;
}

namespace {

// The three row pools a training run draws batches from.
struct Pools {
    const Matrix* source_x = nullptr;
    const Matrix* source_y = nullptr;
    std::vector<std::size_t> source_bins;
    const Matrix* labeled_x = nullptr;
    const Matrix* labeled_y = nullptr;
    std::vector<std::size_t> labeled_bins;
    const Matrix* unlabeled_x = nullptr;
};

template <typename T>
std::vector<T> pick(const std::vector<T>& values, const std::vector<std::size_t>& rows) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(values[r]);
    return out;
}

LossBatch assemble(const Pools& pools, const CompositeBatch& b) {
    LossBatch batch;
    batch.source_x = gather_rows(*pools.source_x, b.source);
    batch.source_y = gather_rows(*pools.source_y, b.source);
    batch.source_bins = pick(pools.source_bins, b.source);
    batch.labeled_x = gather_rows(*pools.labeled_x, b.labeled);
    batch.labeled_y = gather_rows(*pools.labeled_y, b.labeled);
    batch.labeled_bins = pick(pools.labeled_bins, b.labeled);
    batch.unlabeled_x = gather_rows(*pools.unlabeled_x, b.unlabeled);
    return batch;
}

const char* first_non_finite(const LossBreakdown& b) {
    if (!std::isfinite(b.reg)) return "reg";
    if (!std::isfinite(b.sesa_global)) return "sesa_global";
    if (!std::isfinite(b.sesa_conditional)) return "sesa_conditional";
    if (!std::isfinite(b.ccc)) return "ccc";
    if (!std::isfinite(b.total)) return "total";
    return nullptr;
}

void accumulate(LossBreakdown& acc, const LossBreakdown& b) {
    acc.reg += b.reg;
    acc.sesa_global += b.sesa_global;
    acc.sesa_conditional += b.sesa_conditional;
    acc.ccc += b.ccc;
    acc.total += b.total;
}

void set_label_normalization(DecoderParams& params, const Matrix& labels) {
    const LabelScaler s = LabelScaler::fit(labels);
    params.set_output_normalization(s.mean, s.sd);
}

TrainResult run_training(DecoderParams params, const Pools& pools, const TrainConfig& config,
                         const std::vector<bool>& trainable, const TrainHooks& hooks) {
    config.validate();
    const std::size_t ns = static_cast<std::size_t>(pools.source_x->rows());
    const std::size_t nl = static_cast<std::size_t>(pools.labeled_x->rows());
    const std::size_t nu = static_cast<std::size_t>(pools.unlabeled_x->rows());
    const std::uint64_t batch_seed = derive_seed(config.seed, 2);

    AdamState adam = AdamState::zeros_like(params.blocks(), config.optimizer);
    TrainResult result;
    std::size_t step = 0;
    bool warned_bins = false;
    const bool conditional_on = config.objective.weights.beta > 0.0 && config.objective.weights.gamma > 0.0;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto batches = make_batches(ns, nl, nu, config.batch_size, batch_seed, epoch);
        EpochSummary summary;
        summary.epoch = epoch;
        summary.mean_loss.weights = config.objective.weights;
        std::size_t counted = 0;
        for (const CompositeBatch& cb : batches) {
            if (cb.source.size() + cb.labeled.size() == 0) continue;
            const auto t0 = std::chrono::steady_clock::now();
            ++step;
            const LossBatch batch = assemble(pools, cb);
            ObjectiveResult obj = evaluate_objective(params, batch, config.objective, true, trainable);
            if (const char* term = first_non_finite(obj.breakdown)) {
                throw TrainingDiverged("non-finite loss term '" + std::string(term) + "' at epoch " +
                                           std::to_string(epoch) + " step " + std::to_string(step),
                                       params);
            }
            if (conditional_on && nl > 0 && obj.nonempty_bins == 0 && !warned_bins) {
                warn("training: a batch had no speed bin populated by both source and labeled target rows");
                warned_bins = true;
            }
            // adam_step validates every gradient before touching params.
            try {
                adam_step(params.blocks(), obj.gradients, adam, DecoderParams::block_names(), trainable);
            } catch (const std::invalid_argument& e) {
                throw TrainingDiverged(std::string(e.what()) + " at epoch " + std::to_string(epoch), params);
            }
            TrainLogRecord rec;
            rec.epoch = epoch;
            rec.step = step;
            rec.loss = obj.breakdown;
            rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            if (hooks.on_step) hooks.on_step(rec);
            if (config.keep_step_log) result.log.push_back(rec);
            accumulate(summary.mean_loss, obj.breakdown);
            ++counted;
        }
        if (counted > 0) {
            const double inv = 1.0 / static_cast<double>(counted);
            summary.mean_loss.reg *= inv;
            summary.mean_loss.sesa_global *= inv;
            summary.mean_loss.sesa_conditional *= inv;
            summary.mean_loss.ccc *= inv;
            summary.mean_loss.total *= inv;
        }
        result.epochs.push_back(summary);
        if (config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0 && hooks.on_checkpoint) {
            hooks.on_checkpoint(epoch, params);
        }
    }
    result.params = std::move(params);
    return result;
}

}  // namespace

TrainResult pretrain_source(const Session& source, const TrainConfig& config, const TrainHooks& hooks) {
    if (source.rows() == 0) throw std::invalid_argument("pretrain_source: empty source session");
    TrainConfig cfg = config;
    cfg.objective.weights = naive_weights(cfg.objective.weights);

    const Matrix empty_x(0, source.features.cols());
    const Matrix empty_y(0, 2);
    Pools pools;
    pools.source_x = &source.features;
    pools.source_y = &source.velocity;
    pools.source_bins = std::vector<std::size_t>(source.rows(), 1);
    pools.labeled_x = &empty_x;
    pools.labeled_y = &empty_y;
    pools.unlabeled_x = &empty_x;

    DecoderParams init = init_decoder(derive_seed(cfg.seed, 1), source.channels(), cfg.relu_after_last);
    set_label_normalization(init, source.velocity);
    return run_training(std::move(init), pools, cfg, {}, hooks);
}

TrainResult recalibrate_ssar(const RecalibrationTask& task, const TrainConfig& config, const TrainHooks& hooks,
                             const DecoderParams* warm_start_params) {
    const Session& src = task.source;
    if (src.rows() == 0) throw std::invalid_argument("recalibrate_ssar: empty source session");
    if (task.unlabeled_target.cols() != src.features.cols() ||
        (task.labeled_target.rows() > 0 && task.labeled_target.channels() != src.channels())) {
        throw std::invalid_argument("recalibrate_ssar: source and target channel counts differ");
    }

    const SubdomainPartition partition = partition_subdomains(
        src.velocity, task.labeled_target.velocity, config.objective.subdomains,
        static_cast<std::size_t>(task.unlabeled_target.rows()));

    Matrix labeled_x = task.labeled_target.features;
    Matrix labeled_y = task.labeled_target.velocity;
    if (labeled_x.rows() == 0) {
        labeled_x.resize(0, src.features.cols());
        labeled_y.resize(0, 2);
    }
    Pools pools;
    pools.source_x = &src.features;
    pools.source_y = &src.velocity;
    pools.source_bins = partition.source_bins;
    pools.labeled_x = &labeled_x;
    pools.labeled_y = &labeled_y;
    pools.labeled_bins = partition.labeled_target_bins;
    pools.unlabeled_x = &task.unlabeled_target;

    DecoderParams init;
    if (config.warm_start) {
        if (warm_start_params == nullptr) throw std::invalid_argument("recalibrate_ssar: warm start needs source params");
        init = *warm_start_params;
    } else {
        init = init_decoder(derive_seed(config.seed, 1), src.channels(), config.relu_after_last);
        set_label_normalization(init, src.velocity);
    }
    return run_training(std::move(init), pools, config, {}, hooks);
}

TrainResult train_extractor_frozen_regressor(const Session& target, const DecoderParams& frozen,
                                             const TrainConfig& config, const TrainHooks& hooks) {
    if (target.rows() == 0) throw std::invalid_argument("train_extractor_frozen_regressor: empty target");
    if (frozen.input_dim() != target.channels()) {
        throw std::invalid_argument("train_extractor_frozen_regressor: decoder input_dim does not match target");
    }
    TrainConfig cfg = config;
    cfg.objective.weights = naive_weights(cfg.objective.weights);

    const Matrix empty_x(0, target.features.cols());
    const Matrix empty_y(0, 2);
    Pools pools;
    pools.source_x = &target.features;
    pools.source_y = &target.velocity;
    pools.source_bins = std::vector<std::size_t>(target.rows(), 1);
    pools.labeled_x = &empty_x;
    pools.labeled_y = &empty_y;
    pools.unlabeled_x = &empty_x;

    DecoderParams init = init_decoder(derive_seed(cfg.seed, 3), target.channels(), frozen.relu_after_last());
    init.weight(3) = frozen.weight(3);
    init.bias(3) = frozen.bias(3);
    init.set_output_normalization(frozen.output_mean(), frozen.output_scale());
    return run_training(std::move(init), pools, cfg, DecoderParams::extractor_mask(), hooks);
}

}  // namespace ssar
