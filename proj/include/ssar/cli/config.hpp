#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssar/data/split.hpp"
#include "ssar/losses/objective.hpp"
#include "ssar/numerics/adam.hpp"
#include "ssar/synth/generator.hpp"
#include "ssar/train/trainer.hpp"

namespace ssar::cli {

// Either two session stems on disk or a synthetic dataset generated in memory.
struct DataSection {
    std::string source;  // session stem; empty selects the synthetic generator
    std::string target;
    SynthConfig synth;
    std::size_t source_day = 0;
    std::size_t target_day = 1;

    bool uses_files() const { return !source.empty(); }
};

struct ModelSection {
    std::size_t input_dim = 0;  // 0 = take from the data
    bool relu_after_last = true;
};

struct HyperSection {
    LossWeights weights;
    std::size_t subdomains = 8;
    BandwidthPolicy bandwidth;
};

struct TrainSection {
    std::size_t epochs = 500;
    std::size_t batch_size = 128;
    AdamHyper optimizer;
    bool warm_start = false;
    std::size_t checkpoint_every = 0;
};

struct RunSection {
    std::vector<std::uint64_t> seeds{0};
    std::string output_dir;  // empty: $SSAR_OUTPUT_DIR/<command>, else ./ssar_output/<command>
    std::size_t jobs = 1;
};

struct ExperimentConfig {
    DataSection data;
    SplitOptions split;
    ModelSection model;
    HyperSection hyper;
    TrainSection train;
    RunSection run;

    void validate() const;  // throws ConfigError

    TrainConfig train_config(std::uint64_t seed) const;
    // The split permutation depends on both split.seed and the run seed.
    SplitOptions split_options(std::uint64_t seed) const;
};

// Strict parse: unknown keys, wrong types and out-of-range values raise
// ConfigError naming the offending key path. Missing keys keep their defaults.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

nlohmann::json to_json(const SynthConfig& synth);

}  // namespace ssar::cli
