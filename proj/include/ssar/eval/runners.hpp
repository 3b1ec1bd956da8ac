#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssar/eval/metrics.hpp"
#include "ssar/train/trainer.hpp"

namespace ssar {

struct SeededTask {
    std::uint64_t seed = 0;
    RecalibrationTask task;
};

struct RunOptions {
    std::size_t jobs = 1;  // independent cells trained concurrently
    std::function<void(const std::string&)> progress;
};

// Which alignment terms are switched on; an "off" term has its weight set to 0.
struct VariantMask {
    bool global = true;       // alpha
    bool conditional = true;  // beta
    bool contrastive = true;  // theta

    LossWeights apply(LossWeights base) const;
    std::string label() const;  // e.g. "SSAR(beta=0,theta=0)"
};

// The eight on/off combinations, ordered none, C, S, G, G+S, G+C, S+C, full.
const std::array<VariantMask, 8>& ablation_variants();

struct CellResult {
    std::string variant;
    double value = 0.0;  // sweep coordinate; 0 for ablations
    std::uint64_t seed = 0;
    MetricReport report;
};

struct AblationRow {
    VariantMask mask;
    std::vector<CellResult> cells;  // one per seed, in input order
    double median_cc = 0.0;
    double median_r2 = 0.0;
};

std::vector<AblationRow> run_ablation(std::span<const SeededTask> tasks, const TrainConfig& base,
                                      const RunOptions& options = {});

enum class SweepAxis { TimeSpan, LabeledFraction };
SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);

// Builds the task for one sweep coordinate and seed. All values for a seed must
// share the same source session.
using TaskFactory = std::function<RecalibrationTask(double value, std::uint64_t seed)>;

inline constexpr std::array<const char*, 4> kSweepMethods{"ssar", "naive", "mmd", "uncalibrated"};

struct SweepReport {
    SweepAxis axis = SweepAxis::LabeledFraction;
    std::vector<double> values;
    std::vector<CellResult> cells;

    // Median over seeds of a method's metric at one value.
    double median_cc(const std::string& method, double value) const;
    double median_r2(const std::string& method, double value) const;
};

// For each value and seed: trains full SSAR, NaiveDecoder and the global-MMD
// baseline on the factory's task, and scores a source-only decoder
// ("uncalibrated") trained once per seed.
SweepReport run_sweep(SweepAxis axis, std::span<const double> values, std::span<const std::uint64_t> seeds,
                      const TrainConfig& base, const TaskFactory& factory, const RunOptions& options = {});

double median(std::vector<double> values);

nlohmann::json metrics_json(const MetricReport& m);

void write_ablation_reports(const std::vector<AblationRow>& rows, const std::filesystem::path& json_path,
                            const std::filesystem::path& csv_path);
void write_sweep_reports(const SweepReport& report, const std::filesystem::path& json_path,
                         const std::filesystem::path& csv_path);

}  // namespace ssar
