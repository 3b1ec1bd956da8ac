#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ssar/data/session.hpp"
#include "ssar/synth/trajectories.hpp"

namespace ssar {

// Cosine-and-speed tuning of each simulated channel:
//   rate = max(0, baseline + depth * v_ref * (speed / v_ref)^exponent * cos(angle - pd))
struct TuningModel {
    std::vector<double> baseline;             // Hz
    std::vector<double> depth;                // Hz per cm/s
    std::vector<double> preferred_direction;  // radians
    std::vector<double> speed_exponent;
    double reference_speed = 10.0;            // cm/s

    std::size_t channels() const { return baseline.size(); }
    double rate(std::size_t n, double vx, double vy) const;
};

struct TuningOptions {
    double baseline_min = 1.0;
    double baseline_max = 8.0;
    double depth_min = 0.1;
    double depth_max = 0.6;
    double exponent_min = 0.5;
    double exponent_max = 1.5;
    double reference_speed = 10.0;
};

TuningModel make_tuning(std::size_t channels, std::uint64_t seed, const TuningOptions& options = {});

// Per-day perturbation, applied day_index times (drift compounds). Each
// application draws fresh per-channel noise from a stream keyed by (seed, day).
struct DriftSchedule {
    double pd_rotation = 0.0;           // radians added to every preferred direction per day
    double pd_jitter = 0.0;             // sd of per-channel extra rotation per day
    double speed_gain_scale = 0.0;      // exponent *= exp(scale * N(0,1)) per day
    double dropout_prob = 0.0;          // per-day probability a live channel goes silent
    double baseline_shift_scale = 0.0;  // baseline *= exp(scale * N(0,1)) per day
    std::uint64_t seed = 0;

    void validate() const;
};

struct DayTuning {
    TuningModel tuning;
    std::vector<bool> dropped;
};

DayTuning apply_drift(const TuningModel& tuning, const DriftSchedule& drift, std::size_t day_index);

// Spike counts ~ Poisson(rate * bin_width) for the drifted tuning of `day_index`.
// Pure function of its arguments; dropped channels emit zeros.
RawSession gen_day(const TuningModel& tuning, const DriftSchedule& drift, std::size_t day_index,
                   const Matrix& velocity, std::uint64_t seed, double bin_width = 0.05);

// Everything needed to produce a multi-day synthetic dataset.
struct SynthConfig {
    std::size_t channels = 32;
    std::size_t bins_per_day = 4000;
    std::size_t days = 4;
    ReachTask task = ReachTask::CenterOut;
    std::uint64_t seed = 0;
    double bin_width = 0.05;
    double smooth_sd = 0.1;
    ReachOptions reach;
    TuningOptions tuning;
    DriftSchedule drift;
};

// Default drift used by the CLI and the acceptance experiments.
DriftSchedule default_drift();

// Raw session for `day_index`. Distinct `replicate` values give independent
// recordings (new trajectories and spikes) under the same day's tuning.
RawSession generate_raw_day(const SynthConfig& config, std::size_t day_index, std::size_t replicate = 0);

// generate_raw_day followed by smoothing and per-day z-scoring.
Session generate_session(const SynthConfig& config, std::size_t day_index, std::size_t replicate = 0);

}  // namespace ssar
