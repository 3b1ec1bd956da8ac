#include "ssar/synth/generator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ssar/data/preprocess.hpp"
#include "ssar/numerics/random.hpp"

namespace ssar {

double TuningModel::rate(std::size_t n, double vx, double vy) const {
    const double speed = std::hypot(vx, vy);
    if (speed == 0.0) return std::max(0.0, baseline[n]);
    const double angle = std::atan2(vy, vx);
    const double gain = reference_speed * std::pow(speed / reference_speed, speed_exponent[n]);
    return std::max(0.0, baseline[n] + depth[n] * gain * std::cos(angle - preferred_direction[n]));
}

TuningModel make_tuning(std::size_t channels, std::uint64_t seed, const TuningOptions& options) {
    if (channels < 1) throw std::invalid_argument("make_tuning: channels must be >= 1");
    if (options.baseline_min < 0.0) throw std::invalid_argument("make_tuning: baseline must be >= 0");
    Rng rng(seed);
    TuningModel t;
    t.reference_speed = options.reference_speed;
    for (std::size_t n = 0; n < channels; ++n) {
        t.baseline.push_back(rng.uniform(options.baseline_min, options.baseline_max));
        t.depth.push_back(rng.uniform(options.depth_min, options.depth_max));
        t.preferred_direction.push_back(rng.uniform(-std::numbers::pi, std::numbers::pi));
        t.speed_exponent.push_back(rng.uniform(options.exponent_min, options.exponent_max));
    }
    return t;
}

void DriftSchedule::validate() const {
    if (!(dropout_prob >= 0.0 && dropout_prob <= 1.0)) {
        throw std::invalid_argument("drift: dropout probability must be in [0, 1]");
    }
    if (pd_jitter < 0.0 || speed_gain_scale < 0.0 || baseline_shift_scale < 0.0) {
        throw std::invalid_argument("drift: scales must be non-negative");
    }
}

DayTuning apply_drift(const TuningModel& tuning, const DriftSchedule& drift, std::size_t day_index) {
    drift.validate();
    DayTuning day{tuning, std::vector<bool>(tuning.channels(), false)};
    TuningModel& t = day.tuning;
    for (std::size_t step = 1; step <= day_index; ++step) {
        Rng rng(derive_seed(drift.seed, step));
        for (std::size_t n = 0; n < t.channels(); ++n) {
            const double e_pd = rng.normal();
            const double e_gain = rng.normal();
            const double e_base = rng.normal();
            const bool drop = rng.bernoulli(drift.dropout_prob);
            t.preferred_direction[n] += drift.pd_rotation + drift.pd_jitter * e_pd;
            t.speed_exponent[n] *= std::exp(drift.speed_gain_scale * e_gain);
            t.baseline[n] *= std::exp(drift.baseline_shift_scale * e_base);
            if (drop) day.dropped[n] = true;
        }
    }
    return day;
}

RawSession gen_day(const TuningModel& tuning, const DriftSchedule& drift, std::size_t day_index,
                   const Matrix& velocity, std::uint64_t seed, double bin_width) {
    if (velocity.cols() != 2) throw std::invalid_argument("gen_day: velocity must have 2 columns");
    const DayTuning day = apply_drift(tuning, drift, day_index);
    std::size_t live = 0;
    for (bool d : day.dropped) live += d ? 0 : 1;
    if (live == 0) throw std::invalid_argument("gen_day: every channel dropped on day " + std::to_string(day_index));

    RawSession raw;
    raw.day_id = "day" + std::to_string(day_index);
    raw.bin_width = bin_width;
    raw.velocity = velocity;
    raw.spike_counts = Matrix::Zero(velocity.rows(), static_cast<Eigen::Index>(tuning.channels()));
    Rng rng(seed);
    for (Eigen::Index r = 0; r < velocity.rows(); ++r) {
        for (std::size_t n = 0; n < tuning.channels(); ++n) {
            const double lambda = day.tuning.rate(n, velocity(r, 0), velocity(r, 1)) * bin_width;
            // Draw even for dropped channels so the stream stays aligned across drift settings.
            const auto count = rng.poisson(lambda);
            if (!day.dropped[n]) raw.spike_counts(r, static_cast<Eigen::Index>(n)) = static_cast<double>(count);
        }
    }
    return raw;
}

DriftSchedule default_drift() {
    DriftSchedule d;
    d.pd_rotation = 0.0;
    d.pd_jitter = 1.5;
    d.speed_gain_scale = 0.8;
    d.dropout_prob = 0.3;
    d.baseline_shift_scale = 0.5;
    d.seed = 7;
    return d;
}

RawSession generate_raw_day(const SynthConfig& config, std::size_t day_index, std::size_t replicate) {
    const std::uint64_t tuning_seed = derive_seed(config.seed, 0);
    const std::uint64_t day_stream = 1 + 2 * (day_index * 1000 + replicate);
    const TuningModel tuning = make_tuning(config.channels, tuning_seed, config.tuning);
    ReachOptions reach = config.reach;
    reach.bin_width = config.bin_width;
    const Matrix velocity = gen_velocity(config.bins_per_day, config.task, derive_seed(config.seed, day_stream), reach);
    DriftSchedule drift = config.drift;
    drift.seed = derive_seed(config.seed ^ config.drift.seed, 0xD1F7);
    RawSession raw = gen_day(tuning, drift, day_index, velocity, derive_seed(config.seed, day_stream + 1),
                             config.bin_width);
    if (replicate > 0) raw.day_id += "_rep" + std::to_string(replicate);
    return raw;
}

Session generate_session(const SynthConfig& config, std::size_t day_index, std::size_t replicate) {
    return preprocess(generate_raw_day(config, day_index, replicate), config.smooth_sd);
}

}  // namespace ssar
