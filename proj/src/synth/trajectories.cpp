#include "ssar/synth/trajectories.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ssar/numerics/random.hpp"

namespace ssar {

ReachTask parse_reach_task(const std::string& name) {
    if (name == "center_out") return ReachTask::CenterOut;
    if (name == "random_target") return ReachTask::RandomTarget;
    throw std::invalid_argument("unknown reach task '" + name + "' (expected center_out or random_target)");
}

std::string to_string(ReachTask task) {
    return task == ReachTask::CenterOut ? "center_out" : "random_target";
}

Trajectories gen_trajectories(std::size_t n_trials, ReachTask task, std::uint64_t seed,
                              const ReachOptions& options) {
    if (n_trials < 1) throw std::invalid_argument("gen_trajectories: n_trials must be >= 1");
    if (!(options.bin_width > 0.0) || !(options.min_duration > 0.0) ||
        options.max_duration < options.min_duration || options.max_distance < options.min_distance) {
        throw std::invalid_argument("gen_trajectories: invalid reach options");
    }
    Rng rng(seed);
    std::vector<std::size_t> block;

    Trajectories out;
    std::vector<double> vx;
    std::vector<double> vy;
    for (std::size_t trial = 0; trial < n_trials; ++trial) {
        double angle = 0.0;
        if (task == ReachTask::CenterOut) {
            if (trial % 8 == 0) block = rng.permutation(8);
            angle = static_cast<double>(block[trial % 8]) * std::numbers::pi / 4.0;
        } else {
            angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
        }
        const double distance = rng.uniform(options.min_distance, options.max_distance);
        const double duration = rng.uniform(options.min_duration, options.max_duration);
        const auto bins = std::max<std::size_t>(
            4, static_cast<std::size_t>(std::lround(duration / options.bin_width)));
        const double span = static_cast<double>(bins) * options.bin_width;

        out.trial_start.push_back(vx.size());
        out.trial_angle.push_back(angle);
        for (std::size_t j = 0; j < bins; ++j) {
            // Minimum-jerk speed at normalized time tau: (D/T) * 30 tau^2 (1 - tau)^2.
            const double tau = (static_cast<double>(j) + 0.5) / static_cast<double>(bins);
            const double speed = distance / span * 30.0 * tau * tau * (1.0 - tau) * (1.0 - tau);
            vx.push_back(speed * std::cos(angle));
            vy.push_back(speed * std::sin(angle));
        }
    }
    out.velocity.resize(static_cast<Eigen::Index>(vx.size()), 2);
    for (std::size_t i = 0; i < vx.size(); ++i) {
        out.velocity(static_cast<Eigen::Index>(i), 0) = vx[i];
        out.velocity(static_cast<Eigen::Index>(i), 1) = vy[i];
    }
    return out;
}

Matrix gen_velocity(std::size_t bins, ReachTask task, std::uint64_t seed, const ReachOptions& options) {
    if (bins < 1) throw std::invalid_argument("gen_velocity: bins must be >= 1");
    const double mean_bins = 0.5 * (options.min_duration + options.max_duration) / options.bin_width;
    std::size_t trials = static_cast<std::size_t>(static_cast<double>(bins) / std::max(1.0, mean_bins)) + 8;
    while (true) {
        Trajectories t = gen_trajectories(trials, task, seed, options);
        if (t.velocity.rows() >= static_cast<Eigen::Index>(bins)) {
            return t.velocity.topRows(static_cast<Eigen::Index>(bins));
        }
        trials *= 2;
    }
}

}  // namespace ssar
