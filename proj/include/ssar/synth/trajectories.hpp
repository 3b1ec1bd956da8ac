#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ssar/numerics/matrix.hpp"

namespace ssar {

enum class ReachTask { CenterOut, RandomTarget };

ReachTask parse_reach_task(const std::string& name);
std::string to_string(ReachTask task);

struct ReachOptions {
    double bin_width = 0.05;     // seconds
    double min_distance = 4.0;   // cm
    double max_distance = 14.0;  // cm
    double min_duration = 0.5;   // seconds
    double max_duration = 1.5;   // seconds
};

struct Trajectories {
    Matrix velocity;                      // bins x 2, cm/s
    std::vector<std::size_t> trial_start;  // first bin of each trial
    std::vector<double> trial_angle;      // reach direction, radians
};

// Concatenated point-to-point reaches with minimum-jerk (bell-shaped) speed
// profiles, sampled at bin centers. Center-out trials cycle through 8
// directions 45 degrees apart (shuffled within each block of 8); random-target
// trials draw a uniform direction.
Trajectories gen_trajectories(std::size_t n_trials, ReachTask task, std::uint64_t seed,
                              const ReachOptions& options = {});

// Enough trials to cover `bins`, truncated to exactly that many rows.
Matrix gen_velocity(std::size_t bins, ReachTask task, std::uint64_t seed, const ReachOptions& options = {});

}  // namespace ssar
