#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ssar/numerics/matrix.hpp"

namespace ssar {

struct AdamHyper {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 5e-4;
};

struct AdamState {
    AdamHyper hyper;
    std::vector<Matrix> first_moment;
    std::vector<Matrix> second_moment;
    std::uint64_t step = 0;

    // Zeroed moments shaped like `params`.
    static AdamState zeros_like(std::span<const Matrix> params, AdamHyper hyper = {});
};

// One Adam update with bias correction. Weight decay enters as the coupled
// gradient term weight_decay * param. Blocks with update_mask[i] == false are
// left untouched (their moments too). `names` labels blocks in error messages.
void adam_step(std::span<Matrix> params, std::span<const Matrix> grads, AdamState& state,
               std::span<const std::string> names = {}, const std::vector<bool>& update_mask = {});

}  // namespace ssar
