#pragma once

#include <cstdint>

#include "ssar/data/session.hpp"

namespace ssar {

struct SplitOptions {
    double labeled_fraction = 0.10;
    // 0 means the evaluation rows are the unlabeled rows, with their labels sealed.
    double eval_fraction = 0.0;
    std::uint64_t seed = 0;
};

// Randomly partitions `target` into evaluation, labeled and unlabeled rows.
//
// One permutation is drawn per seed; evaluation rows take its head, labeled
// rows the next block and unlabeled rows the rest. For a fixed seed the
// evaluation rows therefore do not depend on labeled_fraction.
RecalibrationTask split_target(const Session& source, const Session& target, const SplitOptions& options,
                               bool conditional_alignment_enabled = true);

// Number of rows a fraction selects out of n (rounded to nearest).
std::size_t fraction_count(std::size_t n, double fraction);

}  // namespace ssar
