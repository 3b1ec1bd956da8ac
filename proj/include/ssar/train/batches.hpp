#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ssar {

// Row indices (into each pool) making up one mini-batch.
struct CompositeBatch {
    std::vector<std::size_t> source;
    std::vector<std::size_t> labeled;
    std::vector<std::size_t> unlabeled;

    std::size_t size() const { return source.size() + labeled.size() + unlabeled.size(); }
};

// Per-batch quota of each pool, proportional to pool sizes, by largest
// remainder. Every non-empty pool gets at least one row.
std::array<std::size_t, 3> batch_quota(std::size_t n_source, std::size_t n_labeled, std::size_t n_unlabeled,
                                       std::size_t batch_size);

// Splits one epoch into ceil(total / batch_size) composite batches. Each pool
// is shuffled from (seed, epoch) and consumed at its quota per batch; the last
// batch takes whatever remains, so every row appears exactly once per epoch.
std::vector<CompositeBatch> make_batches(std::size_t n_source, std::size_t n_labeled, std::size_t n_unlabeled,
                                         std::size_t batch_size, std::uint64_t seed, std::size_t epoch);

}  // namespace ssar
