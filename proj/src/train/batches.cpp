#include "ssar/train/batches.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "ssar/numerics/random.hpp"

namespace ssar {

std::array<std::size_t, 3> batch_quota(std::size_t n_source, std::size_t n_labeled, std::size_t n_unlabeled,
                                       std::size_t batch_size) {
    if (batch_size < 2) throw std::invalid_argument("make_batches: batch_size must be >= 2");
    const std::array<std::size_t, 3> sizes{n_source, n_labeled, n_unlabeled};
    const std::size_t total = n_source + n_labeled + n_unlabeled;
    std::array<std::size_t, 3> quota{0, 0, 0};
    if (total == 0) return quota;
    const std::size_t target = std::min(batch_size, total);

    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double exact = static_cast<double>(target) * static_cast<double>(sizes[i]) / static_cast<double>(total);
        quota[i] = static_cast<std::size_t>(exact);
        remainder[i] = exact - static_cast<double>(quota[i]);
        assigned += quota[i];
    }
    // Largest remainder; ties go to the earlier pool.
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < target; k = (k + 1) % 3) {
        if (sizes[order[k]] > quota[order[k]]) {
            ++quota[order[k]];
            ++assigned;
        }
    }
    // Non-empty pools contribute at least one row, taken from the largest quota.
    for (std::size_t i = 0; i < 3; ++i) {
        if (sizes[i] > 0 && quota[i] == 0) {
            const auto largest = static_cast<std::size_t>(std::max_element(quota.begin(), quota.end()) - quota.begin());
            if (quota[largest] > 1) --quota[largest];
            quota[i] = 1;
        }
    }
    return quota;
}

std::vector<CompositeBatch> make_batches(std::size_t n_source, std::size_t n_labeled, std::size_t n_unlabeled,
                                         std::size_t batch_size, std::uint64_t seed, std::size_t epoch) {
    const auto quota = batch_quota(n_source, n_labeled, n_unlabeled, batch_size);
    const std::size_t total = n_source + n_labeled + n_unlabeled;
    if (total == 0) return {};
    const std::size_t n_batches = (total + batch_size - 1) / batch_size;

    Rng rng(derive_seed(seed, epoch));
    std::array<std::vector<std::size_t>, 3> pools{rng.permutation(n_source), rng.permutation(n_labeled),
                                                  rng.permutation(n_unlabeled)};
    std::array<std::size_t, 3> cursor{0, 0, 0};

    std::vector<CompositeBatch> batches(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
        const bool last = b + 1 == n_batches;
        for (std::size_t p = 0; p < 3; ++p) {
            const std::size_t left = pools[p].size() - cursor[p];
            const std::size_t take = last ? left : std::min(quota[p], left);
            auto first = pools[p].begin() + static_cast<std::ptrdiff_t>(cursor[p]);
            std::vector<std::size_t>& dest =
                p == 0 ? batches[b].source : (p == 1 ? batches[b].labeled : batches[b].unlabeled);
            dest.assign(first, first + static_cast<std::ptrdiff_t>(take));
            cursor[p] += take;
        }
    }
    return batches;
}

}  // namespace ssar
