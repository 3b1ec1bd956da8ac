#include "ssar/data/split.hpp"

#include <cmath>
#include <stdexcept>

#include "ssar/diagnostics.hpp"
#include "ssar/numerics/random.hpp"

namespace ssar {

std::size_t fraction_count(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

namespace {

Session subset(const Session& s, const std::vector<std::size_t>& rows) {
    Session out;
    out.day_id = s.day_id;
    out.bin_width = s.bin_width;
    out.normalization = s.normalization;
    out.features = gather_rows(s.features, rows);
    out.velocity = gather_rows(s.velocity, rows);
    return out;
}

}  // namespace

RecalibrationTask split_target(const Session& source, const Session& target, const SplitOptions& options,
                               bool conditional_alignment_enabled) {
    const double lf = options.labeled_fraction;
    const double ef = options.eval_fraction;
    if (!(lf >= 0.0) || !(ef >= 0.0) || !(lf + ef < 1.0)) {
        throw std::invalid_argument("split_target: fractions must be non-negative with sum < 1");
    }
    if (source.channels() != target.channels()) {
        throw std::invalid_argument("split_target: source and target channel counts differ");
    }
    if (source.rows() == 0) throw std::invalid_argument("split_target: empty source session");

    const std::size_t n = target.rows();
    const std::size_t n_eval = fraction_count(n, ef);
    const std::size_t n_labeled = fraction_count(n, lf);
    if (n_eval + n_labeled >= n) throw std::invalid_argument("split_target: no unlabeled rows remain");

    Rng rng(options.seed);
    const std::vector<std::size_t> order = rng.permutation(n);

    RecalibrationTask task;
    task.source = source;
    std::vector<std::size_t> eval_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_eval));
    task.labeled_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_eval),
                             order.begin() + static_cast<std::ptrdiff_t>(n_eval + n_labeled));
    task.unlabeled_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_eval + n_labeled), order.end());

    task.labeled_target = subset(target, task.labeled_rows);
    task.unlabeled_target = gather_rows(target.features, task.unlabeled_rows);

    if (n_eval == 0) eval_rows = task.unlabeled_rows;
    task.eval_target.features = gather_rows(target.features, eval_rows);
    task.eval_target.labels = SealedLabels(gather_rows(target.velocity, eval_rows));
    task.eval_target.rows = std::move(eval_rows);

    if (n_labeled == 0 && conditional_alignment_enabled) {
        warn("split_target: labeled fraction yields zero labeled target rows; conditional alignment is inactive");
    }
    if (task.unlabeled_rows.size() <= n_labeled) {
        warn("split_target: unlabeled target rows do not outnumber labeled rows");
    }
    return task;
}

}  // namespace ssar
