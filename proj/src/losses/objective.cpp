#include "ssar/losses/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "ssar/diagnostics.hpp"
#include "ssar/numerics/kernels.hpp"

namespace ssar {

void LossWeights::validate() const {
    for (double w : {alpha, beta, gamma, theta}) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("loss weights must be finite and >= 0");
    }
}

double LossBreakdown::combine(double reg, double global, double conditional, double ccc, const LossWeights& w) {
    return reg + w.gamma * (w.alpha * global + w.beta * conditional) + w.theta * ccc;
}

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

Var ccc_loss(Tape& tape, Var features, const Matrix& labels, double feature_bandwidth, double label_bandwidth) {
    const Matrix& f = tape.value(features);
    if (f.rows() == 0) throw std::invalid_argument("ccc_loss: need at least one sample");
    if (f.rows() != labels.rows()) throw std::invalid_argument("ccc_loss: features and labels are not row-aligned");
    const Var feature_sim = tape.rbf_gram(features, features, feature_bandwidth);
    const Var label_sim = tape.constant(rbf_gram(labels, labels, label_bandwidth));
    return tape.mean(tape.square(tape.sub(feature_sim, label_sim)));
}

double ccc_loss(const Matrix& features, const Matrix& labels, double feature_bandwidth, double label_bandwidth) {
    Tape tape;
    return tape.scalar(ccc_loss(tape, tape.constant(features), labels, feature_bandwidth, label_bandwidth));
}

Var regression_loss(Tape& tape, Var predictions, const Matrix& labels) {
    const Eigen::Index rows = tape.value(predictions).rows();
    const Eigen::Index cols = tape.value(predictions).cols();
    if (rows == 0) throw std::invalid_argument("regression_loss: empty labeled set");
    if (rows != labels.rows() || cols != labels.cols()) {
        throw std::invalid_argument("regression_loss: prediction and label shapes differ");
    }
    const Var err = tape.sub(predictions, tape.constant(labels));
    return tape.scale(tape.sum(tape.square(err)), 1.0 / static_cast<double>(rows));
}

double regression_loss(const Matrix& predictions, const Matrix& labels) {
    Tape tape;
    return tape.scalar(regression_loss(tape, tape.constant(predictions), labels));
}

LabelScaler LabelScaler::fit(const Matrix& labels) {
    if (labels.rows() < 1) throw std::invalid_argument("LabelScaler: no labels");
    LabelScaler s;
    s.mean = labels.colwise().mean();
    s.sd = ((labels.rowwise() - s.mean).array().square().colwise().sum() / static_cast<double>(labels.rows()))
               .sqrt()
               .matrix();
    for (Eigen::Index c = 0; c < s.sd.cols(); ++c) {
        if (!(s.sd(c) > 0.0)) s.sd(c) = 1.0;
    }
    return s;
}

LabelScaler LabelScaler::identity(Eigen::Index dims) {
    return LabelScaler{RowVector::Zero(dims), RowVector::Ones(dims)};
}

Matrix LabelScaler::apply(const Matrix& labels) const {
    return ((labels.rowwise() - mean).array().rowwise() / sd.array()).matrix();
}

// ---------------------------------------------------------------------------
// SeSA
// ---------------------------------------------------------------------------

namespace {

struct SesaVars {
    Var global;
    bool has_global = false;
    std::vector<Var> per_bin;
};

// Rows of `bins` equal to `bin`.
std::vector<std::size_t> rows_in_bin(const std::vector<std::size_t>& bins, std::size_t bin) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        if (bins[i] == bin) out.push_back(i);
    }
    return out;
}

SesaVars record_sesa(Tape& tape, Var source, const std::vector<std::size_t>& source_bins, Var labeled,
                     const std::vector<std::size_t>& labeled_bins, Var global_target, std::size_t subdomains,
                     const BandwidthPolicy& bandwidth) {
    SesaVars out;
    const Matrix& fs = tape.value(source);
    const Matrix& fg = tape.value(global_target);
    if (fs.rows() > 0 && fg.rows() > 0) {
        out.global = mmd_squared(tape, source, global_target, bandwidth.resolve(fs, fg));
        out.has_global = true;
    }
    if (tape.value(labeled).rows() == 0 || fs.rows() == 0) return out;
    for (std::size_t bin = 1; bin <= subdomains; ++bin) {
        auto s_rows = rows_in_bin(source_bins, bin);
        auto t_rows = rows_in_bin(labeled_bins, bin);
        if (s_rows.empty() || t_rows.empty()) continue;
        const Var s = tape.gather_rows(source, std::move(s_rows));
        const Var t = tape.gather_rows(labeled, std::move(t_rows));
        out.per_bin.push_back(mmd_squared(tape, s, t, bandwidth.resolve(tape.value(s), tape.value(t))));
    }
    return out;
}

double average(const Tape& tape, const std::vector<Var>& vars) {
    if (vars.empty()) return 0.0;
    double acc = 0.0;
    for (Var v : vars) acc += tape.scalar(v);
    return acc / static_cast<double>(vars.size());
}

}  // namespace

SesaTerms sesa_loss(const SubdomainPartition& partition, const Matrix& source_features,
                    const Matrix& labeled_target_features, const Matrix& unlabeled_target_features, double alpha,
                    double beta, const BandwidthPolicy& bandwidth) {
    if (partition.source_bins.size() != static_cast<std::size_t>(source_features.rows()) ||
        partition.labeled_target_bins.size() != static_cast<std::size_t>(labeled_target_features.rows())) {
        throw std::invalid_argument("sesa_loss: partition does not match the feature sets");
    }
    Tape tape;
    const Var s = tape.constant(source_features);
    const Var l = tape.constant(labeled_target_features);
    const Var u = tape.constant(unlabeled_target_features);
    const SesaVars v = record_sesa(tape, s, partition.source_bins, l, partition.labeled_target_bins, u,
                                   partition.bins.count, bandwidth);
    SesaTerms out;
    out.global = v.has_global ? tape.scalar(v.global) : 0.0;
    out.conditional = average(tape, v.per_bin);
    out.nonempty_bins = v.per_bin.size();
    if (beta > 0.0 && v.per_bin.empty()) {
        warn("sesa_loss: no speed bin is populated on both sides; conditional term is 0");
    }
    out.combined = alpha * out.global + beta * out.conditional;
    return out;
}

// ---------------------------------------------------------------------------
// Full objective
// ---------------------------------------------------------------------------

ObjectiveResult evaluate_objective(const DecoderParams& params, const LossBatch& batch,
                                   const ObjectiveSettings& settings, bool with_gradients,
                                   const std::vector<bool>& trainable) {
    const LossWeights& w = settings.weights;
    w.validate();
    const Eigen::Index ns = batch.source_x.rows();
    const Eigen::Index nl = batch.labeled_x.rows();
    const Eigen::Index nu = batch.unlabeled_x.rows();
    if (ns + nl == 0) throw std::invalid_argument("objective: batch has no labeled rows");
    if (batch.source_y.rows() != ns || batch.labeled_y.rows() != nl ||
        batch.source_bins.size() != static_cast<std::size_t>(ns) ||
        batch.labeled_bins.size() != static_cast<std::size_t>(nl)) {
        throw std::invalid_argument("objective: batch labels/bins do not match rows");
    }

    Tape tape;
    const DecoderVars vars = record_params(tape, params, trainable);

    // One extractor pass over [source; labeled target; unlabeled target].
    const Matrix* parts[] = {&batch.source_x, &batch.labeled_x, &batch.unlabeled_x};
    const Var x = tape.constant(vstack(parts));
    const Var features = extract(tape, vars, x, params.relu_after_last());

    auto range = [](Eigen::Index from, Eigen::Index count) {
        std::vector<std::size_t> rows(static_cast<std::size_t>(count));
        for (Eigen::Index i = 0; i < count; ++i) rows[static_cast<std::size_t>(i)] = static_cast<std::size_t>(from + i);
        return rows;
    };
    const Var f_labeled_all = tape.gather_rows(features, range(0, ns + nl));
    const Var f_source = tape.gather_rows(features, range(0, ns));
    const Var f_target_labeled = tape.gather_rows(features, range(ns, nl));
    const Var f_unlabeled = tape.gather_rows(features, range(ns + nl, nu));

    Matrix raw_labels(ns + nl, 2);
    raw_labels << batch.source_y, batch.labeled_y;
    const Matrix labels = standardize_labels(params, raw_labels);

    // Regression over source + labeled target.
    const Var reg = regression_loss(tape, regress_standardized(tape, vars, f_labeled_all), labels);

    // SeSA.
    Var global_target = f_unlabeled;
    if (settings.star_includes_labeled_target && nl > 0) {
        global_target = tape.gather_rows(features, range(ns, nl + nu));
    }
    const SesaVars sesa = record_sesa(tape, f_source, batch.source_bins, f_target_labeled, batch.labeled_bins,
                                      global_target, settings.subdomains, settings.bandwidth);

    // CCC over source + labeled target.
    const Var ccc = ccc_loss(tape, f_labeled_all, labels, settings.ccc_feature_bandwidth,
                             settings.ccc_label_bandwidth);

    ObjectiveResult result;
    LossBreakdown& b = result.breakdown;
    b.weights = w;
    b.reg = tape.scalar(reg);
    b.sesa_global = sesa.has_global ? tape.scalar(sesa.global) : 0.0;
    b.sesa_conditional = average(tape, sesa.per_bin);
    b.ccc = tape.scalar(ccc);
    b.total = LossBreakdown::combine(b.reg, b.sesa_global, b.sesa_conditional, b.ccc, w);
    result.nonempty_bins = sesa.per_bin.size();

    if (!with_gradients) return result;

    Var total = reg;
    const double global_weight = w.gamma * w.alpha;
    if (global_weight != 0.0 && sesa.has_global) total = tape.add(total, tape.scale(sesa.global, global_weight));
    const double cond_weight = w.gamma * w.beta;
    if (cond_weight != 0.0 && !sesa.per_bin.empty()) {
        Var acc = sesa.per_bin.front();
        for (std::size_t i = 1; i < sesa.per_bin.size(); ++i) acc = tape.add(acc, sesa.per_bin[i]);
        total = tape.add(total, tape.scale(acc, cond_weight / static_cast<double>(sesa.per_bin.size())));
    }
    if (w.theta != 0.0) total = tape.add(total, tape.scale(ccc, w.theta));

    tape.backward(total);
    result.gradients.reserve(vars.blocks.size());
    for (Var v : vars.blocks) result.gradients.push_back(tape.grad(v));
    return result;
}

LossBreakdown total_loss(const DecoderParams& params, const LossBatch& batch, const ObjectiveSettings& settings) {
    return evaluate_objective(params, batch, settings, false).breakdown;
}

}  // namespace ssar
