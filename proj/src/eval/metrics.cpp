#include "ssar/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ssar {

namespace {

void check_shapes(const Matrix& truth, const Matrix& predicted, const char* what) {
    if (truth.rows() != predicted.rows() || truth.cols() != predicted.cols()) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }
    if (truth.rows() < 2) throw std::invalid_argument(std::string(what) + ": need at least 2 rows");
}

double finish(DimensionScores& s) {
    s.mean = std::accumulate(s.per_dim.begin(), s.per_dim.end(), 0.0) / static_cast<double>(s.per_dim.size());
    return s.mean;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ca = a.array() - a.mean();
    const Eigen::VectorXd cb = b.array() - b.mean();
    const double saa = ca.squaredNorm();
    const double sbb = cb.squaredNorm();
    if (!(saa > 0.0) || !(sbb > 0.0)) throw std::invalid_argument("correlation undefined: zero variance");
    return ca.dot(cb) / std::sqrt(saa * sbb);
}

}  // namespace

DimensionScores pearson_cc(const Matrix& truth, const Matrix& predicted) {
    check_shapes(truth, predicted, "pearson_cc");
    DimensionScores s;
    for (Eigen::Index c = 0; c < truth.cols(); ++c) {
        s.per_dim.push_back(pearson(truth.col(c), predicted.col(c)));
    }
    finish(s);
    return s;
}

DimensionScores r_squared(const Matrix& truth, const Matrix& predicted) {
    check_shapes(truth, predicted, "r_squared");
    DimensionScores s;
    for (Eigen::Index c = 0; c < truth.cols(); ++c) {
        const double mean = truth.col(c).mean();
        const double ss_tot = (truth.col(c).array() - mean).square().sum();
        if (!(ss_tot > 0.0)) throw std::invalid_argument("r_squared: truth has zero variance");
        const double ss_res = (truth.col(c) - predicted.col(c)).squaredNorm();
        s.per_dim.push_back(1.0 - ss_res / ss_tot);
    }
    finish(s);
    return s;
}

MetricReport score_predictions(const Matrix& truth, const Matrix& predicted) {
    const DimensionScores cc = pearson_cc(truth, predicted);
    const DimensionScores r2 = r_squared(truth, predicted);
    MetricReport m;
    m.cc = cc.mean;
    m.r2 = r2.mean;
    m.cc_per_dim = cc.per_dim;
    m.r2_per_dim = r2.per_dim;
    m.n_eval = static_cast<std::size_t>(truth.rows());
    return m;
}

MetricReport evaluate(const DecoderParams& params, const RecalibrationTask& task) {
    if (task.eval_target.features.rows() == 0) throw std::invalid_argument("evaluate: empty evaluation set");
    const Matrix predicted = predict(params, task.eval_target.features);
    return score_predictions(task.eval_target.labels.reveal(), predicted);
}

MetricReport evaluate_session(const DecoderParams& params, const Session& session) {
    return score_predictions(session.velocity, predict(params, session.features));
}

namespace {

// Average ranks (ties share the mean of their positions).
std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

std::vector<double> pairwise_distances(const Matrix& m) {
    std::vector<double> out;
    const Eigen::Index n = m.rows();
    out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) out.push_back((m.row(i) - m.row(j)).norm());
    }
    return out;
}

}  // namespace

double consistency_score(const Matrix& features, const Matrix& labels) {
    if (features.rows() != labels.rows()) throw std::invalid_argument("consistency_score: row counts differ");
    if (features.rows() < 3) throw std::invalid_argument("consistency_score: need at least 3 samples");
    const std::vector<double> rf = ranks(pairwise_distances(features));
    const std::vector<double> rl = ranks(pairwise_distances(labels));
    const Eigen::Map<const Eigen::VectorXd> a(rf.data(), static_cast<Eigen::Index>(rf.size()));
    const Eigen::Map<const Eigen::VectorXd> b(rl.data(), static_cast<Eigen::Index>(rl.size()));
    try {
        return pearson(a, b);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("consistency_score: pairwise distances are constant");
    }
}

}  // namespace ssar
