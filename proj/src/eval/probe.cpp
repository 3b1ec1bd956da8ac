#include "ssar/eval/probe.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "ssar/error.hpp"
#include "ssar/eval/metrics.hpp"
#include "ssar/numerics/pca.hpp"
#include "ssar/numerics/random.hpp"

namespace ssar {

ProbeArtifact probe_features(const DecoderParams& params, const Session& target, const std::string& tag,
                             const ProbeOptions& options) {
    if (target.rows() < 3) throw std::invalid_argument("probe: target needs at least 3 rows");
    const Matrix features = extract(params, target.features);

    ProbeArtifact a;
    a.tag = tag;
    const PcaResult pca = pca_project(features, 2);
    a.projection = pca.projection;
    a.explained_variance = pca.explained_variance;
    for (Eigen::Index r = 0; r < target.velocity.rows(); ++r) {
        a.speed.push_back(std::hypot(target.velocity(r, 0), target.velocity(r, 1)));
        a.direction.push_back(std::atan2(target.velocity(r, 1), target.velocity(r, 0)));
    }

    // Same subsample for every artifact of a probe run.
    Rng rng(options.seed);
    std::vector<std::size_t> rows = rng.permutation(target.rows());
    rows.resize(std::min(rows.size(), std::max<std::size_t>(3, options.score_points)));
    const Matrix f = gather_rows(features, rows);
    const Matrix y = gather_rows(target.velocity, rows);
    Matrix speed(static_cast<Eigen::Index>(rows.size()), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) speed(static_cast<Eigen::Index>(i), 0) = a.speed[rows[i]];
    a.consistency = consistency_score(f, y);
    a.speed_consistency = consistency_score(f, speed);
    return a;
}

std::vector<ProbeArtifact> pattern_probe(const DecoderParams& source_params, const Session& target,
                                         const ProbeOptions& options,
                                         const std::vector<std::pair<std::string, DecoderParams>>& recalibrated) {
    std::vector<ProbeArtifact> out;
    const TrainResult ideal = train_extractor_frozen_regressor(target, source_params, options.ideal_training);
    out.push_back(probe_features(ideal.params, target, kTagTargetIdeal, options));
    out.push_back(probe_features(source_params, target, kTagSourceTrained, options));
    for (const auto& [tag, params] : recalibrated) out.push_back(probe_features(params, target, tag, options));
    return out;
}

void write_probe_csv(const std::vector<ProbeArtifact>& artifacts, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out.precision(17);
    out << "pc1,pc2,speed,direction,tag\n";
    for (const ProbeArtifact& a : artifacts) {
        for (Eigen::Index r = 0; r < a.projection.rows(); ++r) {
            const auto i = static_cast<std::size_t>(r);
            out << a.projection(r, 0) << ',' << a.projection(r, 1) << ',' << a.speed[i] << ',' << a.direction[i]
                << ',' << a.tag << '\n';
        }
    }
}

}  // namespace ssar
