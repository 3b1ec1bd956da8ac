#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ssar/data/session.hpp"
#include "ssar/model/decoder.hpp"
#include "ssar/train/trainer.hpp"

namespace ssar {

inline constexpr const char* kTagSourceTrained = "source-trained";
inline constexpr const char* kTagTargetIdeal = "target-ideal";
inline constexpr const char* kTagRecalibrated = "recalibrated";

// 2-D PCA view of one extractor's features on the target day.
struct ProbeArtifact {
    std::string tag;
    Matrix projection;               // rows x 2
    std::vector<double> speed;       // |y|
    std::vector<double> direction;   // atan2(vy, vx)
    std::vector<double> explained_variance;
    double consistency = 0.0;        // features vs velocity labels
    double speed_consistency = 0.0;  // features vs speed
};

struct ProbeOptions {
    TrainConfig ideal_training;      // extractor training with the source regressor frozen
    std::size_t score_points = 500;  // rows subsampled for the pairwise scores
    std::uint64_t seed = 0;
};

// Projects `params`' extracted target features and scores them.
ProbeArtifact probe_features(const DecoderParams& params, const Session& target, const std::string& tag,
                             const ProbeOptions& options);

// (a) target-ideal: fresh extractor trained on the labeled target day under the
//     frozen source regressor;
// (b) source-trained: the source extractor applied to the target day;
// (c) one artifact per entry of `recalibrated` (tag, params).
std::vector<ProbeArtifact> pattern_probe(const DecoderParams& source_params, const Session& target,
                                         const ProbeOptions& options,
                                         const std::vector<std::pair<std::string, DecoderParams>>& recalibrated = {});

// CSV with columns pc1,pc2,speed,direction,tag (all artifacts appended).
void write_probe_csv(const std::vector<ProbeArtifact>& artifacts, const std::filesystem::path& path);

}  // namespace ssar
