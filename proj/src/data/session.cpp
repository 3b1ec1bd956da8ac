#include "ssar/data/session.hpp"

#include <stdexcept>

namespace ssar {

void RawSession::validate() const {
    if (!(bin_width > 0.0)) throw std::invalid_argument("raw session: bin_width must be > 0");
    if (spike_counts.rows() != velocity.rows()) {
        throw std::invalid_argument("raw session: spike_counts and velocity row counts differ");
    }
    if (velocity.cols() != 2) throw std::invalid_argument("raw session: velocity must have 2 columns");
    if ((spike_counts.array() < 0.0).any()) {
        throw std::invalid_argument("raw session: negative spike count");
    }
}

void Session::validate() const {
    if (features.rows() != velocity.rows()) {
        throw std::invalid_argument("session: features and velocity row counts differ");
    }
    if (velocity.cols() != 2) throw std::invalid_argument("session: velocity must have 2 columns");
    if (normalization.channels() != static_cast<std::size_t>(features.cols()) ||
        normalization.sd.size() != normalization.mean.size() ||
        normalization.zero_variance.size() != normalization.mean.size()) {
        throw std::invalid_argument("session: normalization does not match channel count");
    }
    require_finite(features, "session features");
    require_finite(velocity, "session velocity");
}

}  // namespace ssar
