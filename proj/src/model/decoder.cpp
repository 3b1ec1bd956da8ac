#include "ssar/model/decoder.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "ssar/error.hpp"
#include "ssar/numerics/random.hpp"

namespace ssar {

namespace {

std::array<std::size_t, kLayerCount + 1> layer_dims(std::size_t input_dim) {
    return {input_dim, kHiddenWidths[0], kHiddenWidths[1], kHiddenWidths[2], kOutputDim};
}

}  // namespace

DecoderParams::DecoderParams(std::size_t input_dim, bool relu_after_last)
    : input_dim_(input_dim), relu_after_last_(relu_after_last) {
    if (input_dim < 1) throw std::invalid_argument("decoder: input_dim must be >= 1");
    const auto dims = layer_dims(input_dim);
    for (std::size_t l = 0; l < kLayerCount; ++l) {
        blocks_.push_back(Matrix::Zero(static_cast<Eigen::Index>(dims[l]), static_cast<Eigen::Index>(dims[l + 1])));
        blocks_.push_back(Matrix::Zero(1, static_cast<Eigen::Index>(dims[l + 1])));
    }
}

std::string DecoderParams::layer_name(std::size_t layer) {
    return layer < 3 ? "extractor." + std::to_string(layer) : std::string("regressor");
}

const std::vector<std::string>& DecoderParams::block_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (std::size_t l = 0; l < kLayerCount; ++l) {
            out.push_back(layer_name(l) + ".weight");
            out.push_back(layer_name(l) + ".bias");
        }
        return out;
    }();
    return names;
}

std::vector<bool> DecoderParams::extractor_mask() {
    std::vector<bool> mask(2 * kLayerCount, true);
    mask[6] = false;
    mask[7] = false;
    return mask;
}

std::size_t DecoderParams::parameter_count() const {
    std::size_t n = 0;
    for (const Matrix& b : blocks_) n += static_cast<std::size_t>(b.size());
    return n;
}

void DecoderParams::set_output_normalization(RowVector mean, RowVector scale) {
    if (mean.cols() != static_cast<Eigen::Index>(kOutputDim) || scale.cols() != static_cast<Eigen::Index>(kOutputDim)) {
        throw std::invalid_argument("decoder: output normalization must be 2-D");
    }
    if (!((scale.array() > 0.0).all()) || !mean.allFinite() || !scale.allFinite()) {
        throw std::invalid_argument("decoder: output scale must be positive and finite");
    }
    output_mean_ = std::move(mean);
    output_scale_ = std::move(scale);
}

bool DecoderParams::operator==(const DecoderParams& other) const {
    if (input_dim_ != other.input_dim_ || relu_after_last_ != other.relu_after_last_ ||
        blocks_.size() != other.blocks_.size() || output_mean_ != other.output_mean_ ||
        output_scale_ != other.output_scale_) {
        return false;
    }
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (blocks_[i].rows() != other.blocks_[i].rows() || blocks_[i].cols() != other.blocks_[i].cols() ||
            blocks_[i] != other.blocks_[i]) {
            return false;
        }
    }
    return true;
}

DecoderParams init_decoder(std::uint64_t seed, std::size_t input_dim, bool relu_after_last) {
    DecoderParams p(input_dim, relu_after_last);
    Rng rng(seed);
    for (std::size_t l = 0; l < kLayerCount; ++l) {
        Matrix& w = p.weight(l);
        const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-a, a);
    }
    return p;
}

Matrix extract(const DecoderParams& params, const Matrix& x) {
    if (static_cast<std::size_t>(x.cols()) != params.input_dim()) {
        throw std::invalid_argument("extract: input has " + std::to_string(x.cols()) + " columns, decoder expects " +
                                    std::to_string(params.input_dim()));
    }
    Matrix h = x;
    for (std::size_t l = 0; l < 3; ++l) {
        Matrix z = h * params.weight(l);
        z.rowwise() += params.bias(l).row(0);
        h = (l < 2 || params.relu_after_last()) ? Matrix(z.cwiseMax(0.0)) : z;
    }
    return h;
}

Matrix regress_standardized(const DecoderParams& params, const Matrix& features) {
    if (features.cols() != static_cast<Eigen::Index>(kFeatureDim)) {
        throw std::invalid_argument("regress: features must have 16 columns");
    }
    Matrix y = features * params.weight(3);
    y.rowwise() += params.bias(3).row(0);
    return y;
}

Matrix regress(const DecoderParams& params, const Matrix& features) {
    Matrix y = regress_standardized(params, features);
    y = (y.array().rowwise() * params.output_scale().array()).matrix();
    y.rowwise() += params.output_mean();
    return y;
}

Matrix standardize_labels(const DecoderParams& params, const Matrix& labels) {
    if (labels.cols() != static_cast<Eigen::Index>(kOutputDim)) {
        throw std::invalid_argument("standardize_labels: labels must have 2 columns");
    }
    return ((labels.rowwise() - params.output_mean()).array().rowwise() / params.output_scale().array()).matrix();
}

Matrix predict(const DecoderParams& params, const Matrix& x) {
    return regress(params, extract(params, x));
}

DecoderVars record_params(Tape& tape, const DecoderParams& params, const std::vector<bool>& trainable) {
    DecoderVars vars;
    for (std::size_t i = 0; i < params.blocks().size(); ++i) {
        const bool train = trainable.empty() || trainable[i];
        vars.blocks.push_back(train ? tape.parameter(params.blocks()[i]) : tape.constant(params.blocks()[i]));
    }
    return vars;
}

Var extract(Tape& tape, const DecoderVars& vars, Var x, bool relu_after_last) {
    Var h = x;
    for (std::size_t l = 0; l < 3; ++l) {
        Var z = tape.add_row(tape.matmul(h, vars.blocks[2 * l]), vars.blocks[2 * l + 1]);
        h = (l < 2 || relu_after_last) ? tape.relu(z) : z;
    }
    return h;
}

Var regress_standardized(Tape& tape, const DecoderVars& vars, Var features) {
    return tape.add_row(tape.matmul(features, vars.blocks[6]), vars.blocks[7]);
}

void save_decoder(const DecoderParams& params, const std::filesystem::path& path) {
    nlohmann::json j;
    j["schema"] = kDecoderSchema;
    j["input_dim"] = params.input_dim();
    j["relu_after_last"] = params.relu_after_last();
    j["output_mean"] = std::vector<double>(params.output_mean().data(), params.output_mean().data() + kOutputDim);
    j["output_scale"] = std::vector<double>(params.output_scale().data(), params.output_scale().data() + kOutputDim);
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < kLayerCount; ++l) {
        const Matrix& w = params.weight(l);
        const Matrix& b = params.bias(l);
        layers.push_back({
            {"name", DecoderParams::layer_name(l)},
            {"fan_in", w.rows()},
            {"fan_out", w.cols()},
            {"weight", std::vector<double>(w.data(), w.data() + w.size())},
            {"bias", std::vector<double>(b.data(), b.data() + b.size())},
        });
    }
    j["layers"] = std::move(layers);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump() << '\n';
}

DecoderParams load_decoder(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        const nlohmann::json j = nlohmann::json::parse(in);
        if (j.at("schema").get<std::string>() != kDecoderSchema) {
            throw InputError(path.string() + ": unsupported decoder schema");
        }
        DecoderParams p(j.at("input_dim").get<std::size_t>(), j.at("relu_after_last").get<bool>());
        const auto mean = j.at("output_mean").get<std::vector<double>>();
        const auto scale = j.at("output_scale").get<std::vector<double>>();
        if (mean.size() != kOutputDim || scale.size() != kOutputDim) {
            throw InputError(path.string() + ": output normalization must have 2 entries");
        }
        p.set_output_normalization(Eigen::Map<const RowVector>(mean.data(), 2), Eigen::Map<const RowVector>(scale.data(), 2));
        const auto& layers = j.at("layers");
        if (layers.size() != kLayerCount) throw InputError(path.string() + ": expected 4 layers");
        for (std::size_t l = 0; l < kLayerCount; ++l) {
            const auto& layer = layers[l];
            if (layer.at("name").get<std::string>() != DecoderParams::layer_name(l)) {
                throw InputError(path.string() + ": unexpected layer '" + layer.at("name").get<std::string>() + "'");
            }
            const auto w = layer.at("weight").get<std::vector<double>>();
            const auto b = layer.at("bias").get<std::vector<double>>();
            Matrix& pw = p.weight(l);
            Matrix& pb = p.bias(l);
            if (w.size() != static_cast<std::size_t>(pw.size()) || b.size() != static_cast<std::size_t>(pb.size())) {
                throw InputError(path.string() + ": layer " + DecoderParams::layer_name(l) + " has wrong size");
            }
            std::copy(w.begin(), w.end(), pw.data());
            std::copy(b.begin(), b.end(), pb.data());
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": malformed decoder checkpoint: " + e.what());
    }
}

}  // namespace ssar
