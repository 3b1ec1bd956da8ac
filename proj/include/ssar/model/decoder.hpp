#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ssar/numerics/matrix.hpp"
#include "ssar/numerics/tape.hpp"

namespace ssar {

inline constexpr std::array<std::size_t, 3> kHiddenWidths{64, 32, 16};
inline constexpr std::size_t kFeatureDim = 16;
inline constexpr std::size_t kOutputDim = 2;
inline constexpr std::size_t kLayerCount = 4;  // three extractor layers + regressor

// ---------------------------------------------------------------------------
// DecoderParams: feature extractor (input -> 64 -> 32 -> 16, ReLU after each
// hidden layer) followed by a linear regressor 16 -> 2.
//
// Parameters live in eight blocks ordered [W0, b0, W1, b1, W2, b2, Wr, br];
// weights are fan_in x fan_out, biases 1 x fan_out. Layers 0..2 form the
// extractor, layer 3 the regressor.
//
// The regressor works in standardized label units: its affine output is mapped
// back to cm/s by a fixed (non-trainable) per-dimension scale and offset, set
// from the source-day label statistics before training.
// ---------------------------------------------------------------------------
class DecoderParams {
public:
    DecoderParams() = default;
    DecoderParams(std::size_t input_dim, bool relu_after_last);

    std::size_t input_dim() const { return input_dim_; }
    bool relu_after_last() const { return relu_after_last_; }

    Matrix& weight(std::size_t layer) { return blocks_.at(2 * layer); }
    const Matrix& weight(std::size_t layer) const { return blocks_.at(2 * layer); }
    Matrix& bias(std::size_t layer) { return blocks_.at(2 * layer + 1); }
    const Matrix& bias(std::size_t layer) const { return blocks_.at(2 * layer + 1); }

    std::vector<Matrix>& blocks() { return blocks_; }
    const std::vector<Matrix>& blocks() const { return blocks_; }
    static const std::vector<std::string>& block_names();
    static std::string layer_name(std::size_t layer);

    // Mask selecting the extractor blocks only (regressor frozen).
    static std::vector<bool> extractor_mask();

    std::size_t parameter_count() const;

    const RowVector& output_mean() const { return output_mean_; }
    const RowVector& output_scale() const { return output_scale_; }
    void set_output_normalization(RowVector mean, RowVector scale);

    bool operator==(const DecoderParams& other) const;

private:
    std::size_t input_dim_ = 0;
    bool relu_after_last_ = true;
    std::vector<Matrix> blocks_;
    RowVector output_mean_ = RowVector::Zero(kOutputDim);
    RowVector output_scale_ = RowVector::Ones(kOutputDim);
};

// Glorot-uniform weights in (-a, a), a = sqrt(6 / (fan_in + fan_out)); zero biases.
DecoderParams init_decoder(std::uint64_t seed, std::size_t input_dim, bool relu_after_last = true);

// Forward passes over feature rows. regress/predict return cm/s;
// regress_standardized returns the regressor's affine output.
Matrix extract(const DecoderParams& params, const Matrix& x);
Matrix regress_standardized(const DecoderParams& params, const Matrix& features);
Matrix regress(const DecoderParams& params, const Matrix& features);
Matrix predict(const DecoderParams& params, const Matrix& x);

// Maps labels in cm/s to the regressor's standardized units.
Matrix standardize_labels(const DecoderParams& params, const Matrix& labels);

// Tape handles for every parameter block. Blocks outside `trainable` are
// recorded as constants.
struct DecoderVars {
    std::vector<Var> blocks;
};

DecoderVars record_params(Tape& tape, const DecoderParams& params, const std::vector<bool>& trainable = {});
Var extract(Tape& tape, const DecoderVars& vars, Var x, bool relu_after_last);
Var regress_standardized(Tape& tape, const DecoderVars& vars, Var features);

// JSON checkpoint (schema "ssar-decoder-v1") with layer-tagged flat row-major arrays.
inline constexpr const char* kDecoderSchema = "ssar-decoder-v1";
void save_decoder(const DecoderParams& params, const std::filesystem::path& path);
DecoderParams load_decoder(const std::filesystem::path& path);

}  // namespace ssar
