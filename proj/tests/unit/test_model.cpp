#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "ssar/error.hpp"
#include "ssar/losses/objective.hpp"
#include "ssar/model/decoder.hpp"

using namespace ssar;
namespace fs = std::filesystem;

namespace {

DecoderParams random_params(std::uint64_t seed, std::size_t d, bool relu_last = true) {
    Rng rng(seed);
    DecoderParams p(d, relu_last);
    for (Matrix& b : p.blocks()) b = oracle::random_matrix(rng, b.rows(), b.cols(), -0.5, 0.5);
    return p;
}

// Layer by layer with explicit loops.
Matrix forward_oracle(const DecoderParams& p, const Matrix& x, bool features_only) {
    Matrix h = x;
    for (std::size_t l = 0; l < kLayerCount; ++l) {
        if (features_only && l == 3) break;
        const Matrix& w = p.weight(l);
        const Matrix& b = p.bias(l);
        Matrix next(h.rows(), w.cols());
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                double acc = b(0, j);
                for (Eigen::Index k = 0; k < w.rows(); ++k) acc += h(i, k) * w(k, j);
                const bool relu = l < 2 || (l == 2 && p.relu_after_last());
                next(i, j) = relu ? std::max(0.0, acc) : acc;
            }
        h = next;
    }
    if (!features_only) {
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            for (Eigen::Index j = 0; j < 2; ++j) h(i, j) = h(i, j) * p.output_scale()(j) + p.output_mean()(j);
    }
    return h;
}

}  // namespace

TEST_CASE("layout and names") {
    const DecoderParams p(10, true);
    REQUIRE(p.blocks().size() == 8);
    CHECK(p.weight(0).rows() == 10);
    CHECK(p.weight(0).cols() == 64);
    CHECK(p.weight(1).cols() == 32);
    CHECK(p.weight(2).cols() == 16);
    CHECK(p.weight(3).cols() == 2);
    CHECK(p.parameter_count() == 10 * 64 + 64 + 64 * 32 + 32 + 32 * 16 + 16 + 16 * 2 + 2);
    CHECK(DecoderParams::block_names().front() == "extractor.0.weight");
    CHECK(DecoderParams::block_names().back() == "regressor.bias");
    const auto mask = DecoderParams::extractor_mask();
    CHECK(std::count(mask.begin(), mask.end(), true) == 6);
    CHECK_FALSE(mask[6]);
}

TEST_CASE("zero parameters give zero output") {
    const DecoderParams p(7, true);
    Rng rng(1);
    const Matrix x = oracle::random_matrix(rng, 5, 7);
    CHECK(predict(p, x).isZero(0.0));
    CHECK(extract(p, x).isZero(0.0));
}

TEST_CASE("forward pass matches loop oracle") {
    Rng rng(2);
    for (bool relu_last : {true, false}) {
        DecoderParams p = random_params(3, 9, relu_last);
        Matrix mean(1, 2), scale(1, 2);
        mean << 1.5, -2.0;
        scale << 3.0, 0.25;
        p.set_output_normalization(mean, scale);
        const Matrix x = oracle::random_matrix(rng, 11, 9, -2, 2);
        CHECK((extract(p, x) - forward_oracle(p, x, true)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((predict(p, x) - forward_oracle(p, x, false)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(predict(p, x) == regress(p, extract(p, x)));
        if (relu_last) CHECK((extract(p, x).array() >= 0.0).all());
    }
}

TEST_CASE("hidden activations are non-negative") {
    const DecoderParams p = random_params(5, 6);
    Rng rng(5);
    Matrix h = oracle::random_matrix(rng, 20, 6, -3, 3);
    for (std::size_t l = 0; l < 3; ++l) {
        h = ((h * p.weight(l)).rowwise() + p.bias(l).row(0)).cwiseMax(0.0);
        CHECK((h.array() >= 0.0).all());
    }
}

TEST_CASE("batch evaluation equals row by row") {
    const DecoderParams p = random_params(6, 8);
    Rng rng(6);
    const Matrix x = oracle::random_matrix(rng, 13, 8);
    const Matrix all = predict(p, x);
    for (Eigen::Index i = 0; i < 13; ++i) {
        const Matrix one = predict(p, x.row(i));
        CHECK((one - all.row(i)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("tape forward matches plain forward and gradients match finite differences") {
    DecoderParams p = random_params(7, 5);
    Rng rng(7);
    const Matrix x = oracle::random_matrix(rng, 6, 5);
    const Matrix y = oracle::random_matrix(rng, 6, 2);

    Tape tape;
    const DecoderVars vars = record_params(tape, p);
    const Var f = extract(tape, vars, tape.constant(x), true);
    CHECK((tape.value(f) - extract(p, x)).cwiseAbs().maxCoeff() < 1e-14);
    const Var out = regress_standardized(tape, vars, f);
    CHECK((tape.value(out) - regress_standardized(p, extract(p, x))).cwiseAbs().maxCoeff() < 1e-14);
    tape.backward(regression_loss(tape, out, y));

    for (std::size_t b = 0; b < p.blocks().size(); ++b) {
        CAPTURE(DecoderParams::block_names()[b]);
        const Matrix numeric = oracle::numeric_gradient(
            [&](const Matrix& v) {
                DecoderParams q = p;
                q.blocks()[b] = v;
                return regression_loss(regress_standardized(q, extract(q, x)), y);
            },
            p.blocks()[b]);
        CHECK(oracle::relative_error(tape.grad(vars.blocks[b]), numeric) < 1e-4);
    }
}

TEST_CASE("glorot initialization") {
    const DecoderParams a = init_decoder(11, 20);
    const DecoderParams b = init_decoder(11, 20);
    CHECK(a == b);
    CHECK_FALSE(a == init_decoder(12, 20));
    for (std::size_t l = 0; l < kLayerCount; ++l) {
        const Matrix& w = a.weight(l);
        const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        CHECK(w.cwiseAbs().maxCoeff() < limit);
        CHECK(w.cwiseAbs().maxCoeff() > 0.5 * limit);
        CHECK(a.bias(l).isZero(0.0));
    }
}

TEST_CASE("checkpoint round trip") {
    const fs::path dir = fs::temp_directory_path() / "ssar_test_model";
    fs::create_directories(dir);
    DecoderParams p = random_params(8, 4, false);
    Matrix mean(1, 2), scale(1, 2);
    mean << 0.1, 0.2;
    scale << 7.0, 9.5;
    p.set_output_normalization(mean, scale);
    save_decoder(p, dir / "decoder.json");
    const DecoderParams back = load_decoder(dir / "decoder.json");
    CHECK(back == p);
    CHECK_FALSE(back.relu_after_last());

    std::ofstream(dir / "broken.json") << "{\"schema\": \"other\"}";
    CHECK_THROWS_AS(load_decoder(dir / "broken.json"), InputError);
    CHECK_THROWS_AS(load_decoder(dir / "absent.json"), InputError);
}

TEST_CASE("output normalization is validated") {
    DecoderParams p(3, true);
    Matrix mean = Matrix::Zero(1, 2), scale(1, 2);
    scale << 1.0, 0.0;
    CHECK_THROWS_AS(p.set_output_normalization(mean, scale), std::invalid_argument);
    const Matrix labels = (Matrix(2, 2) << 1, 2, 3, 4).finished();
    CHECK(standardize_labels(p, labels) == labels);
}
