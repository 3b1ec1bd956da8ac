#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "ssar/data/io.hpp"
#include "ssar/data/preprocess.hpp"
#include "ssar/data/split.hpp"
#include "ssar/diagnostics.hpp"
#include "ssar/error.hpp"

using namespace ssar;
namespace fs = std::filesystem;

namespace {

Session random_session(std::uint64_t seed, Eigen::Index rows, Eigen::Index channels) {
    Rng rng(seed);
    Session s;
    s.day_id = "day" + std::to_string(seed);
    s.features = oracle::random_matrix(rng, rows, channels, -3, 3);
    s.velocity = oracle::random_matrix(rng, rows, 2, -30, 30);
    const ZScored z = zscore(s.features);
    s.features = z.features;
    s.normalization = z.normalization;
    return s;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ssar_test_data_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("smoothing an impulse is symmetric and preserves mass") {
    Matrix counts = Matrix::Zero(41, 1);
    counts(20, 0) = 1.0;
    const Matrix out = gaussian_smooth(counts, 0.05, 0.1);
    for (int k = 1; k <= 20; ++k) CHECK(out(20 - k, 0) == doctest::Approx(out(20 + k, 0)).epsilon(1e-14));
    CHECK(out.sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(out(20, 0) == out.maxCoeff());
    // Taps stop at 4 sd = 8 bins.
    CHECK(out(11, 0) == 0.0);
    CHECK(out(12, 0) > 0.0);
}

TEST_CASE("smoothing keeps constants") {
    const Matrix counts = Matrix::Constant(30, 3, 4.25);
    const Matrix out = gaussian_smooth(counts, 0.05, 0.1);
    CHECK((out.array() - 4.25).abs().maxCoeff() < 1e-10);
}

TEST_CASE("smoothing matches direct convolution") {
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix counts = oracle::random_matrix(rng, 60 + trial * 7, 4, 0, 6);
        const Matrix out = gaussian_smooth(counts, 0.05, 0.1);
        const Matrix ref = oracle::smooth(counts, 0.05, 0.1);
        CHECK((out - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("zscore hand example and degenerate column") {
    Matrix m(3, 2);
    m << 1, 5, 2, 5, 3, 5;
    const ZScored z = zscore(m);
    CHECK(z.features(0, 0) == doctest::Approx(-1.224744871391589).epsilon(1e-14));
    CHECK(z.features(1, 0) == doctest::Approx(0.0));
    CHECK(z.features(2, 0) == doctest::Approx(1.224744871391589).epsilon(1e-14));
    CHECK(z.features.col(1).isZero(0.0));
    CHECK(z.normalization.zero_variance[1]);
    CHECK_FALSE(z.normalization.zero_variance[0]);
}

TEST_CASE("zscore moments and idempotence") {
    Rng rng(4);
    const Matrix m = oracle::random_matrix(rng, 50, 6, -2, 9);
    const ZScored z = zscore(m);
    for (Eigen::Index c = 0; c < 6; ++c) {
        const double mean = z.features.col(c).mean();
        const double var = (z.features.col(c).array() - mean).square().mean();
        CHECK(std::abs(mean) < 1e-10);
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-10);
    }
    const ZScored again = zscore(z.features);
    CHECK((again.features - z.features).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("preprocess yields a valid session") {
    RawSession raw;
    raw.day_id = "d";
    Rng rng(8);
    raw.spike_counts = Matrix::Zero(100, 3);
    for (Eigen::Index i = 0; i < 100; ++i) {
        raw.spike_counts(i, 0) = static_cast<double>(rng.poisson(2.0));
        raw.spike_counts(i, 1) = static_cast<double>(rng.poisson(0.5));
    }
    raw.velocity = oracle::random_matrix(rng, 100, 2);
    const Session s = preprocess(raw);
    CHECK(s.rows() == 100);
    CHECK(s.channels() == 3);
    CHECK(s.normalization.zero_variance[2]);
    CHECK(s.features.col(2).isZero(0.0));
}

TEST_CASE("split counts") {
    const Session src = random_session(1, 20, 3);
    const Session tgt = random_session(2, 1000, 3);
    SplitOptions o;
    o.labeled_fraction = 0.10;
    o.eval_fraction = 0.20;
    o.seed = 5;
    const RecalibrationTask t = split_target(src, tgt, o);
    CHECK(t.labeled_rows.size() == 100);
    CHECK(t.eval_target.rows.size() == 200);
    CHECK(t.unlabeled_rows.size() == 700);
    CHECK(t.labeled_target.rows() == 100);
    CHECK(t.unlabeled_target.rows() == 700);

    std::set<std::size_t> all;
    for (auto r : t.labeled_rows) all.insert(r);
    for (auto r : t.eval_target.rows) all.insert(r);
    for (auto r : t.unlabeled_rows) all.insert(r);
    CHECK(all.size() == 1000);
    CHECK(*all.rbegin() == 999);

    for (std::size_t i = 0; i < t.labeled_rows.size(); ++i) {
        CHECK(t.labeled_target.features.row(static_cast<Eigen::Index>(i)) ==
              tgt.features.row(static_cast<Eigen::Index>(t.labeled_rows[i])));
    }
}

TEST_CASE("split defaults evaluate on sealed unlabeled rows") {
    const Session src = random_session(1, 20, 3);
    const Session tgt = random_session(2, 200, 3);
    SplitOptions o;
    o.seed = 9;
    const RecalibrationTask t = split_target(src, tgt, o);
    CHECK(t.labeled_rows.size() == 20);
    CHECK(t.eval_target.rows == t.unlabeled_rows);
    CHECK(t.eval_target.labels.reveal_count() == 0);
}

TEST_CASE("split with no labels and determinism") {
    const Session src = random_session(1, 20, 3);
    const Session tgt = random_session(2, 100, 3);
    SplitOptions o;
    o.labeled_fraction = 0.0;
    o.seed = 3;
    std::vector<std::string> warnings;
    {
        ScopedWarningHandler capture([&](const std::string& w) { warnings.push_back(w); });
        const RecalibrationTask t = split_target(src, tgt, o);
        CHECK(t.labeled_target.rows() == 0);
        CHECK(t.unlabeled_rows.size() == 100);
    }
    CHECK(warnings.size() == 1);

    o.labeled_fraction = 0.3;
    const RecalibrationTask a = split_target(src, tgt, o);
    const RecalibrationTask b = split_target(src, tgt, o);
    CHECK(a.labeled_rows == b.labeled_rows);
    CHECK(a.unlabeled_rows == b.unlabeled_rows);
    o.seed = 4;
    CHECK(split_target(src, tgt, o).labeled_rows != a.labeled_rows);
}

TEST_CASE("split rejects impossible fractions") {
    const Session src = random_session(1, 20, 3);
    const Session tgt = random_session(2, 100, 3);
    SplitOptions o;
    o.labeled_fraction = 0.6;
    o.eval_fraction = 0.4;
    CHECK_THROWS_AS(split_target(src, tgt, o), std::invalid_argument);
}

TEST_CASE("session round trip is exact") {
    const fs::path dir = scratch_dir("roundtrip");
    Session s = random_session(12, 37, 5);
    s.normalization.zero_variance[2] = true;
    s.features.col(2).setZero();
    s.features(3, 1) = 1e-300;
    s.features(4, 1) = -0.1;
    save_session(s, dir / "day");
    const Session back = load_session(dir / "day");
    CHECK(back.day_id == s.day_id);
    CHECK(back.bin_width == s.bin_width);
    CHECK(back.features == s.features);
    CHECK(back.velocity == s.velocity);
    CHECK(back.normalization == s.normalization);

    save_session(s, dir / "again");
    CHECK(read_file(dir / "day.csv") == read_file(dir / "again.csv"));
}

TEST_CASE("session loader errors") {
    const fs::path dir = scratch_dir("errors");
    const Session s = random_session(3, 4, 2);
    save_session(s, dir / "ok");
    const std::string csv = read_file(dir / "ok.csv");
    const std::string meta = read_file(dir / "ok.meta.json");

    auto expect_error = [&](const std::string& csv_text, const std::string& fragment) {
        write_file(dir / "bad.csv", csv_text);
        write_file(dir / "bad.meta.json", meta);
        try {
            load_session(dir / "bad");
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CAPTURE(e.what());
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };

    std::string no_vy = csv;
    no_vy.replace(no_vy.find(",vy"), 3, ",vz");
    expect_error(no_vy, "'vy'");

    std::string extra_channel = csv;
    extra_channel.replace(extra_channel.find(",vx"), 0, ",ch_2");
    expect_error(extra_channel, "metadata declares 2");

    std::string ragged = csv;
    ragged.insert(ragged.find('\n', ragged.find('\n') + 1), ",1");
    expect_error(ragged, ":2: ragged row");

    std::string bad_number = csv;
    const auto second_line = bad_number.find('\n') + 1;
    bad_number.replace(bad_number.find(',', second_line) + 1, 1, "x");
    expect_error(bad_number, ":2:");

    CHECK_THROWS_AS(load_session(dir / "missing"), InputError);
}
