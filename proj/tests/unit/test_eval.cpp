#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "ssar/data/split.hpp"
#include "ssar/eval/metrics.hpp"
#include "ssar/eval/probe.hpp"
#include "ssar/eval/runners.hpp"
#include "ssar/synth/generator.hpp"

using namespace ssar;
namespace fs = std::filesystem;

namespace {

Matrix column(std::initializer_list<double> v) {
    Matrix m(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (double x : v) m(i++, 0) = x;
    return m;
}

SynthConfig small_synth(std::uint64_t seed, bool drift) {
    SynthConfig c;
    c.channels = 12;
    c.bins_per_day = 500;
    c.seed = seed;
    if (drift) c.drift = default_drift();
    return c;
}

TrainConfig quick_config() {
    TrainConfig c;
    c.epochs = 2;
    c.batch_size = 64;
    c.optimizer.lr = 1e-3;
    return c;
}

}  // namespace

TEST_CASE("pearson examples") {
    const DimensionScores r = pearson_cc(column({1, 2, 3}), column({1, 2, 4}));
    CHECK(r.mean == doctest::Approx(0.9819805060619657).epsilon(1e-14));
    Rng rng(1);
    const Matrix y = oracle::random_matrix(rng, 30, 2);
    CHECK(pearson_cc(y, y).mean == doctest::Approx(1.0).epsilon(1e-14));
    const Matrix centered = y.rowwise() - y.colwise().mean();
    CHECK(pearson_cc(centered, -centered).mean == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK_THROWS_AS(pearson_cc(column({1, 1, 1}), column({1, 2, 3})), std::invalid_argument);
    CHECK_THROWS_AS(pearson_cc(column({1, 2, 3}), column({2, 2, 2})), std::invalid_argument);
    CHECK_THROWS_AS(pearson_cc(column({1}), column({1})), std::invalid_argument);
}

TEST_CASE("r squared examples") {
    CHECK(r_squared(column({1, 2, 3}), column({2, 2, 2})).mean == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r_squared(column({1, 2, 3}), column({1, 2, 3})).mean == 1.0);
    CHECK(r_squared(column({1, 2, 3}), column({3, 2, 1})).mean < 0.0);
    CHECK_THROWS_AS(r_squared(column({4, 4, 4}), column({1, 2, 3})), std::invalid_argument);
}

TEST_CASE("metrics match per-column oracles") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix t = oracle::random_matrix(rng, 25, 2, -10, 10);
        const Matrix p = t + oracle::random_matrix(rng, 25, 2, -4, 4);
        const DimensionScores cc = pearson_cc(t, p);
        const DimensionScores r2 = r_squared(t, p);
        for (Eigen::Index c = 0; c < 2; ++c) {
            CHECK(std::abs(cc.per_dim[static_cast<std::size_t>(c)] - oracle::pearson_column(t, p, c)) < 1e-12);
            CHECK(std::abs(r2.per_dim[static_cast<std::size_t>(c)] - oracle::r2_column(t, p, c)) < 1e-12);
        }
        CHECK(cc.mean == doctest::Approx(0.5 * (cc.per_dim[0] + cc.per_dim[1])).epsilon(1e-15));
        const MetricReport m = score_predictions(t, p);
        CHECK(m.n_eval == 25);
        CHECK(m.cc == cc.mean);
        CHECK(m.r2 == r2.mean);
    }
}

TEST_CASE("consistency score identities") {
    Rng rng(3);
    const Matrix y = oracle::random_matrix(rng, 40, 2);
    CHECK(consistency_score(y, y) == doctest::Approx(1.0).epsilon(1e-12));

    // Rotation plus translation.
    const double a = 0.9;
    Matrix rot(2, 2);
    rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    Matrix moved = y * rot;
    moved.rowwise() += (Matrix(1, 2) << 3.0, -7.0).finished().row(0);
    const Matrix f = oracle::random_matrix(rng, 40, 2);
    Matrix f_moved = f * rot;
    f_moved.array() += 1.5;
    CHECK(std::abs(consistency_score(f_moved, y) - consistency_score(f, y)) < 1e-12);
    CHECK(consistency_score(moved, y) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(consistency_score(y.topRows(2), y.topRows(2)), std::invalid_argument);
    CHECK_THROWS_AS(consistency_score(Matrix::Zero(5, 2), y.topRows(5)), std::invalid_argument);
}

TEST_CASE("consistency score of unrelated features is near zero") {
    Rng rng(4);
    const Matrix y = oracle::random_matrix(rng, 200, 2);
    const Matrix f = oracle::random_matrix(rng, 200, 16);
    CHECK(std::abs(consistency_score(f, y)) < 0.1);
}

TEST_CASE("consistency score is invariant under joint relabeling") {
    Rng rng(5);
    const Matrix y = oracle::random_matrix(rng, 30, 2);
    const Matrix f = y * oracle::random_matrix(rng, 2, 5) + 0.3 * oracle::random_matrix(rng, 30, 5);
    const auto perm = rng.permutation(30);
    CHECK(std::abs(consistency_score(gather_rows(f, perm), gather_rows(y, perm)) - consistency_score(f, y)) < 1e-12);
}

TEST_CASE("evaluation unseals labels only at scoring time") {
    const SynthConfig c = small_synth(1, true);
    SplitOptions o;
    o.seed = 1;
    const RecalibrationTask task = split_target(generate_session(c, 0), generate_session(c, 1), o);
    const TrainResult r = recalibrate_ssar(task, quick_config());
    CHECK(task.eval_target.labels.reveal_count() == 0);
    const MetricReport m = evaluate(r.params, task);
    CHECK(task.eval_target.labels.reveal_count() == 1);
    CHECK(m.n_eval == task.eval_target.rows.size());
}

TEST_CASE("perfect and constant decoders") {
    // Linear data decoded exactly by a hand-built decoder.
    Rng rng(6);
    Session s;
    s.velocity = oracle::random_matrix(rng, 50, 2, -10, 10);
    s.features = s.velocity;
    DecoderParams p(2, true);
    Matrix w0 = Matrix::Zero(2, 64), w1 = Matrix::Zero(64, 32), w2 = Matrix::Zero(32, 16), w3 = Matrix::Zero(16, 2);
    // Split each coordinate into positive and negative parts, carry them through, recombine.
    w0(0, 0) = 1;
    w0(0, 1) = -1;
    w0(1, 2) = 1;
    w0(1, 3) = -1;
    for (int k = 0; k < 4; ++k) {
        w1(k, k) = 1;
        w2(k, k) = 1;
    }
    w3(0, 0) = 1;
    w3(1, 0) = -1;
    w3(2, 1) = 1;
    w3(3, 1) = -1;
    p.blocks()[0] = w0;
    p.blocks()[2] = w1;
    p.blocks()[4] = w2;
    p.blocks()[6] = w3;
    const MetricReport m = evaluate_session(p, s);
    CHECK(m.cc == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(m.r2 == doctest::Approx(1.0).epsilon(1e-6));

    const DecoderParams zero(2, true);
    CHECK_THROWS_AS(evaluate_session(zero, s), std::invalid_argument);
}

TEST_CASE("ablation variants and labels") {
    const auto& v = ablation_variants();
    std::set<std::string> labels;
    for (const VariantMask& m : v) labels.insert(m.label());
    CHECK(labels.size() == 8);
    CHECK(v.front().label() == "SSAR(alpha=0,beta=0,theta=0)");
    CHECK(v.back().label() == "SSAR");
    const LossWeights none = v.front().apply(LossWeights{});
    CHECK(none.alpha == 0.0);
    CHECK(none.beta == 0.0);
    CHECK(none.theta == 0.0);
    CHECK(none.gamma == 1.0);
}

TEST_CASE("ablation runner is deterministic across job counts") {
    std::vector<SeededTask> tasks;
    for (std::uint64_t seed : {0, 1}) {
        const SynthConfig c = small_synth(seed, true);
        SplitOptions o;
        o.seed = seed;
        tasks.push_back({seed, split_target(generate_session(c, 0), generate_session(c, 1), o)});
    }
    TrainConfig base = quick_config();
    base.epochs = 1;
    const auto serial = run_ablation(tasks, base);
    RunOptions par;
    par.jobs = 3;
    const auto parallel = run_ablation(tasks, base, par);
    REQUIRE(serial.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        REQUIRE(serial[i].cells.size() == 2);
        CHECK(serial[i].median_cc == parallel[i].median_cc);
        CHECK(serial[i].cells[1].report.cc == parallel[i].cells[1].report.cc);
        CHECK(serial[i].cells[0].seed == 0);
    }

    const fs::path dir = fs::temp_directory_path() / "ssar_test_eval";
    fs::create_directories(dir);
    write_ablation_reports(serial, dir / "ablation.json", dir / "ablation.csv");
    std::ifstream csv(dir / "ablation.csv");
    std::string note, header;
    std::getline(csv, note);
    std::getline(csv, header);
    CHECK(note.rfind("# metric convention", 0) == 0);
    CHECK(header == "variant,seed,cc,r2");
    std::size_t lines = 0;
    for (std::string line; std::getline(csv, line);) ++lines;
    CHECK(lines == 16);
}

TEST_CASE("labeled fraction sweep runs at zero labels") {
    const SynthConfig c = small_synth(3, true);
    const Session source = generate_session(c, 0);
    const Session target = generate_session(c, 1);
    const TaskFactory factory = [&](double value, std::uint64_t seed) {
        SplitOptions o;
        o.labeled_fraction = value;
        o.seed = seed;
        return split_target(source, target, o);
    };
    const std::vector<double> values{0.0, 0.1};
    const std::vector<std::uint64_t> seeds{0};
    TrainConfig base = quick_config();
    base.epochs = 1;
    const SweepReport r = run_sweep(SweepAxis::LabeledFraction, values, seeds, base, factory);
    CHECK(r.cells.size() == 2 * 4);
    for (const char* method : kSweepMethods) {
        for (double v : values) CHECK(std::isfinite(r.median_cc(method, v)));
    }
    CHECK(parse_sweep_axis(to_string(SweepAxis::TimeSpan)) == SweepAxis::TimeSpan);
    CHECK_THROWS_AS(parse_sweep_axis("days"), std::invalid_argument);
}

TEST_CASE("probe artifacts cover every target row") {
    const SynthConfig c = small_synth(4, true);
    const Session source = generate_session(c, 0);
    const Session target = generate_session(c, 1);
    ProbeOptions o;
    o.ideal_training = quick_config();
    o.score_points = 100;
    const TrainResult src = pretrain_source(source, quick_config());
    const auto arts = pattern_probe(src.params, target, o, {{kTagRecalibrated, src.params}});
    REQUIRE(arts.size() == 3);
    CHECK(arts[0].tag == kTagTargetIdeal);
    CHECK(arts[1].tag == kTagSourceTrained);
    CHECK(arts[2].tag == kTagRecalibrated);
    for (const ProbeArtifact& a : arts) {
        CHECK(static_cast<std::size_t>(a.projection.rows()) == target.rows());
        CHECK(a.projection.cols() == 2);
        CHECK(a.speed.size() == target.rows());
        CHECK(a.direction.size() == target.rows());
    }
    CHECK(arts[1].consistency == arts[2].consistency);

    const fs::path dir = fs::temp_directory_path() / "ssar_test_eval";
    fs::create_directories(dir);
    write_probe_csv(arts, dir / "probe.csv");
    std::ifstream csv(dir / "probe.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "pc1,pc2,speed,direction,tag");
}

TEST_CASE("without drift the source extractor is as consistent as the ideal one") {
    SynthConfig c = small_synth(5, false);
    c.bins_per_day = 4000;
    c.channels = 32;
    const Session source = generate_session(c, 0);
    const Session target = generate_session(c, 1);
    TrainConfig t = quick_config();
    t.epochs = 60;
    const TrainResult src = pretrain_source(source, t);
    ProbeOptions o;
    o.ideal_training = t;
    o.score_points = 300;
    const auto arts = pattern_probe(src.params, target, o);
    CAPTURE(arts[0].consistency);
    CAPTURE(arts[1].consistency);
    CHECK(std::abs(arts[0].consistency - arts[1].consistency) < 0.1);
}
