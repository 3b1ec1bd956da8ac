#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ssar/cli/commands.hpp"
#include "ssar/cli/config.hpp"
#include "ssar/error.hpp"

using namespace ssar;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string err;
};

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ssar_test_cli_" + name);
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

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

Outcome run_cli(const std::string& args, const fs::path& workdir, const std::string& env = "") {
    const fs::path err = workdir / "stderr.txt";
    const std::string cmd = "cd '" + workdir.string() + "' && " + env + " '" + SSAR_CLI_PATH + "' " + args +
                            " > stdout.txt 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.err = read_file(err);
    return o;
}

// Small synthetic problem that trains in well under a second.
const char* kTinyConfig = R"({
  "data": {"synth": {"channels": 8, "bins_per_day": 240}},
  "train": {"epochs": 2, "batch_size": 64},
  "run": {"seeds": [0]}
}
)";

}  // namespace

TEST_CASE("config parsing defaults and strictness") {
    const cli::ExperimentConfig c = cli::parse_config(json::object());
    CHECK(c.hyper.weights.alpha == 1.0);
    CHECK(c.hyper.weights.beta == 0.1);
    CHECK(c.hyper.weights.gamma == 1.0);
    CHECK(c.hyper.weights.theta == 0.01);
    CHECK(c.hyper.subdomains == 8);
    CHECK(c.train.optimizer.lr == 1e-4);
    CHECK(c.train.batch_size == 128);
    CHECK(c.train.epochs == 500);
    CHECK(c.split.labeled_fraction == 0.1);
    CHECK(c.data.synth.days == 4);

    CHECK_THROWS_AS(cli::parse_config(json::parse(R"({"hyper": {"alpah": 1}})")), ConfigError);
    CHECK_THROWS_AS(cli::parse_config(json::parse(R"({"train": {"epochs": "many"}})")), ConfigError);
    CHECK_THROWS_AS(cli::parse_config(json::parse(R"({"split": {"labeled_fraction": 0.9, "eval_fraction": 0.2}})")),
                    ConfigError);
    const cli::ExperimentConfig fixed = cli::parse_config(json::parse(R"({"hyper": {"bandwidth": 2.5}})"));
    CHECK_FALSE(fixed.hyper.bandwidth.median_heuristic);
    CHECK(fixed.hyper.bandwidth.fixed == 2.5);

    // Round trip through the effective-config writer.
    const cli::ExperimentConfig again = cli::parse_config(cli::to_json(fixed));
    CHECK(cli::to_json(again) == cli::to_json(fixed));
}

TEST_CASE("presets are weight masks") {
    const LossWeights naive = cli::apply_preset("naive", LossWeights{});
    CHECK(naive.gamma == 0.0);
    CHECK(naive.theta == 0.0);
    const LossWeights mmd = cli::apply_preset("mmd", LossWeights{});
    CHECK(mmd.beta == 0.0);
    CHECK(mmd.theta == 0.0);
    CHECK(mmd.alpha == 1.0);
    const LossWeights full = cli::apply_preset("ssar", LossWeights{});
    CHECK(full.beta == 0.1);
}

TEST_CASE("generate writes days, refuses to overwrite, and is reproducible") {
    const fs::path dir = scratch("generate");
    write_file(dir / "tiny.json", kTinyConfig);

    REQUIRE(run_cli("generate -c tiny.json -o one --days 1", dir).code == 0);
    CHECK(fs::exists(dir / "one" / "day0.csv"));
    CHECK_FALSE(fs::exists(dir / "one" / "day1.csv"));

    REQUIRE(run_cli("generate -c tiny.json -o all", dir).code == 0);
    for (int k = 0; k < 4; ++k) CHECK(fs::exists(dir / "all" / ("day" + std::to_string(k) + ".csv")));
    const json manifest = json::parse(read_file(dir / "all" / "manifest.json"));
    CHECK(manifest["days"].size() == 4);
    CHECK(read_file(dir / "all" / "config.json") == kTinyConfig);

    // Day 0 is the undrifted day in both runs.
    CHECK(read_file(dir / "one" / "day0.csv") == read_file(dir / "all" / "day0.csv"));

    const std::string before = read_file(dir / "all" / "day2.csv");
    const Outcome refused = run_cli("generate -c tiny.json -o all", dir);
    CHECK(refused.code == 2);
    CHECK(json::parse(refused.err)["error"] == "input");
    REQUIRE(run_cli("generate -c tiny.json -o all --force", dir).code == 0);
    CHECK(read_file(dir / "all" / "day2.csv") == before);
}

TEST_CASE("error exit codes") {
    const fs::path dir = scratch("errors");
    write_file(dir / "bad.json", R"({"train": {"epoch": 3}})");
    const Outcome bad = run_cli("train -c bad.json -o out", dir);
    CHECK(bad.code == 3);
    const json err = json::parse(bad.err);
    CHECK(err["code"] == 3);
    CHECK(err["message"].get<std::string>().find("train.epoch") != std::string::npos);

    CHECK(run_cli("train -c absent.json -o out", dir).code == 2);
    CHECK(run_cli("evaluate -o out --decoder nowhere.json", dir).code == 2);
    CHECK(run_cli("recalibrate --preset bogus -o out", dir).code == 3);
    CHECK(run_cli("train --epochs 0 -o out", dir).code == 3);
    CHECK(run_cli("", dir).code == 3);

    write_file(dir / "tiny.json", kTinyConfig);
    const Outcome diverged = run_cli("train -c tiny.json -o div --lr 1e300", dir);
    CHECK(diverged.code == 4);
    CHECK(fs::exists(dir / "div" / "seed_0" / "last_finite.json"));
}

TEST_CASE("train, evaluate and recalibrate presets") {
    const fs::path dir = scratch("train");
    write_file(dir / "tiny.json", kTinyConfig);

    REQUIRE(run_cli("train -c tiny.json -o tr --seeds 0,1", dir).code == 0);
    for (const char* seed : {"seed_0", "seed_1"}) {
        CHECK(fs::exists(dir / "tr" / seed / "decoder.json"));
        CHECK(fs::exists(dir / "tr" / seed / "metrics.json"));
        std::ifstream log(dir / "tr" / seed / "train_log.jsonl");
        std::size_t lines = 0;
        for (std::string line; std::getline(log, line);) {
            const json rec = json::parse(line);
            CHECK(rec.contains("epoch"));
            ++lines;
        }
        CHECK(lines > 0);
    }
    CHECK(read_file(dir / "tr" / "config.json") == kTinyConfig);

    REQUIRE(run_cli("evaluate -c tiny.json -o ev --decoder tr/seed_0/decoder.json", dir).code == 0);
    const json metrics = json::parse(read_file(dir / "ev" / "metrics.json"));
    CHECK(metrics.contains("metric_convention"));

    REQUIRE(run_cli("recalibrate -c tiny.json -o naive --preset naive", dir).code == 0);
    const json naive = json::parse(read_file(dir / "naive" / "effective_config.json"));
    CHECK(naive["hyper"]["gamma"] == 0.0);
    CHECK(naive["hyper"]["theta"] == 0.0);

    REQUIRE(run_cli("recalibrate -c tiny.json -o mmd --preset mmd --theta 0.5", dir).code == 0);
    const json mmd = json::parse(read_file(dir / "mmd" / "effective_config.json"));
    CHECK(mmd["hyper"]["beta"] == 0.0);
    CHECK(mmd["hyper"]["theta"] == 0.0);

    // Same config and seed twice: identical logs.
    REQUIRE(run_cli("recalibrate -c tiny.json -o again --preset naive", dir).code == 0);
    CHECK(read_file(dir / "naive" / "seed_0" / "metrics.json") == read_file(dir / "again" / "seed_0" / "metrics.json"));
}

TEST_CASE("ablate writes the eight-variant table") {
    const fs::path dir = scratch("ablate");
    write_file(dir / "tiny.json", kTinyConfig);
    REQUIRE(run_cli("ablate -c tiny.json -o ab --epochs 1", dir).code == 0);
    const json j = json::parse(read_file(dir / "ab" / "ablation.json"));
    CHECK(j["rows"].size() == 8);
    const json eff = json::parse(read_file(dir / "ab" / "effective_config.json"));
    CHECK(eff["train"]["epochs"] == 1);
}

TEST_CASE("output root from the environment") {
    const fs::path dir = scratch("env");
    write_file(dir / "tiny.json", kTinyConfig);
    REQUIRE(run_cli("generate -c tiny.json --days 1", dir, "SSAR_OUTPUT_DIR=envroot").code == 0);
    CHECK(fs::exists(dir / "envroot" / "generate" / "day0.csv"));
}

TEST_CASE("help lists the override flags") {
    const fs::path dir = scratch("help");
    REQUIRE(run_cli("recalibrate --help", dir).code == 0);
    const std::string out = read_file(dir / "stdout.txt");
    for (const char* flag : {"--config", "--output-dir", "--seeds", "--alpha", "--beta", "--gamma", "--theta",
                             "--subdomains", "--bandwidth", "--epochs", "--batch-size", "--lr", "--preset",
                             "--warm-start", "--labeled-fraction"}) {
        CAPTURE(flag);
        CHECK(out.find(flag) != std::string::npos);
    }
}
