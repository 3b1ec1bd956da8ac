#include "ssar/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ssar/data/io.hpp"
#include "ssar/error.hpp"
#include "ssar/eval/metrics.hpp"
#include "ssar/eval/probe.hpp"
#include "ssar/eval/runners.hpp"
#include "ssar/synth/generator.hpp"

namespace ssar::cli {

namespace fs = std::filesystem;
using nlohmann::json;

LossWeights apply_preset(const std::string& preset, const LossWeights& base) {
    if (preset == "ssar") return base;
    if (preset == "naive") return naive_weights(base);
    if (preset == "mmd") return global_mmd_weights(base);
    throw ConfigError("unknown preset '" + preset + "' (expected ssar, naive or mmd)");
}

fs::path resolve_output_dir(const ExperimentConfig& config, const std::string& command) {
    if (!config.run.output_dir.empty()) return config.run.output_dir;
    if (const char* root = std::getenv("SSAR_OUTPUT_DIR"); root != nullptr && *root != '\0') {
        return fs::path(root) / command;
    }
    return fs::path("ssar_output") / command;
}

SessionPair load_sessions(const ExperimentConfig& config) {
    SessionPair pair;
    if (config.data.uses_files()) {
        pair.source = load_session(config.data.source);
        pair.target = load_session(config.data.target);
    } else {
        pair.source = generate_session(config.data.synth, config.data.source_day);
        pair.target = generate_session(config.data.synth, config.data.target_day);
    }
    if (pair.source.channels() != pair.target.channels()) {
        throw InputError("source has " + std::to_string(pair.source.channels()) + " channels, target has " +
                         std::to_string(pair.target.channels()));
    }
    if (config.model.input_dim != 0 && config.model.input_dim != pair.source.channels()) {
        throw ConfigError("model.input_dim is " + std::to_string(config.model.input_dim) + " but the data has " +
                          std::to_string(pair.source.channels()) + " channels");
    }
    return pair;
}

namespace {

struct Invocation {
    std::string config_path;
    std::vector<std::function<void(ExperimentConfig&)>> overrides;
};

template <typename T>
void add_override(CLI::App* sub, Invocation& inv, const std::string& name, const std::string& help,
                  std::function<void(ExperimentConfig&, const T&)> apply) {
    sub->add_option_function<T>(
        name, [&inv, apply](const T& value) { inv.overrides.push_back([apply, value](ExperimentConfig& c) { apply(c, value); }); },
        help);
}

void add_common(CLI::App* sub, Invocation& inv) {
    sub->add_option("-c,--config", inv.config_path, "Experiment config (JSON); flags override its values");
    add_override<std::string>(sub, inv, "-o,--output-dir", "Output directory",
                              [](ExperimentConfig& c, const std::string& v) { c.run.output_dir = v; });
    sub->add_option_function<std::vector<std::uint64_t>>(
           "--seeds",
           [&inv](const std::vector<std::uint64_t>& v) {
               inv.overrides.push_back([v](ExperimentConfig& c) { c.run.seeds = v; });
           },
           "Comma-separated run seeds")
        ->delimiter(',');
    add_override<std::size_t>(sub, inv, "--jobs", "Concurrent training runs",
                              [](ExperimentConfig& c, const std::size_t& v) { c.run.jobs = v; });
    add_override<std::string>(sub, inv, "--source", "Source session stem",
                              [](ExperimentConfig& c, const std::string& v) { c.data.source = v; });
    add_override<std::string>(sub, inv, "--target", "Target session stem",
                              [](ExperimentConfig& c, const std::string& v) { c.data.target = v; });
    add_override<std::size_t>(sub, inv, "--source-day", "Synthetic source day",
                              [](ExperimentConfig& c, const std::size_t& v) { c.data.source_day = v; });
    add_override<std::size_t>(sub, inv, "--target-day", "Synthetic target day",
                              [](ExperimentConfig& c, const std::size_t& v) { c.data.target_day = v; });
    add_override<std::uint64_t>(sub, inv, "--data-seed", "Synthetic generator seed",
                                [](ExperimentConfig& c, const std::uint64_t& v) { c.data.synth.seed = v; });
    add_override<double>(sub, inv, "--labeled-fraction", "Share of target rows with labels",
                         [](ExperimentConfig& c, const double& v) { c.split.labeled_fraction = v; });
    add_override<double>(sub, inv, "--eval-fraction", "Share of target rows held out for metrics (0: unlabeled rows)",
                         [](ExperimentConfig& c, const double& v) { c.split.eval_fraction = v; });
    add_override<std::uint64_t>(sub, inv, "--split-seed", "Split seed",
                                [](ExperimentConfig& c, const std::uint64_t& v) { c.split.seed = v; });
    add_override<double>(sub, inv, "--alpha", "Global alignment weight",
                         [](ExperimentConfig& c, const double& v) { c.hyper.weights.alpha = v; });
    add_override<double>(sub, inv, "--beta", "Speed-conditional alignment weight",
                         [](ExperimentConfig& c, const double& v) { c.hyper.weights.beta = v; });
    add_override<double>(sub, inv, "--gamma", "Alignment block weight",
                         [](ExperimentConfig& c, const double& v) { c.hyper.weights.gamma = v; });
    add_override<double>(sub, inv, "--theta", "Feature-label consistency weight",
                         [](ExperimentConfig& c, const double& v) { c.hyper.weights.theta = v; });
    add_override<std::size_t>(sub, inv, "--subdomains", "Number of speed bins",
                              [](ExperimentConfig& c, const std::size_t& v) { c.hyper.subdomains = v; });
    add_override<std::string>(sub, inv, "--bandwidth", "MMD kernel width: median or a positive number",
                              [](ExperimentConfig& c, const std::string& v) {
                                  if (v == "median") {
                                      c.hyper.bandwidth.median_heuristic = true;
                                      return;
                                  }
                                  double d = 0.0;
                                  try {
                                      d = std::stod(v);
                                  } catch (const std::exception&) {
                                      throw ConfigError("--bandwidth must be 'median' or a positive number");
                                  }
                                  c.hyper.bandwidth.median_heuristic = false;
                                  c.hyper.bandwidth.fixed = d;
                              });
    add_override<std::size_t>(sub, inv, "--epochs", "Training epochs",
                              [](ExperimentConfig& c, const std::size_t& v) { c.train.epochs = v; });
    add_override<std::size_t>(sub, inv, "--batch-size", "Composite batch size",
                              [](ExperimentConfig& c, const std::size_t& v) { c.train.batch_size = v; });
    add_override<double>(sub, inv, "--lr", "Adam learning rate",
                         [](ExperimentConfig& c, const double& v) { c.train.optimizer.lr = v; });
    add_override<double>(sub, inv, "--weight-decay", "Adam weight decay",
                         [](ExperimentConfig& c, const double& v) { c.train.optimizer.weight_decay = v; });
    add_override<std::size_t>(sub, inv, "--checkpoint-every", "Checkpoint every K epochs (0: off)",
                              [](ExperimentConfig& c, const std::size_t& v) { c.train.checkpoint_every = v; });
}

struct Context {
    ExperimentConfig config;
    fs::path out;
    std::string raw_config;  // verbatim file contents, empty without --config
};

Context load_context(const Invocation& inv, const std::string& command) {
    Context ctx;
    if (!inv.config_path.empty()) {
        std::ifstream in(inv.config_path, std::ios::binary);
        if (!in) throw InputError(inv.config_path + ": cannot open config");
        std::ostringstream ss;
        ss << in.rdbuf();
        ctx.raw_config = ss.str();
        json j;
        try {
            j = json::parse(ctx.raw_config);
        } catch (const json::parse_error& e) {
            throw ConfigError(inv.config_path + ": invalid JSON: " + e.what());
        }
        ctx.config = parse_config(j);
    } else {
        ctx.config = parse_config(json::object());
    }
    for (const auto& apply : inv.overrides) apply(ctx.config);
    ctx.config.validate();
    ctx.out = resolve_output_dir(ctx.config, command);
    return ctx;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!out) throw InputError("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// Creates the output directory and records the config used.
void prepare_output(const Context& ctx) {
    fs::create_directories(ctx.out);
    write_text(ctx.out / "config.json", ctx.raw_config.empty() ? to_json(parse_config(json::object())).dump(2) + "\n"
                                                               : ctx.raw_config);
    write_json(ctx.out / "effective_config.json", to_json(ctx.config));
}

fs::path seed_dir(const Context& ctx, std::uint64_t seed) {
    fs::path dir = ctx.out / ("seed_" + std::to_string(seed));
    fs::create_directories(dir);
    return dir;
}

json loss_json(const LossBreakdown& b) {
    return {{"reg", b.reg},   {"sesa_global", b.sesa_global}, {"sesa_conditional", b.sesa_conditional},
            {"ccc", b.ccc},   {"total", b.total}};
}

// JSONL step log plus periodic checkpoints under `dir`.
class RunRecorder {
public:
    explicit RunRecorder(const fs::path& dir) : dir_(dir), log_(dir / "train_log.jsonl") {
        if (!log_) throw InputError("cannot write " + (dir / "train_log.jsonl").string());
    }

    TrainHooks hooks() {
        TrainHooks h;
        h.on_step = [this](const TrainLogRecord& r) {
            json j = loss_json(r.loss);
            j["epoch"] = r.epoch;
            j["step"] = r.step;
            j["wall_ms"] = r.wall_ms;
            log_ << j.dump() << '\n';
        };
        h.on_checkpoint = [this](std::size_t epoch, const DecoderParams& params) {
            char name[32];
            std::snprintf(name, sizeof(name), "epoch_%05zu.json", epoch);
            fs::create_directories(dir_ / "checkpoints");
            save_decoder(params, dir_ / "checkpoints" / name);
        };
        return h;
    }

    template <typename Fn>
    TrainResult train(Fn&& fn) {
        try {
            return fn(hooks());
        } catch (const TrainingDiverged& e) {
            log_.flush();
            save_decoder(e.last_finite(), dir_ / "last_finite.json");
            throw;
        }
    }

private:
    fs::path dir_;
    std::ofstream log_;
};

json split_json(const RecalibrationTask& task) {
    return {{"source", task.source.rows()},
            {"labeled_target", task.labeled_target.rows()},
            {"unlabeled_target", task.unlabeled_target.rows()},
            {"eval_target", task.eval_target.rows.size()}};
}

bool conditional_enabled(const LossWeights& w) { return w.beta > 0.0 && w.gamma > 0.0; }

RecalibrationTask make_task(const Context& ctx, const SessionPair& pair, std::uint64_t seed,
                            const LossWeights& weights) {
    return split_target(pair.source, pair.target, ctx.config.split_options(seed), conditional_enabled(weights));
}

json metric_document(json body) {
    body["metric_convention"] = kMetricConvention;
    return body;
}

// ---------------------------------------------------------------------------

void cmd_generate(const Invocation& inv, std::optional<std::size_t> days, bool force) {
    Context ctx = load_context(inv, "generate");
    SynthConfig synth = ctx.config.data.synth;
    if (days) {
        if (*days < 1) throw ConfigError("--days must be >= 1");
        synth.days = *days;
    }
    std::vector<fs::path> targets{ctx.out / "manifest.json"};
    for (std::size_t k = 0; k < synth.days; ++k) {
        const fs::path stem = ctx.out / ("day" + std::to_string(k));
        targets.push_back(session_meta_path(stem));
        targets.push_back(session_csv_path(stem));
    }
    if (!force) {
        for (const fs::path& p : targets) {
            if (fs::exists(p)) throw InputError(p.string() + ": output exists (pass --force to overwrite)");
        }
    }
    prepare_output(ctx);
    json manifest;
    manifest["schema"] = "ssar-manifest-v1";
    manifest["synth"] = to_json(synth);
    manifest["days"] = json::array();
    for (std::size_t k = 0; k < synth.days; ++k) {
        const std::string stem = "day" + std::to_string(k);
        const Session s = generate_session(synth, k);
        save_session(s, ctx.out / stem);
        manifest["days"].push_back({{"index", k},
                                    {"day_id", s.day_id},
                                    {"stem", stem},
                                    {"rows", s.rows()},
                                    {"channels", s.channels()},
                                    {"dropped_channels", std::count(s.normalization.zero_variance.begin(),
                                                                    s.normalization.zero_variance.end(), true)}});
        std::cout << "wrote " << (ctx.out / stem).string() << " (" << s.rows() << " rows)\n";
    }
    write_json(ctx.out / "manifest.json", manifest);
}

void cmd_train(const Invocation& inv) {
    Context ctx = load_context(inv, "train");
    const SessionPair pair = load_sessions(ctx.config);
    prepare_output(ctx);
    json summary = json::array();
    for (std::uint64_t seed : ctx.config.run.seeds) {
        const fs::path dir = seed_dir(ctx, seed);
        RunRecorder rec(dir);
        const TrainConfig tc = ctx.config.train_config(seed);
        const TrainResult r = rec.train([&](const TrainHooks& h) { return pretrain_source(pair.source, tc, h); });
        save_decoder(r.params, dir / "decoder.json");
        const MetricReport src = evaluate_session(r.params, pair.source);
        const MetricReport tgt = evaluate_session(r.params, pair.target);
        json doc = metric_document({{"seed", seed},
                                    {"final_loss", loss_json(r.epochs.back().mean_loss)},
                                    {"source", metrics_json(src)},
                                    {"target", metrics_json(tgt)}});
        write_json(dir / "metrics.json", doc);
        summary.push_back(doc);
        std::cout << "seed " << seed << ": source cc " << src.cc << " r2 " << src.r2 << ", target cc " << tgt.cc
                  << " r2 " << tgt.r2 << "\n";
    }
    write_json(ctx.out / "summary.json", summary);
}

void cmd_recalibrate(const Invocation& inv, const std::string& preset, const std::string& init_path,
                     bool warm_start) {
    Context ctx = load_context(inv, "recalibrate");
    if (warm_start) ctx.config.train.warm_start = true;
    // The preset masks weights after every flag override.
    ctx.config.hyper.weights = apply_preset(preset, ctx.config.hyper.weights);
    const LossWeights weights = ctx.config.hyper.weights;
    std::optional<DecoderParams> init;
    if (ctx.config.train.warm_start) {
        if (init_path.empty()) throw ConfigError("warm start needs --init <decoder.json>");
        init = load_decoder(init_path);
    }
    const SessionPair pair = load_sessions(ctx.config);
    if (init && init->input_dim() != pair.source.channels()) {
        throw InputError(init_path + ": decoder input_dim does not match the data");
    }
    prepare_output(ctx);
    json summary = json::array();
    for (std::uint64_t seed : ctx.config.run.seeds) {
        const fs::path dir = seed_dir(ctx, seed);
        const RecalibrationTask task = make_task(ctx, pair, seed, weights);
        TrainConfig tc = ctx.config.train_config(seed);
        tc.objective.weights = weights;
        RunRecorder rec(dir);
        const TrainResult r = rec.train([&](const TrainHooks& h) {
            return recalibrate_ssar(task, tc, h, init ? &*init : nullptr);
        });
        save_decoder(r.params, dir / "decoder.json");
        const MetricReport m = evaluate(r.params, task);
        json doc = metric_document({{"seed", seed},
                                    {"preset", preset},
                                    {"split", split_json(task)},
                                    {"final_loss", loss_json(r.epochs.back().mean_loss)},
                                    {"eval", metrics_json(m)}});
        write_json(dir / "metrics.json", doc);
        summary.push_back(doc);
        std::cout << "seed " << seed << " [" << preset << "]: eval cc " << m.cc << " r2 " << m.r2 << "\n";
    }
    write_json(ctx.out / "summary.json", summary);
}

void cmd_evaluate(const Invocation& inv, const std::string& decoder_path) {
    Context ctx = load_context(inv, "evaluate");
    const DecoderParams params = load_decoder(decoder_path);
    const SessionPair pair = load_sessions(ctx.config);
    if (params.input_dim() != pair.target.channels()) {
        throw InputError(decoder_path + ": decoder input_dim does not match the data");
    }
    prepare_output(ctx);
    json doc = metric_document({{"decoder", decoder_path},
                                {"source", metrics_json(evaluate_session(params, pair.source))},
                                {"target", metrics_json(evaluate_session(params, pair.target))}});
    doc["eval"] = json::array();
    for (std::uint64_t seed : ctx.config.run.seeds) {
        const RecalibrationTask task = make_task(ctx, pair, seed, ctx.config.hyper.weights);
        const MetricReport m = evaluate(params, task);
        doc["eval"].push_back({{"seed", seed}, {"metrics", metrics_json(m)}});
        std::cout << "seed " << seed << ": eval cc " << m.cc << " r2 " << m.r2 << "\n";
    }
    write_json(ctx.out / "metrics.json", doc);
}

RunOptions run_options(const Context& ctx) {
    RunOptions o;
    o.jobs = ctx.config.run.jobs;
    o.progress = [](const std::string& line) { std::cerr << line << "\n"; };
    return o;
}

void cmd_ablate(const Invocation& inv) {
    Context ctx = load_context(inv, "ablate");
    const SessionPair pair = load_sessions(ctx.config);
    prepare_output(ctx);
    std::vector<SeededTask> tasks;
    for (std::uint64_t seed : ctx.config.run.seeds) {
        tasks.push_back({seed, make_task(ctx, pair, seed, ctx.config.hyper.weights)});
    }
    const std::vector<AblationRow> rows =
        run_ablation(tasks, ctx.config.train_config(ctx.config.run.seeds.front()), run_options(ctx));
    write_ablation_reports(rows, ctx.out / "ablation.json", ctx.out / "ablation.csv");
    for (const AblationRow& row : rows) {
        std::cout << row.mask.label() << "  median cc " << row.median_cc << "  median r2 " << row.median_r2 << "\n";
    }
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || !std::isfinite(v)) {
            throw ConfigError("--values: '" + item + "' is not a number");
        }
        values.push_back(v);
    }
    if (values.empty()) throw ConfigError("--values must list at least one value");
    return values;
}

void cmd_sweep(const Invocation& inv, const std::string& axis_name, const std::string& values_text) {
    Context ctx = load_context(inv, "sweep");
    SweepAxis axis;
    try {
        axis = parse_sweep_axis(axis_name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    std::vector<double> values;
    if (values_text.empty()) {
        values = axis == SweepAxis::LabeledFraction ? std::vector<double>{0.0, 0.01, 0.05, 0.1, 0.3, 0.5}
                                                    : std::vector<double>{1, 2, 3};
    } else {
        values = parse_values(values_text);
    }
    const SessionPair pair = load_sessions(ctx.config);
    if (axis == SweepAxis::TimeSpan) {
        if (ctx.config.data.uses_files()) throw ConfigError("the time_span sweep needs synthetic data");
        for (double v : values) {
            if (v < 1.0 || v != std::floor(v)) throw ConfigError("time_span values must be day indices >= 1");
        }
    } else {
        for (double v : values) {
            if (v < 0.0 || v + ctx.config.split.eval_fraction >= 1.0) {
                throw ConfigError("labeled_fraction values must lie in [0, 1 - eval_fraction)");
            }
        }
    }
    prepare_output(ctx);

    std::map<double, Session> days;
    TaskFactory factory = [&](double value, std::uint64_t seed) {
        SplitOptions opts = ctx.config.split_options(seed);
        const Session* target = &pair.target;
        if (axis == SweepAxis::TimeSpan) {
            auto it = days.find(value);
            if (it == days.end()) {
                it = days.emplace(value, generate_session(ctx.config.data.synth, static_cast<std::size_t>(value))).first;
            }
            target = &it->second;
        } else {
            opts.labeled_fraction = value;
        }
        return split_target(pair.source, *target, opts, conditional_enabled(ctx.config.hyper.weights));
    };
    const SweepReport report = run_sweep(axis, values, ctx.config.run.seeds,
                                         ctx.config.train_config(ctx.config.run.seeds.front()), factory,
                                         run_options(ctx));
    write_sweep_reports(report, ctx.out / "sweep.json", ctx.out / "sweep.csv");
    for (double v : values) {
        std::cout << to_string(axis) << "=" << v;
        for (const char* method : kSweepMethods) std::cout << "  " << method << " " << report.median_cc(method, v);
        std::cout << "\n";
    }
}

void cmd_probe(const Invocation& inv, std::size_t score_points) {
    Context ctx = load_context(inv, "probe");
    const SessionPair pair = load_sessions(ctx.config);
    prepare_output(ctx);
    json summary = json::array();
    for (std::uint64_t seed : ctx.config.run.seeds) {
        const TrainConfig tc = ctx.config.train_config(seed);
        const DecoderParams source = pretrain_source(pair.source, tc).params;
        const RecalibrationTask task = make_task(ctx, pair, seed, ctx.config.hyper.weights);
        TrainConfig mmd = tc;
        mmd.objective.weights = global_mmd_weights(tc.objective.weights);
        const DecoderParams full = recalibrate_ssar(task, tc).params;
        const DecoderParams global_only = recalibrate_ssar(task, mmd).params;

        ProbeOptions opts;
        opts.ideal_training = tc;
        opts.score_points = score_points;
        opts.seed = seed;
        const auto artifacts = pattern_probe(source, pair.target, opts,
                                             {{kTagRecalibrated, full}, {std::string(kTagRecalibrated) + "-mmd", global_only}});
        write_probe_csv(artifacts, ctx.out / ("probe_seed_" + std::to_string(seed) + ".csv"));
        for (const ProbeArtifact& a : artifacts) {
            summary.push_back({{"seed", seed},
                               {"tag", a.tag},
                               {"consistency", a.consistency},
                               {"speed_consistency", a.speed_consistency},
                               {"explained_variance", a.explained_variance}});
            std::cout << "seed " << seed << " " << a.tag << ": consistency " << a.consistency << ", speed "
                      << a.speed_consistency << "\n";
        }
    }
    write_json(ctx.out / "probe.json", summary);
}

void report_error(const char* kind, int code, const std::string& message) {
    std::cerr << json{{"error", kind}, {"code", code}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Cross-day decoder recalibration with speed-enhanced subdomain alignment"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    Invocation inv;
    std::optional<std::size_t> days;
    bool force = false;
    std::string preset = "ssar";
    std::string init_path;
    bool warm_start = false;
    std::string decoder_path;
    std::string axis = "labeled_fraction";
    std::string values;
    std::size_t score_points = 500;

    CLI::App* gen = app.add_subcommand("generate", "Write synthetic day0..dayK sessions and a manifest");
    add_common(gen, inv);
    gen->add_option("--days", days, "Number of days to write (day 0 has no drift)");
    gen->add_flag("--force", force, "Overwrite existing output");

    CLI::App* train = app.add_subcommand("train", "Train a source-day decoder");
    add_common(train, inv);

    CLI::App* recal = app.add_subcommand("recalibrate", "Recalibrate on the target day");
    add_common(recal, inv);
    recal->add_option("--preset", preset, "ssar, naive (gamma=theta=0) or mmd (beta=theta=0)")
        ->check(CLI::IsMember({"ssar", "naive", "mmd"}));
    recal->add_option("--init", init_path, "Source decoder for --warm-start");
    recal->add_flag("--warm-start", warm_start, "Start from --init instead of a random init");

    CLI::App* eval = app.add_subcommand("evaluate", "Score a saved decoder");
    add_common(eval, inv);
    eval->add_option("--decoder", decoder_path, "Decoder JSON")->required();

    CLI::App* ablate = app.add_subcommand("ablate", "Run the 8-variant ablation");
    add_common(ablate, inv);

    CLI::App* sweep = app.add_subcommand("sweep", "Sweep time span or labeled fraction");
    add_common(sweep, inv);
    sweep->add_option("--axis", axis, "time_span or labeled_fraction");
    sweep->add_option("--values", values, "Comma-separated values (default depends on the axis)");

    CLI::App* probe = app.add_subcommand("probe", "PCA probe of extracted target features");
    add_common(probe, inv);
    probe->add_option("--score-points", score_points, "Rows subsampled for the consistency scores");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", kExitConfig, e.what());
        return kExitConfig;
    } catch (const ConfigError& e) {
        report_error("config", kExitConfig, e.what());
        return kExitConfig;
    }

    try {
        if (gen->parsed()) cmd_generate(inv, days, force);
        else if (train->parsed()) cmd_train(inv);
        else if (recal->parsed()) cmd_recalibrate(inv, preset, init_path, warm_start);
        else if (eval->parsed()) cmd_evaluate(inv, decoder_path);
        else if (ablate->parsed()) cmd_ablate(inv);
        else if (sweep->parsed()) cmd_sweep(inv, axis, values);
        else if (probe->parsed()) cmd_probe(inv, score_points);
    } catch (const InputError& e) {
        report_error("input", kExitInput, e.what());
        return kExitInput;
    } catch (const ConfigError& e) {
        report_error("config", kExitConfig, e.what());
        return kExitConfig;
    } catch (const DivergenceError& e) {
        report_error("divergence", kExitDivergence, e.what());
        return kExitDivergence;
    } catch (const std::exception& e) {
        report_error("internal", kExitFailure, e.what());
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace ssar::cli
