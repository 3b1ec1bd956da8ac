#include "ssar/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ssar/error.hpp"
#include "ssar/numerics/random.hpp"

namespace ssar::cli {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed so that the
// leftovers can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("config: " + where() + " must be an object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        out = convert<T>(*it, join(key));
    }

    // Calls fn(reader) for a nested object when present.
    template <typename Fn>
    void section(const char* key, Fn&& fn) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        ObjectReader nested(*it, join(key));
        fn(nested);
        nested.finish();
    }

    const json* raw(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError("config: unknown key '" + join(key) + "'");
        }
    }

    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string where() const { return path_.empty() ? "top level" : "'" + path_ + "'"; }

    template <typename T>
    static T convert(const json& v, const std::string& path) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError("config: '" + path + "' must be a boolean");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError("config: '" + path + "' must be a string");
            return v.get<std::string>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError("config: '" + path + "' must be a number");
            const double d = v.get<double>();
            if (!std::isfinite(d)) throw ConfigError("config: '" + path + "' must be finite");
            return d;
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_unsigned()) {
                throw ConfigError("config: '" + path + "' must be a non-negative integer");
            }
            return static_cast<T>(v.get<std::uint64_t>());
        } else {
            static_assert(sizeof(T) == 0, "unsupported config type");
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_synth(ObjectReader& r, SynthConfig& s) {
    r.read("channels", s.channels);
    r.read("bins_per_day", s.bins_per_day);
    r.read("days", s.days);
    std::string task = to_string(s.task);
    r.read("task", task);
    try {
        s.task = parse_reach_task(task);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: '" + r.join("task") + "': " + e.what());
    }
    r.read("seed", s.seed);
    r.read("bin_width", s.bin_width);
    r.read("smooth_sd", s.smooth_sd);
    r.section("reach", [&](ObjectReader& q) {
        q.read("min_distance", s.reach.min_distance);
        q.read("max_distance", s.reach.max_distance);
        q.read("min_duration", s.reach.min_duration);
        q.read("max_duration", s.reach.max_duration);
    });
    r.section("tuning", [&](ObjectReader& q) {
        q.read("baseline_min", s.tuning.baseline_min);
        q.read("baseline_max", s.tuning.baseline_max);
        q.read("depth_min", s.tuning.depth_min);
        q.read("depth_max", s.tuning.depth_max);
        q.read("exponent_min", s.tuning.exponent_min);
        q.read("exponent_max", s.tuning.exponent_max);
        q.read("reference_speed", s.tuning.reference_speed);
    });
    r.section("drift", [&](ObjectReader& q) {
        q.read("pd_rotation", s.drift.pd_rotation);
        q.read("pd_jitter", s.drift.pd_jitter);
        q.read("speed_gain_scale", s.drift.speed_gain_scale);
        q.read("dropout_prob", s.drift.dropout_prob);
        q.read("baseline_shift_scale", s.drift.baseline_shift_scale);
        q.read("seed", s.drift.seed);
    });
}

}  // namespace

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (data.source.empty() != data.target.empty()) fail("data.source and data.target must be given together");
    const SynthConfig& s = data.synth;
    if (s.channels < 1) fail("data.synth.channels must be >= 1");
    if (s.bins_per_day < 2) fail("data.synth.bins_per_day must be >= 2");
    if (s.days < 1) fail("data.synth.days must be >= 1");
    if (!(s.bin_width > 0.0)) fail("data.synth.bin_width must be > 0");
    if (!(s.smooth_sd > 0.0)) fail("data.synth.smooth_sd must be > 0");
    if (s.tuning.baseline_min < 0.0 || s.tuning.baseline_max < s.tuning.baseline_min) {
        fail("data.synth.tuning baseline range is invalid");
    }
    if (s.tuning.depth_max < s.tuning.depth_min) fail("data.synth.tuning depth range is invalid");
    if (s.tuning.exponent_max < s.tuning.exponent_min) fail("data.synth.tuning exponent range is invalid");
    if (!(s.tuning.reference_speed > 0.0)) fail("data.synth.tuning.reference_speed must be > 0");
    try {
        s.drift.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("data.synth.") + e.what());
    }
    if (!data.uses_files() && (data.source_day >= s.days || data.target_day >= s.days)) {
        fail("data.source_day and data.target_day must be < data.synth.days");
    }
    if (split.labeled_fraction < 0.0 || split.labeled_fraction > 1.0) fail("split.labeled_fraction must be in [0, 1]");
    if (split.eval_fraction < 0.0 || split.eval_fraction >= 1.0) fail("split.eval_fraction must be in [0, 1)");
    if (split.labeled_fraction + split.eval_fraction >= 1.0) fail("split fractions must sum to less than 1");
    try {
        hyper.weights.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("hyper: ") + e.what());
    }
    if (hyper.subdomains < 1) fail("hyper.subdomains must be >= 1");
    if (!hyper.bandwidth.median_heuristic && !(hyper.bandwidth.fixed > 0.0)) fail("hyper.bandwidth must be > 0");
    if (train.epochs < 1) fail("train.epochs must be >= 1");
    if (train.batch_size < 2) fail("train.batch_size must be >= 2");
    const AdamHyper& o = train.optimizer;
    if (!(o.lr > 0.0)) fail("train.optimizer.lr must be > 0");
    if (o.beta1 < 0.0 || o.beta1 >= 1.0 || o.beta2 < 0.0 || o.beta2 >= 1.0) {
        fail("train.optimizer betas must be in [0, 1)");
    }
    if (!(o.eps > 0.0)) fail("train.optimizer.eps must be > 0");
    if (o.weight_decay < 0.0) fail("train.optimizer.weight_decay must be >= 0");
    if (run.seeds.empty()) fail("run.seeds must not be empty");
    if (run.jobs < 1) fail("run.jobs must be >= 1");
}

TrainConfig ExperimentConfig::train_config(std::uint64_t seed) const {
    TrainConfig c;
    c.epochs = train.epochs;
    c.batch_size = train.batch_size;
    c.optimizer = train.optimizer;
    c.objective.weights = hyper.weights;
    c.objective.subdomains = hyper.subdomains;
    c.objective.bandwidth = hyper.bandwidth;
    c.seed = seed;
    c.relu_after_last = model.relu_after_last;
    c.warm_start = train.warm_start;
    c.checkpoint_every = train.checkpoint_every;
    c.keep_step_log = false;
    return c;
}

SplitOptions ExperimentConfig::split_options(std::uint64_t seed) const {
    SplitOptions o = split;
    o.seed = derive_seed(split.seed, seed);
    return o;
}

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    c.data.synth.drift = default_drift();
    ObjectReader top(j, "");
    top.section("data", [&](ObjectReader& r) {
        r.read("source", c.data.source);
        r.read("target", c.data.target);
        r.read("source_day", c.data.source_day);
        r.read("target_day", c.data.target_day);
        r.section("synth", [&](ObjectReader& q) { read_synth(q, c.data.synth); });
    });
    top.section("split", [&](ObjectReader& r) {
        r.read("labeled_fraction", c.split.labeled_fraction);
        r.read("eval_fraction", c.split.eval_fraction);
        r.read("seed", c.split.seed);
    });
    top.section("model", [&](ObjectReader& r) {
        r.read("input_dim", c.model.input_dim);
        r.read("relu_after_last", c.model.relu_after_last);
    });
    top.section("hyper", [&](ObjectReader& r) {
        r.read("alpha", c.hyper.weights.alpha);
        r.read("beta", c.hyper.weights.beta);
        r.read("gamma", c.hyper.weights.gamma);
        r.read("theta", c.hyper.weights.theta);
        r.read("subdomains", c.hyper.subdomains);
        if (const json* bw = r.raw("bandwidth")) {
            if (bw->is_string() && bw->get<std::string>() == "median") {
                c.hyper.bandwidth.median_heuristic = true;
            } else if (bw->is_number() && bw->get<double>() > 0.0 && std::isfinite(bw->get<double>())) {
                c.hyper.bandwidth.median_heuristic = false;
                c.hyper.bandwidth.fixed = bw->get<double>();
            } else {
                throw ConfigError("config: 'hyper.bandwidth' must be \"median\" or a positive number");
            }
        }
    });
    top.section("train", [&](ObjectReader& r) {
        r.read("epochs", c.train.epochs);
        r.read("batch_size", c.train.batch_size);
        r.read("warm_start", c.train.warm_start);
        r.read("checkpoint_every", c.train.checkpoint_every);
        r.section("optimizer", [&](ObjectReader& q) {
            q.read("lr", c.train.optimizer.lr);
            q.read("beta1", c.train.optimizer.beta1);
            q.read("beta2", c.train.optimizer.beta2);
            q.read("eps", c.train.optimizer.eps);
            q.read("weight_decay", c.train.optimizer.weight_decay);
        });
    });
    top.section("run", [&](ObjectReader& r) {
        if (const json* seeds = r.raw("seeds")) {
            if (!seeds->is_array()) throw ConfigError("config: 'run.seeds' must be an array");
            c.run.seeds.clear();
            for (const json& s : *seeds) {
                if (!s.is_number_unsigned()) throw ConfigError("config: 'run.seeds' entries must be non-negative integers");
                c.run.seeds.push_back(s.get<std::uint64_t>());
            }
        }
        r.read("output_dir", c.run.output_dir);
        r.read("jobs", c.run.jobs);
    });
    top.finish();
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open config");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const SynthConfig& s) {
    return json{
        {"channels", s.channels},
        {"bins_per_day", s.bins_per_day},
        {"days", s.days},
        {"task", to_string(s.task)},
        {"seed", s.seed},
        {"bin_width", s.bin_width},
        {"smooth_sd", s.smooth_sd},
        {"reach",
         {{"min_distance", s.reach.min_distance},
          {"max_distance", s.reach.max_distance},
          {"min_duration", s.reach.min_duration},
          {"max_duration", s.reach.max_duration}}},
        {"tuning",
         {{"baseline_min", s.tuning.baseline_min},
          {"baseline_max", s.tuning.baseline_max},
          {"depth_min", s.tuning.depth_min},
          {"depth_max", s.tuning.depth_max},
          {"exponent_min", s.tuning.exponent_min},
          {"exponent_max", s.tuning.exponent_max},
          {"reference_speed", s.tuning.reference_speed}}},
        {"drift",
         {{"pd_rotation", s.drift.pd_rotation},
          {"pd_jitter", s.drift.pd_jitter},
          {"speed_gain_scale", s.drift.speed_gain_scale},
          {"dropout_prob", s.drift.dropout_prob},
          {"baseline_shift_scale", s.drift.baseline_shift_scale},
          {"seed", s.drift.seed}}},
    };
}

json to_json(const ExperimentConfig& c) {
    json bandwidth = c.hyper.bandwidth.median_heuristic ? json("median") : json(c.hyper.bandwidth.fixed);
    return json{
        {"data",
         {{"source", c.data.source},
          {"target", c.data.target},
          {"source_day", c.data.source_day},
          {"target_day", c.data.target_day},
          {"synth", to_json(c.data.synth)}}},
        {"split",
         {{"labeled_fraction", c.split.labeled_fraction},
          {"eval_fraction", c.split.eval_fraction},
          {"seed", c.split.seed}}},
        {"model", {{"input_dim", c.model.input_dim}, {"relu_after_last", c.model.relu_after_last}}},
        {"hyper",
         {{"alpha", c.hyper.weights.alpha},
          {"beta", c.hyper.weights.beta},
          {"gamma", c.hyper.weights.gamma},
          {"theta", c.hyper.weights.theta},
          {"subdomains", c.hyper.subdomains},
          {"bandwidth", bandwidth}}},
        {"train",
         {{"epochs", c.train.epochs},
          {"batch_size", c.train.batch_size},
          {"warm_start", c.train.warm_start},
          {"checkpoint_every", c.train.checkpoint_every},
          {"optimizer",
           {{"lr", c.train.optimizer.lr},
            {"beta1", c.train.optimizer.beta1},
            {"beta2", c.train.optimizer.beta2},
            {"eps", c.train.optimizer.eps},
            {"weight_decay", c.train.optimizer.weight_decay}}}}},
        {"run", {{"seeds", c.run.seeds}, {"output_dir", c.run.output_dir}, {"jobs", c.run.jobs}}},
    };
}

}  // namespace ssar::cli
