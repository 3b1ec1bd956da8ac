#include "ssar/eval/runners.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ssar/error.hpp"

namespace ssar {

LossWeights VariantMask::apply(LossWeights base) const {
    if (!global) base.alpha = 0.0;
    if (!conditional) base.beta = 0.0;
    if (!contrastive) base.theta = 0.0;
    return base;
}

std::string VariantMask::label() const {
    std::string off;
    auto add = [&](const char* name) {
        if (!off.empty()) off += ',';
        off += name;
        off += "=0";
    };
    if (!global) add("alpha");
    if (!conditional) add("beta");
    if (!contrastive) add("theta");
    return off.empty() ? "SSAR" : "SSAR(" + off + ")";
}

const std::array<VariantMask, 8>& ablation_variants() {
    static const std::array<VariantMask, 8> variants{{
        {false, false, false},
        {false, false, true},
        {false, true, false},
        {true, false, false},
        {true, true, false},
        {true, false, true},
        {false, true, true},
        {true, true, true},
    }};
    return variants;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

// Runs independent jobs on up to `jobs` threads. Each job writes only its own
// result slot, so output does not depend on scheduling.
void run_jobs(std::vector<std::function<void()>>& work, std::size_t jobs) {
    if (jobs <= 1 || work.size() <= 1) {
        for (auto& w : work) w();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < std::min(jobs, work.size()); ++t) {
        threads.emplace_back([&] {
            for (std::size_t i = next++; i < work.size(); i = next++) {
                try {
                    work[i]();
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    if (failure) std::rethrow_exception(failure);
}

void report_progress(const RunOptions& options, std::mutex& m, const std::string& msg) {
    if (!options.progress) return;
    std::lock_guard lock(m);
    options.progress(msg);
}

}  // namespace

std::vector<AblationRow> run_ablation(std::span<const SeededTask> tasks, const TrainConfig& base,
                                      const RunOptions& options) {
    if (tasks.empty()) throw std::invalid_argument("run_ablation: no tasks");
    const auto& variants = ablation_variants();
    std::vector<AblationRow> rows(variants.size());
    std::vector<std::function<void()>> work;
    std::mutex progress_mutex;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        rows[v].mask = variants[v];
        rows[v].cells.resize(tasks.size());
        for (std::size_t s = 0; s < tasks.size(); ++s) {
            work.emplace_back([&, v, s] {
                TrainConfig cfg = base;
                cfg.seed = tasks[s].seed;
                cfg.objective.weights = variants[v].apply(base.objective.weights);
                cfg.keep_step_log = false;
                const TrainResult trained = recalibrate_ssar(tasks[s].task, cfg);
                CellResult& cell = rows[v].cells[s];
                cell.variant = variants[v].label();
                cell.seed = tasks[s].seed;
                cell.report = evaluate(trained.params, tasks[s].task);
                report_progress(options, progress_mutex,
                                cell.variant + " seed " + std::to_string(cell.seed) + " cc " +
                                    std::to_string(cell.report.cc));
            });
        }
    }
    run_jobs(work, options.jobs);
    for (AblationRow& row : rows) {
        std::vector<double> cc;
        std::vector<double> r2;
        for (const CellResult& c : row.cells) {
            cc.push_back(c.report.cc);
            r2.push_back(c.report.r2);
        }
        row.median_cc = median(cc);
        row.median_r2 = median(r2);
    }
    return rows;
}

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "time_span") return SweepAxis::TimeSpan;
    if (name == "labeled_fraction") return SweepAxis::LabeledFraction;
    throw std::invalid_argument("unknown sweep axis '" + name + "' (expected time_span or labeled_fraction)");
}

std::string to_string(SweepAxis axis) {
    return axis == SweepAxis::TimeSpan ? "time_span" : "labeled_fraction";
}

namespace {

double sweep_median(const SweepReport& r, const std::string& method, double value, bool cc) {
    std::vector<double> xs;
    for (const CellResult& c : r.cells) {
        if (c.variant == method && c.value == value) xs.push_back(cc ? c.report.cc : c.report.r2);
    }
    if (xs.empty()) throw std::invalid_argument("sweep report has no cells for " + method);
    return median(xs);
}

}  // namespace

double SweepReport::median_cc(const std::string& method, double value) const {
    return sweep_median(*this, method, value, true);
}

double SweepReport::median_r2(const std::string& method, double value) const {
    return sweep_median(*this, method, value, false);
}

SweepReport run_sweep(SweepAxis axis, std::span<const double> values, std::span<const std::uint64_t> seeds,
                      const TrainConfig& base, const TaskFactory& factory, const RunOptions& options) {
    if (values.empty()) throw std::invalid_argument("run_sweep: no values");
    if (seeds.empty()) throw std::invalid_argument("run_sweep: no seeds");

    SweepReport report;
    report.axis = axis;
    report.values.assign(values.begin(), values.end());

    // tasks[v][s]
    std::vector<std::vector<RecalibrationTask>> tasks(values.size());
    for (std::size_t v = 0; v < values.size(); ++v) {
        for (std::uint64_t seed : seeds) tasks[v].push_back(factory(values[v], seed));
    }

    const std::size_t methods = 3;
    report.cells.resize(values.size() * seeds.size() * (methods + 1));
    auto slot = [&](std::size_t v, std::size_t s, std::size_t m) -> CellResult& {
        return report.cells[(v * seeds.size() + s) * (methods + 1) + m];
    };

    std::vector<std::function<void()>> work;
    std::mutex progress_mutex;
    std::vector<DecoderParams> source_decoders(seeds.size());
    // Source-only decoders first; they feed the "uncalibrated" cells.
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        work.emplace_back([&, s] {
            TrainConfig cfg = base;
            cfg.seed = seeds[s];
            cfg.keep_step_log = false;
            source_decoders[s] = pretrain_source(tasks[0][s].source, cfg).params;
        });
    }
    run_jobs(work, options.jobs);
    work.clear();

    for (std::size_t v = 0; v < values.size(); ++v) {
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            CellResult& un = slot(v, s, methods);
            un.variant = kSweepMethods[3];
            un.value = values[v];
            un.seed = seeds[s];
            un.report = evaluate(source_decoders[s], tasks[v][s]);
            for (std::size_t m = 0; m < methods; ++m) {
                work.emplace_back([&, v, s, m] {
                    TrainConfig cfg = base;
                    cfg.seed = seeds[s];
                    cfg.keep_step_log = false;
                    if (m == 1) cfg.objective.weights = naive_weights(base.objective.weights);
                    if (m == 2) cfg.objective.weights = global_mmd_weights(base.objective.weights);
                    const TrainResult trained = recalibrate_ssar(tasks[v][s], cfg);
                    CellResult& cell = slot(v, s, m);
                    cell.variant = kSweepMethods[m];
                    cell.value = values[v];
                    cell.seed = seeds[s];
                    cell.report = evaluate(trained.params, tasks[v][s]);
                    report_progress(options, progress_mutex,
                                    cell.variant + " @" + std::to_string(cell.value) + " seed " +
                                        std::to_string(cell.seed) + " cc " + std::to_string(cell.report.cc));
                });
            }
        }
    }
    run_jobs(work, options.jobs);
    return report;
}

nlohmann::json metrics_json(const MetricReport& m) {
    return {{"cc", m.cc}, {"r2", m.r2}, {"cc_per_dim", m.cc_per_dim}, {"r2_per_dim", m.r2_per_dim},
            {"n_eval", m.n_eval}};
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out.precision(17);
    return out;
}

}  // namespace

void write_ablation_reports(const std::vector<AblationRow>& rows, const std::filesystem::path& json_path,
                            const std::filesystem::path& csv_path) {
    nlohmann::json j;
    j["metric_convention"] = kMetricConvention;
    j["rows"] = nlohmann::json::array();
    for (const AblationRow& row : rows) {
        nlohmann::json cells = nlohmann::json::array();
        for (const CellResult& c : row.cells) cells.push_back({{"seed", c.seed}, {"metrics", metrics_json(c.report)}});
        j["rows"].push_back({{"variant", row.mask.label()},
                             {"global", row.mask.global},
                             {"conditional", row.mask.conditional},
                             {"contrastive", row.mask.contrastive},
                             {"median_cc", row.median_cc},
                             {"median_r2", row.median_r2},
                             {"cells", cells}});
    }
    open_for_write(json_path) << j.dump(2) << '\n';

    auto csv = open_for_write(csv_path);
    csv << "# metric convention: " << kMetricConvention << '\n';
    csv << "variant,seed,cc,r2\n";
    for (const AblationRow& row : rows) {
        for (const CellResult& c : row.cells) {
            csv << '"' << c.variant << '"' << ',' << c.seed << ',' << c.report.cc << ',' << c.report.r2 << '\n';
        }
    }
}

void write_sweep_reports(const SweepReport& report, const std::filesystem::path& json_path,
                         const std::filesystem::path& csv_path) {
    nlohmann::json j;
    j["metric_convention"] = kMetricConvention;
    j["axis"] = to_string(report.axis);
    j["values"] = report.values;
    j["cells"] = nlohmann::json::array();
    for (const CellResult& c : report.cells) {
        j["cells"].push_back(
            {{"variant", c.variant}, {"value", c.value}, {"seed", c.seed}, {"metrics", metrics_json(c.report)}});
    }
    nlohmann::json medians = nlohmann::json::array();
    for (double v : report.values) {
        for (const char* m : kSweepMethods) {
            medians.push_back({{"variant", m}, {"value", v}, {"median_cc", report.median_cc(m, v)},
                               {"median_r2", report.median_r2(m, v)}});
        }
    }
    j["medians"] = medians;
    open_for_write(json_path) << j.dump(2) << '\n';

    auto csv = open_for_write(csv_path);
    csv << "# metric convention: " << kMetricConvention << '\n';
    csv << "variant,value,seed,cc,r2\n";
    for (const CellResult& c : report.cells) {
        csv << c.variant << ',' << c.value << ',' << c.seed << ',' << c.report.cc << ',' << c.report.r2 << '\n';
    }
}

}  // namespace ssar
