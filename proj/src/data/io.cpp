#include "ssar/data/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ssar/error.hpp"

namespace ssar {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path session_meta_path(const fs::path& stem) {
    return fs::path(stem.string() + ".meta.json");
}

fs::path session_csv_path(const fs::path& stem) {
    return fs::path(stem.string() + ".csv");
}

namespace {

void append_number(std::string& out, double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw Error("save_session: failed to format number");
    out.append(buf, end);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void fail(const fs::path& file, std::size_t line, const std::string& msg) {
    throw InputError(file.string() + ":" + std::to_string(line) + ": " + msg);
}

double parse_number(std::string_view field, const fs::path& file, std::size_t line) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.remove_suffix(1);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        fail(file, line, "malformed number '" + std::string(field) + "'");
    }
    if (!std::isfinite(v)) fail(file, line, "non-finite value");
    return v;
}

std::string trim_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

void save_session(const Session& session, const fs::path& stem) {
    session.validate();
    if (stem.has_parent_path()) fs::create_directories(stem.parent_path());

    json meta;
    meta["schema"] = kSessionSchema;
    meta["day_id"] = session.day_id;
    meta["bin_width"] = session.bin_width;
    meta["channels"] = session.channels();
    meta["rows"] = session.rows();
    meta["normalization"] = {
        {"mean", session.normalization.mean},
        {"sd", session.normalization.sd},
        {"zero_variance", session.normalization.zero_variance},
    };
    {
        std::ofstream out(session_meta_path(stem));
        if (!out) throw InputError("cannot write " + session_meta_path(stem).string());
        out << meta.dump(2) << '\n';
    }

    std::string text = "t";
    for (std::size_t c = 0; c < session.channels(); ++c) text += ",ch_" + std::to_string(c);
    text += ",vx,vy\n";
    for (Eigen::Index r = 0; r < session.features.rows(); ++r) {
        append_number(text, static_cast<double>(r) * session.bin_width);
        for (Eigen::Index c = 0; c < session.features.cols(); ++c) {
            text += ',';
            append_number(text, session.features(r, c));
        }
        for (Eigen::Index c = 0; c < 2; ++c) {
            text += ',';
            append_number(text, session.velocity(r, c));
        }
        text += '\n';
    }
    std::ofstream out(session_csv_path(stem), std::ios::binary);
    if (!out) throw InputError("cannot write " + session_csv_path(stem).string());
    out << text;
}

Session load_session(const fs::path& stem) {
    const fs::path meta_path = session_meta_path(stem);
    const fs::path csv_path = session_csv_path(stem);
    std::ifstream meta_in(meta_path);
    if (!meta_in) throw InputError("cannot open " + meta_path.string());

    Session s;
    std::size_t channels = 0;
    try {
        const json meta = json::parse(meta_in);
        if (meta.at("schema").get<std::string>() != kSessionSchema) {
            throw InputError(meta_path.string() + ": unsupported schema '" + meta.at("schema").get<std::string>() + "'");
        }
        s.day_id = meta.at("day_id").get<std::string>();
        s.bin_width = meta.at("bin_width").get<double>();
        channels = meta.at("channels").get<std::size_t>();
        const json& norm = meta.at("normalization");
        s.normalization.mean = norm.at("mean").get<std::vector<double>>();
        s.normalization.sd = norm.at("sd").get<std::vector<double>>();
        s.normalization.zero_variance = norm.at("zero_variance").get<std::vector<bool>>();
    } catch (const json::exception& e) {
        throw InputError(meta_path.string() + ": malformed metadata: " + e.what());
    }
    if (s.normalization.mean.size() != channels || s.normalization.sd.size() != channels ||
        s.normalization.zero_variance.size() != channels) {
        throw InputError(meta_path.string() + ": normalization arrays do not match channel count");
    }

    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw InputError("cannot open " + csv_path.string());
    std::string line;
    if (!std::getline(in, line)) fail(csv_path, 1, "missing header");
    line = trim_cr(line);
    const auto header = split_fields(line);

    std::vector<std::string> expected{"t"};
    for (std::size_t c = 0; c < channels; ++c) expected.push_back("ch_" + std::to_string(c));
    expected.emplace_back("vx");
    expected.emplace_back("vy");

    std::size_t header_channels = 0;
    bool has_vx = false;
    bool has_vy = false;
    for (auto f : header) {
        if (f.rfind("ch_", 0) == 0) ++header_channels;
        if (f == "vx") has_vx = true;
        if (f == "vy") has_vy = true;
    }
    if (!has_vx) fail(csv_path, 1, "missing velocity column 'vx'");
    if (!has_vy) fail(csv_path, 1, "missing velocity column 'vy'");
    if (header_channels != channels) {
        fail(csv_path, 1, "header has " + std::to_string(header_channels) + " channels but metadata declares " +
                              std::to_string(channels));
    }
    if (header.size() != expected.size()) fail(csv_path, 1, "unexpected column count in header");
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (header[i] != expected[i]) {
            fail(csv_path, 1, "expected column '" + expected[i] + "' but found '" + std::string(header[i]) + "'");
        }
    }

    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        if (fields.size() != expected.size()) {
            fail(csv_path, line_no, "ragged row: expected " + std::to_string(expected.size()) + " fields, got " +
                                        std::to_string(fields.size()));
        }
        for (std::size_t i = 1; i < fields.size(); ++i) values.push_back(parse_number(fields[i], csv_path, line_no));
        parse_number(fields[0], csv_path, line_no);
        ++rows;
    }

    const auto r = static_cast<Eigen::Index>(rows);
    const auto width = static_cast<Eigen::Index>(channels + 2);
    s.features.resize(r, static_cast<Eigen::Index>(channels));
    s.velocity.resize(r, 2);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index c = 0; c < width; ++c) {
            const double v = values[static_cast<std::size_t>(i * width + c)];
            if (c < static_cast<Eigen::Index>(channels)) {
                s.features(i, c) = v;
            } else {
                s.velocity(i, c - static_cast<Eigen::Index>(channels)) = v;
            }
        }
    }
    return s;
}

}  // namespace ssar
