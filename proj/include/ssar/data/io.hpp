#pragma once

#include <filesystem>

#include "ssar/data/session.hpp"

namespace ssar {

inline constexpr const char* kSessionSchema = "ssar-v1";

// Writes `<stem>.meta.json` and `<stem>.csv`. Values are written in shortest
// round-trip form so load_session(save_session(s)) is bit-exact.
void save_session(const Session& session, const std::filesystem::path& stem);

// Reads the pair written by save_session. Throws InputError naming the file
// and line on malformed input.
Session load_session(const std::filesystem::path& stem);

std::filesystem::path session_meta_path(const std::filesystem::path& stem);
std::filesystem::path session_csv_path(const std::filesystem::path& stem);

}  // namespace ssar
