#include "ssar/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace ssar {

namespace {

std::mutex& handler_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& current_handler() {
    static WarningHandler handler = [](const std::string& msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return handler;
}

}  // namespace

void warn(const std::string& message) {
    std::lock_guard lock(handler_mutex());
    if (current_handler()) current_handler()(message);
}

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(handler_mutex());
    WarningHandler previous = std::move(current_handler());
    current_handler() = std::move(handler);
    return previous;
}

}  // namespace ssar
