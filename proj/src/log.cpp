#include "lvmr/log.hpp"

#include <iostream>
#include <mutex>
#include <string>

namespace lvmr {
namespace {

std::mutex& sink_mutex()
{
    static std::mutex m;
    return m;
}

LogSink& current_sink()
{
    static LogSink sink;
    return sink;
}

}  // namespace

void log_warning(std::string_view message)
{
    std::lock_guard lock(sink_mutex());
    if (auto& sink = current_sink()) {
        sink(message);
        return;
    }
    std::cerr << "warning: " << message << '\n';
}

LogSink set_warning_sink(LogSink sink)
{
    std::lock_guard lock(sink_mutex());
    auto previous = std::move(current_sink());
    current_sink() = std::move(sink);
    return previous;
}

}  // namespace lvmr
