#pragma once

#include <functional>
#include <string_view>

namespace lvmr {

using LogSink = std::function<void(std::string_view)>;

/// Writes a warning line to standard error, or to the sink installed by set_warning_sink.
void log_warning(std::string_view message);

/// Replaces the warning sink; an empty function restores the default. Returns the previous sink.
LogSink set_warning_sink(LogSink sink);

}  // namespace lvmr
