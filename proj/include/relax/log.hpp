// log.hpp - process-wide diagnostic message sink (silent by default)
#pragma once

#include <functional>
#include <string>

namespace relax {

using LogSink = std::function<void(const std::string&)>;

/// Replaces the sink; an empty function silences logging.
void set_log_sink(LogSink sink);
void log_message(const std::string& message);

}  // namespace relax
