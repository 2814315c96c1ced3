#pragma once

#include <functional>
#include <string>

namespace bnls {

using WarningHandler = std::function<void(const std::string&)>;

/// Installs a sink for numerical warnings (boundary amplitude, support fit...).
/// Returns the previous handler. The default handler prints to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);
void note(const std::string& message);

}  // namespace bnls
