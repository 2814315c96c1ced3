#include "bnls/log.hpp"

#include <iostream>
#include <mutex>

namespace bnls {

namespace {

std::mutex& sink_mutex()
{
    static std::mutex m;
    return m;
}

WarningHandler& sink()
{
    static WarningHandler h = [](const std::string& m) { std::cerr << m << '\n'; };
    return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler)
{
    std::lock_guard lock(sink_mutex());
    auto prev = std::move(sink());
    sink() = std::move(handler);
    return prev;
}

void warn(const std::string& message)
{
    std::lock_guard lock(sink_mutex());
    if (sink()) sink()("warning: " + message);
}

void note(const std::string& message)
{
    std::lock_guard lock(sink_mutex());
    if (sink()) sink()("note: " + message);
}

}  // namespace bnls
