#include "beamid/errors.hpp"

#include <iostream>
#include <mutex>

namespace beamid {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink_slot() {
  static WarningSink sink;
  return sink;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex());
  auto previous = std::move(sink_slot());
  sink_slot() = std::move(sink);
  return previous;
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink_slot())
    sink_slot()(message);
  else
    std::cerr << "warning: " << message << '\n';
}

}  // namespace beamid
