#pragma once
// Canonical event-log line format: one JSON object per line with fields
// seq, vtime, actor, action, outcome, visibility, origin. Byte-stable across
// runs so logs can be compared directly.

#include <span>
#include <string>

#include "wes/platform.hpp"

namespace wes::platform {

std::string event_to_line(const Event& event);

// Parses one log line back into an Event. Throws std::runtime_error on
// malformed input. The affected-entities field is reconstructed from the
// action arguments.
Event event_from_line(const std::string& line);

// Whole-log serialization, one line per event, each newline-terminated.
std::string log_to_string(std::span<const Event> events);

std::vector<Event> log_from_string(const std::string& text);

}  // namespace wes::platform
