#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace wardwatt {

using Instant = std::chrono::sys_seconds;

inline constexpr std::chrono::seconds kHour{3600};

// Accepts "YYYY-MM-DDTHH:MM", an optional ":SS" suffix, and a space in place
// of the 'T'. Times are read as UTC; any trailing 'Z' is ignored.
std::optional<Instant> parse_instant(std::string_view text);

// Minute precision, e.g. "2021-01-01T05:00".
std::string format_instant(Instant t);

double hours_between(Instant from, Instant to);

}  // namespace wardwatt
