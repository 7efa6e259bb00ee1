#pragma once

#include <cstdint>
#include <functional>

namespace checkin {

// Simulation time in whole seconds since the simulation epoch.
using Seconds = std::int64_t;

constexpr Seconds kSecondsPerDay = 86'400;

enum class UserId : std::uint32_t {};
enum class VenueId : std::uint32_t {};

constexpr std::uint32_t raw(UserId id) { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t raw(VenueId id) { return static_cast<std::uint32_t>(id); }

// Calendar day of a timestamp (UTC-free simulation days).
constexpr std::int64_t day_of(Seconds t) {
  return t >= 0 ? t / kSecondsPerDay : -((-t + kSecondsPerDay - 1) / kSecondsPerDay);
}

}  // namespace checkin
