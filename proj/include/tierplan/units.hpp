#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace tierplan {

// Simulation and profile times are integer nanoseconds end to end; float
// event times would break reproducibility of the event order.
using Duration = std::chrono::nanoseconds;

using Count = std::uint64_t;
using Bytes = std::uint64_t;

constexpr Duration kZero = Duration{0};

constexpr std::uint64_t ceil_div(std::uint64_t num, std::uint64_t den) {
  return num == 0 ? 0 : 1 + (num - 1) / den;
}

constexpr Bytes kMiB = 1024ull * 1024ull;
constexpr Bytes kGiB = 1024ull * kMiB;

// "5.6ms", "16us", "2s", "1016384ns"; bare numbers are nanoseconds.
Duration parse_duration(const std::string& text);

// "8gbps", "250mbps", "8e9" (bare numbers are bits per second).
double parse_bandwidth_bps(const std::string& text);

std::string format_duration(Duration d);

}  // namespace tierplan
