#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace stvol {

using Date = std::chrono::sys_days;
using Timestamp = std::chrono::sys_time<std::chrono::nanoseconds>;
using Nanos = std::chrono::nanoseconds;

struct TickQuote {
  Timestamp ts;
  double bid = 0.0;
  double ask = 0.0;
  double mid() const noexcept { return 0.5 * (bid + ask); }
};

}  // namespace stvol
