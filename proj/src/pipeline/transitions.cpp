#include <cmath>

#include "stvol/error.hpp"
#include "stvol/pipeline/analysis.hpp"

namespace stvol::pipeline {

std::vector<TransitionEvent> detect_transitions(const TickSeries& ticks) {
  if (!(ticks.tick_size > 0.0)) throw DomainError("tick series '" + ticks.ticker + "' has no tick size");
  std::vector<TransitionEvent> events;
  if (ticks.quotes.empty()) return events;
  const double half = 0.5 * ticks.tick_size;
  // Mid in half-ticks: (bid + ask) / 2 / (tick / 2).
  auto grid = [&](const TickQuote& q) { return std::llround((q.bid + q.ask) / ticks.tick_size); };
  auto prev = grid(ticks.quotes.front());
  for (std::size_t i = 1; i < ticks.quotes.size(); ++i) {
    const auto cur = grid(ticks.quotes[i]);
    if (cur != prev) {
      events.push_back({ticks.quotes[i].ts, static_cast<double>(prev) * half, static_cast<double>(cur) * half});
      prev = cur;
    }
  }
  return events;
}

}  // namespace stvol::pipeline
