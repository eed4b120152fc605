#pragma once

// Ideally liquid stock: the mid-price moves by exactly one tick per
// transition, up with probability eta. A window with N transitions has
// return volatility w = sqrt(N) tick/price and diffusion coefficient
// D = (tick/price)^2 N / dt.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "stvol/maxent.hpp"
#include "stvol/market.hpp"
#include "stvol/numeric/rng.hpp"
#include "stvol/parallel.hpp"

namespace stvol::microsim {

struct WalkConfig {
  double tick = 0.01;
  double price0 = 10.0;
  double eta = 0.5;
  std::uint64_t n_transitions = 0;

  /// Throws DomainError on tick <= 0, tick >= price0 or eta outside [0, 1].
  void validate() const;
};

struct WindowSpec {
  double dt = 1.0;
  std::size_t windows = 1;
};

struct PathSummary {
  double terminal = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::uint64_t steps = 0;
};

struct WalkResult {
  double log_return = 0.0;
  PathSummary summary;
  /// Mid-price after every step, only when requested.
  std::vector<double> path;
};

/// Runs cfg.n_transitions ±tick steps from cfg.price0. Throws DomainError
/// naming the step at which the price would reach zero.
WalkResult simulate_walk(const WalkConfig& cfg, std::uint64_t seed, bool keep_path = false);
WalkResult simulate_walk(const WalkConfig& cfg, numeric::Rng& rng, bool keep_path = false);

/// D = (tick/price0)^2 · N / dt.
double implied_diffusion(const WalkConfig& cfg, double dt);

/// Transition count for volatility w at price p: round((w p / tick)^2),
/// ties to even.
std::uint64_t transitions_for(double w, double price, double tick);

struct DoubleStochasticOptions {
  std::uint64_t max_transitions = 100'000'000;
  /// Windows with fewer transitions are flagged (small-N regime).
  std::uint64_t low_count = 10;
};

struct WindowOutcome {
  std::size_t index = 0;
  double w = 0.0;
  std::uint64_t transitions = 0;
  double log_return = 0.0;
  bool low_count = false;
};

/// One independent walk per window: w from the maxent sampler, N from
/// transitions_for(w, price0, tick). `base.n_transitions` is ignored.
/// Window i uses Rng::stream(seed, i), so results do not depend on `exec`.
std::vector<WindowOutcome> simulate_double_stochastic(const maxent::ModelParams& model,
                                                      const maxent::VolScale& scale, const WalkConfig& base,
                                                      const WindowSpec& spec, std::uint64_t seed,
                                                      const DoubleStochasticOptions& opts = {},
                                                      Exec exec = Exec::parallel);

/// CSV `window_index,w_drawn,N,log_return,low_count`.
void write_outcomes_csv(std::ostream& out, std::span<const WindowOutcome> rows);

struct TickStreamConfig {
  WalkConfig walk;                      ///< tick, starting price, eta
  Nanos window = std::chrono::minutes(15);
  std::size_t windows_per_day = 34;     ///< 8.5 hour session
  Date first_day = Date{std::chrono::year{2024} / 1 / 2};
  Nanos session_open = std::chrono::hours(8);
  /// Optional per-day multiplier on the volatility scale (regimes); empty = 1.
  std::vector<double> day_scale;
};

struct SyntheticWindow {
  Timestamp start;
  double w = 0.0;
  std::uint64_t transitions = 0;
};

struct TickStream {
  std::vector<TickQuote> quotes;
  std::vector<SyntheticWindow> windows;
};

/// Quote stream of an ideally liquid stock (spread of one tick) whose
/// transition count per window follows the double-stochastic law. The price
/// path is continuous across windows; N is set from the mid at window start.
/// Each window's first quote sits at its start and each day closes with a
/// quote at the end of its last window.
TickStream simulate_tick_stream(const maxent::ModelParams& model, const maxent::VolScale& scale,
                                const TickStreamConfig& cfg, std::size_t n_windows, std::uint64_t seed);

}  // namespace stvol::microsim
