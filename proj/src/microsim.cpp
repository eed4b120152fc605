#include "stvol/microsim.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

#include "stvol/error.hpp"

namespace stvol::microsim {
namespace {

// Net displacement and prefix extrema of the 8 fair-coin steps encoded in a
// byte, least significant bit first, 1 = up.
struct ByteWalk {
  std::int8_t net = 0;
  std::int8_t low = 0;
  std::int8_t high = 0;
};

constexpr std::array<ByteWalk, 256> make_byte_table() {
  std::array<ByteWalk, 256> table{};
  for (int v = 0; v < 256; ++v) {
    int pos = 0, low = 0, high = 0;
    for (int bit = 0; bit < 8; ++bit) {
      pos += ((v >> bit) & 1) ? 1 : -1;
      low = std::min(low, pos);
      high = std::max(high, pos);
    }
    table[v] = {static_cast<std::int8_t>(pos), static_cast<std::int8_t>(low), static_cast<std::int8_t>(high)};
  }
  return table;
}

constexpr auto kByteTable = make_byte_table();

[[noreturn]] void ruin(std::uint64_t step, const WalkConfig& cfg) {
  std::ostringstream msg;
  msg << "walk reaches a non-positive price at step " << step << " (price0 " << cfg.price0 << ", tick "
      << cfg.tick << "); use a smaller tick or fewer transitions";
  throw DomainError(msg.str());
}

}  // namespace

void WalkConfig::validate() const {
  if (!(tick > 0.0) || !std::isfinite(tick)) throw DomainError("tick must be positive");
  if (!(price0 > 0.0) || !std::isfinite(price0)) throw DomainError("price0 must be positive");
  if (!(tick < price0)) throw DomainError("tick must be smaller than price0");
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
}

WalkResult simulate_walk(const WalkConfig& cfg, std::uint64_t seed, bool keep_path) {
  auto rng = numeric::Rng::stream(seed, 0);
  return simulate_walk(cfg, rng, keep_path);
}

WalkResult simulate_walk(const WalkConfig& cfg, numeric::Rng& rng, bool keep_path) {
  cfg.validate();
  const std::uint64_t n = cfg.n_transitions;
  // Smallest position (in ticks) that keeps the price strictly positive.
  const auto floor_pos = static_cast<std::int64_t>(std::floor(-cfg.price0 / cfg.tick)) + 1;
  std::int64_t pos = 0, low = 0, high = 0;
  std::uint64_t step = 0;
  WalkResult out;
  if (keep_path) out.path.reserve(n);

  auto single = [&](bool up) {
    pos += up ? 1 : -1;
    ++step;
    if (pos < floor_pos || cfg.price0 + cfg.tick * static_cast<double>(pos) <= 0.0) ruin(step, cfg);
    low = std::min(low, pos);
    high = std::max(high, pos);
    if (keep_path) out.path.push_back(cfg.price0 + cfg.tick * static_cast<double>(pos));
  };

  if (cfg.eta == 0.5 && !keep_path) {
    // Fair coin: each random bit is one step; resolve 8 steps per table lookup.
    while (n - step >= 64) {
      std::uint64_t word = rng();
      for (int b = 0; b < 8; ++b, word >>= 8) {
        const auto& e = kByteTable[word & 0xff];
        if (pos + e.low < floor_pos) {
          for (int bit = 0; bit < 8; ++bit) single((word >> bit) & 1);
          continue;
        }
        low = std::min<std::int64_t>(low, pos + e.low);
        high = std::max<std::int64_t>(high, pos + e.high);
        pos += e.net;
        step += 8;
      }
    }
    if (step < n) {
      const std::uint64_t word = rng();
      for (int bit = 0; step < n; ++bit) single((word >> bit) & 1);
    }
  } else if (cfg.eta == 0.5) {
    std::uint64_t word = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      if (i % 64 == 0) word = rng();
      single((word >> (i % 64)) & 1);
    }
  } else {
    for (std::uint64_t i = 0; i < n; ++i) single(rng.uniform() < cfg.eta);
  }

  out.summary.steps = step;
  out.summary.terminal = cfg.price0 + cfg.tick * static_cast<double>(pos);
  out.summary.min = cfg.price0 + cfg.tick * static_cast<double>(low);
  out.summary.max = cfg.price0 + cfg.tick * static_cast<double>(high);
  out.log_return = std::log1p(cfg.tick * static_cast<double>(pos) / cfg.price0);
  return out;
}

double implied_diffusion(const WalkConfig& cfg, double dt) {
  cfg.validate();
  if (!(dt > 0.0)) throw DomainError("observation time dt must be positive");
  const double rel = cfg.tick / cfg.price0;
  return rel * rel * static_cast<double>(cfg.n_transitions) / dt;
}

std::uint64_t transitions_for(double w, double price, double tick) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("volatility must be finite and non-negative");
  const double ratio = w * price / tick;
  const double count = ratio * ratio;
  if (count >= 1.8e19) throw DomainError("transition count overflows");
  // nearbyint honours the default FE_TONEAREST mode: halves go to even.
  return static_cast<std::uint64_t>(std::nearbyint(count));
}

std::vector<WindowOutcome> simulate_double_stochastic(const maxent::ModelParams& model,
                                                      const maxent::VolScale& scale, const WalkConfig& base,
                                                      const WindowSpec& spec, std::uint64_t seed,
                                                      const DoubleStochasticOptions& opts, Exec exec) {
  base.validate();
  if (spec.windows == 0) return {};
  if (!(spec.dt > 0.0)) throw DomainError("observation time dt must be positive");
  if (!(scale.model() == model)) throw ContractError("volatility scale was built for a different model");
  const double w0 = scale.w0();
  const double k = model.shape();
  const double inv_d = 1.0 / model.delta();
  std::vector<WindowOutcome> out(spec.windows);
  for_each_index(exec, spec.windows, [&](std::size_t i) {
    auto rng = numeric::Rng::stream(seed, i);
    std::gamma_distribution<double> gamma(k, 1.0);
    const double g = gamma(rng);
    const double w = w0 * (inv_d == 1.0 ? g : std::pow(g, inv_d));
    WalkConfig cfg = base;
    cfg.n_transitions = transitions_for(w, base.price0, base.tick);
    if (cfg.n_transitions > opts.max_transitions) {
      std::ostringstream msg;
      msg << "window " << i << " needs " << cfg.n_transitions << " transitions (cap " << opts.max_transitions
          << "); use a larger tick or a smaller volatility scale";
      throw DomainError(msg.str());
    }
    const auto walk = simulate_walk(cfg, rng);
    out[i] = {i, w, cfg.n_transitions, walk.log_return, cfg.n_transitions < opts.low_count};
  });
  return out;
}

void write_outcomes_csv(std::ostream& out, std::span<const WindowOutcome> rows) {
  out << "window_index,w_drawn,N,log_return,low_count\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%llu,%.17g,%d\n", r.index, r.w,
                  static_cast<unsigned long long>(r.transitions), r.log_return, r.low_count ? 1 : 0);
    out << buf;
  }
}

TickStream simulate_tick_stream(const maxent::ModelParams& model, const maxent::VolScale& scale,
                                const TickStreamConfig& cfg, std::size_t n_windows, std::uint64_t seed) {
  cfg.walk.validate();
  if (cfg.windows_per_day == 0) throw DomainError("windows_per_day must be positive");
  if (cfg.window.count() < 4) throw DomainError("window length too short");
  const double tick = cfg.walk.tick;
  const double w0 = scale.w0();
  const double k = model.shape();
  const double inv_d = 1.0 / model.delta();
  const auto floor_pos = static_cast<std::int64_t>(std::floor(-cfg.walk.price0 / tick)) + 1;

  TickStream stream;
  stream.windows.reserve(n_windows);
  std::int64_t pos = 0;
  auto quote_at = [&](Timestamp ts) {
    const double mid = cfg.walk.price0 + tick * static_cast<double>(pos);
    stream.quotes.push_back({ts, mid - 0.5 * tick, mid + 0.5 * tick});
  };

  std::vector<std::int64_t> offsets;
  for (std::size_t i = 0; i < n_windows; ++i) {
    const std::size_t day = i / cfg.windows_per_day;
    const std::size_t slot = i % cfg.windows_per_day;
    const Timestamp start = Timestamp(cfg.first_day + std::chrono::days(day)) + cfg.session_open +
                            cfg.window * static_cast<std::int64_t>(slot);
    const double factor = day < cfg.day_scale.size() ? cfg.day_scale[day] : 1.0;

    auto rng = numeric::Rng::stream(seed, i);
    std::gamma_distribution<double> gamma(k, 1.0);
    const double g = gamma(rng);
    const double w = factor * w0 * (inv_d == 1.0 ? g : std::pow(g, inv_d));
    const double price = cfg.walk.price0 + tick * static_cast<double>(pos);
    const std::uint64_t n = transitions_for(w, price, tick);
    stream.windows.push_back({start, w, n});

    quote_at(start);
    offsets.resize(n);
    std::uniform_int_distribution<std::int64_t> when(1, cfg.window.count() - 1);
    for (auto& o : offsets) o = when(rng);
    std::sort(offsets.begin(), offsets.end());
    for (std::uint64_t j = 0; j < n; ++j) {
      const bool up = cfg.walk.eta == 0.5 ? (rng() >> 63) != 0 : rng.uniform() < cfg.walk.eta;
      pos += up ? 1 : -1;
      if (pos < floor_pos) ruin(j + 1, cfg.walk);
      quote_at(start + Nanos(offsets[j]));
    }
    if (slot + 1 == cfg.windows_per_day || i + 1 == n_windows) quote_at(start + cfg.window);
  }
  return stream;
}

}  // namespace stvol::microsim
