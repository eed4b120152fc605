#include <algorithm>
#include <cmath>
#include <map>

#include "stvol/error.hpp"
#include "stvol/numeric/special.hpp"
#include "stvol/pipeline/analysis.hpp"
#include "stvol/pipeline/timestamps.hpp"

namespace stvol::pipeline {

std::vector<DiffusionEstimate> estimate_diffusion(std::span<const TransitionEvent> events, const TickSeries& ticks,
                                                  const DiffusionOptions& opts) {
  if (opts.window.count() <= 0) throw DomainError("diffusion window must be positive");
  if (!(ticks.tick_size > 0.0)) throw DomainError("tick series '" + ticks.ticker + "' has no tick size");
  const auto& q = ticks.quotes;
  const Nanos unit = opts.time_unit.count() > 0 ? opts.time_unit : opts.window;
  const double windows_per_unit = static_cast<double>(unit.count()) / static_cast<double>(opts.window.count());
  const double tick = ticks.tick_size;

  std::vector<DiffusionEstimate> out;
  std::vector<std::size_t> day_of;  // trading-day ordinal per window
  std::size_t qi = 0, ei = 0, day_ordinal = 0;
  while (qi < q.size()) {
    const Date day = utc_day(q[qi].ts);
    std::size_t day_end = qi;
    while (day_end < q.size() && utc_day(q[day_end].ts) == day) ++day_end;
    const Timestamp last = q[day_end - 1].ts;
    const auto since_epoch = q[qi].ts.time_since_epoch();
    Timestamp start(since_epoch - since_epoch % opts.window);
    bool any = false;
    double carry_mid = q[qi].mid(), carry_spread = q[qi].ask - q[qi].bid;
    std::size_t k = qi;
    for (; start + opts.window <= last; start += opts.window) {
      const Timestamp end = start + opts.window;
      double sum_mid = 0.0, sum_spread = 0.0;
      std::size_t n_quotes = 0;
      while (k < day_end && q[k].ts < start) {
        carry_mid = q[k].mid();
        carry_spread = q[k].ask - q[k].bid;
        ++k;
      }
      while (k < day_end && q[k].ts < end) {
        sum_mid += q[k].mid();
        sum_spread += q[k].ask - q[k].bid;
        carry_mid = q[k].mid();
        carry_spread = q[k].ask - q[k].bid;
        ++n_quotes;
        ++k;
      }
      const double mean_mid = n_quotes ? sum_mid / n_quotes : carry_mid;
      const double mean_spread = n_quotes ? sum_spread / n_quotes : carry_spread;
      while (ei < events.size() && events[ei].ts < start) ++ei;
      std::uint64_t count = 0;
      while (ei < events.size() && events[ei].ts < end) {
        ++count;
        ++ei;
      }
      DiffusionEstimate est;
      est.window_start = start;
      est.window_len = opts.window;
      est.transition_count = count;
      est.mean_price = mean_mid;
      est.mean_spread = mean_spread;
      const double rel = tick / mean_mid;
      est.d_value = rel * rel * static_cast<double>(count) * windows_per_unit;
      est.wide_spread = mean_spread > opts.wide_spread * tick * (1.0 + 1e-9);
      out.push_back(est);
      day_of.push_back(day_ordinal);
      any = true;
    }
    if (any) ++day_ordinal;
    qi = day_end;
  }
  if (out.empty()) throw DomainError("tick series '" + ticks.ticker + "' does not cover a full window");

  if (opts.normalization == DiffusionNorm::whole_sample) {
    double mean = 0.0;
    for (const auto& e : out) mean += e.d_value;
    mean /= static_cast<double>(out.size());
    if (mean > 0.0) {
      for (auto& e : out) e.normalized = e.d_value / mean;
    }
    return out;
  }

  if (opts.trailing_days < 1) throw DomainError("trailing normalization needs at least one day");
  std::vector<double> day_sum(day_ordinal, 0.0);
  std::vector<std::size_t> day_count(day_ordinal, 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    day_sum[day_of[i]] += out[i].d_value;
    ++day_count[day_of[i]];
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t d = day_of[i];
    if (d < opts.trailing_days) continue;
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t back = d - opts.trailing_days; back < d; ++back) {
      s += day_sum[back];
      n += day_count[back];
    }
    if (n > 0 && s > 0.0) out[i].normalized = out[i].d_value / (s / static_cast<double>(n));
  }
  return out;
}

double diffusion_density(const maxent::ModelParams& model, double d_norm) {
  if (!(d_norm >= 0.0) || !std::isfinite(d_norm)) throw DomainError("normalized diffusion must be >= 0");
  const double m2 = maxent::volatility_moment(model, 2.0);
  if (d_norm == 0.0) {
    // F~(w)/w ~ C w^alpha_m near 0.
    if (model.alpha_m() > 0.0) return 0.0;
    return model.delta() / numeric::gamma(model.shape()) * 0.5 * m2;
  }
  const double w = std::sqrt(m2 * d_norm);
  return std::exp(maxent::volatility_log_pdf(model, w) + std::log(0.5 * m2 / w));
}

double diffusion_cdf(const maxent::ModelParams& model, double d_norm) {
  if (!(d_norm >= 0.0)) throw DomainError("normalized diffusion must be >= 0");
  return maxent::volatility_cdf(model, std::sqrt(maxent::volatility_moment(model, 2.0) * d_norm));
}

}  // namespace stvol::pipeline
