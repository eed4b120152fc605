#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stvol/maxent.hpp"
#include "stvol/market.hpp"
#include "stvol/pipeline/data.hpp"

namespace stvol::pipeline {

// ---------------------------------------------------------------------------
// Returns

struct ReturnSample {
  std::string ticker;
  std::size_t dt_steps = 1;
  std::vector<double> returns;
  /// Date of the later close of each return; empty for undated samples.
  std::vector<Date> dates;
  /// Set once normalized: order alpha and divisor l = <|x|^alpha>^(1/alpha).
  std::optional<double> alpha;
  double scale = 1.0;

  bool empty() const noexcept { return returns.empty(); }
};

/// x_i = ln(p_i / p_{i - dt_steps}) over observation lags.
ReturnSample compute_returns(const DailySeries& series, std::size_t dt_steps = 1);

/// Divides by l = (mean |x|^alpha)^(1/alpha); l accumulates over repeated calls.
ReturnSample normalize_sample(const ReturnSample& sample, double alpha);

struct BandFilterResult {
  ReturnSample sample;
  std::size_t dropped_missing = 0;  ///< no index value on that date
  std::size_t dropped_outside = 0;  ///< index value outside the band
};

/// Keeps returns whose same-date index value lies in [lo, hi].
BandFilterResult filter_by_index_band(const ReturnSample& sample, const DailySeries& index, double lo, double hi);

/// Sample moments used to summarize tails.
double sample_kurtosis(std::span<const double> x);

// ---------------------------------------------------------------------------
// Empirical CCDF

struct EmpiricalCCDF {
  std::vector<double> thresholds;
  std::vector<double> prob;
  std::vector<double> std_error;
  std::size_t n_sources = 0;
  std::size_t n_samples = 0;
};

/// `count` log-spaced points on [lo, hi]; default grid for scaled returns.
std::vector<double> log_spaced(double lo = 0.1, double hi = 20.0, std::size_t count = 50);

/// prob[j] = #{|x| > t_j} / n; stderr is the binomial sqrt(p(1-p)/n).
EmpiricalCCDF empirical_ccdf(std::span<const double> sample, std::span<const double> thresholds);

enum class Weights { equal, inverse_variance };
/// How the reported uncertainty is formed from the per-source spread.
enum class Spread { std_dev, std_error };

/// Weighted mean across sources on a shared grid. stderr is the (weighted)
/// standard deviation of the source values, or that divided by sqrt(K).
EmpiricalCCDF aggregate_ccdf(std::span<const EmpiricalCCDF> per_source, Weights weights = Weights::inverse_variance,
                             Spread spread = Spread::std_dev);

// ---------------------------------------------------------------------------
// Mid-price transitions and diffusion

struct TransitionEvent {
  Timestamp ts;
  double mid_before = 0.0;
  double mid_after = 0.0;
  double amplitude() const noexcept { return mid_after - mid_before; }
};

/// An event at every change of the mid-price, compared on the half-tick grid.
std::vector<TransitionEvent> detect_transitions(const TickSeries& ticks);

enum class DiffusionNorm { whole_sample, trailing_days };

struct DiffusionOptions {
  Nanos window = std::chrono::minutes(15);
  /// Unit of time for d_value; zero means "per window".
  Nanos time_unit{0};
  DiffusionNorm normalization = DiffusionNorm::whole_sample;
  std::size_t trailing_days = 3;
  double wide_spread = 1.5;  ///< flag windows whose mean spread exceeds this many ticks
};

struct DiffusionEstimate {
  Timestamp window_start;
  Nanos window_len{0};
  std::uint64_t transition_count = 0;
  double mean_price = 0.0;
  double mean_spread = 0.0;
  double d_value = 0.0;  ///< (tick / mean_price)^2 · count / window_len, per time_unit
  bool wide_spread = false;
  std::optional<double> normalized;  ///< empty when the reference mean is unavailable
};

/// Complete windows only: each UTC day is tiled from its first quote (floored
/// to the window grid) up to its last quote. Trailing normalization divides by
/// the mean D over the previous `trailing_days` trading days in the data.
std::vector<DiffusionEstimate> estimate_diffusion(std::span<const TransitionEvent> events, const TickSeries& ticks,
                                                  const DiffusionOptions& opts = {});

/// Density of D~ = w~^2 / <w~^2> implied by the volatility density.
double diffusion_density(const maxent::ModelParams& model, double d_norm);
/// P(D~ <= d).
double diffusion_cdf(const maxent::ModelParams& model, double d_norm);

}  // namespace stvol::pipeline
