#include <algorithm>
#include <cmath>

#include "stvol/error.hpp"
#include "stvol/pipeline/analysis.hpp"

namespace stvol::pipeline {

ReturnSample compute_returns(const DailySeries& series, std::size_t dt_steps) {
  if (dt_steps < 1) throw DomainError("dt_steps must be at least 1");
  const auto& p = series.points;
  if (p.size() <= dt_steps) {
    throw DomainError("series '" + series.ticker + "' has " + std::to_string(p.size()) +
                      " points; need more than dt_steps = " + std::to_string(dt_steps));
  }
  ReturnSample out;
  out.ticker = series.ticker;
  out.dt_steps = dt_steps;
  out.returns.reserve(p.size() - dt_steps);
  out.dates.reserve(p.size() - dt_steps);
  for (std::size_t i = dt_steps; i < p.size(); ++i) {
    out.returns.push_back(std::log(p[i].close / p[i - dt_steps].close));
    out.dates.push_back(p[i].date);
  }
  return out;
}

ReturnSample normalize_sample(const ReturnSample& sample, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("normalization order alpha must be positive");
  if (sample.empty()) throw DomainError("cannot normalize an empty sample");
  double acc = 0.0;
  for (double x : sample.returns) acc += std::pow(std::abs(x), alpha);
  const double l = std::pow(acc / static_cast<double>(sample.returns.size()), 1.0 / alpha);
  if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("sample '" + sample.ticker + "' has zero scale");
  ReturnSample out = sample;
  for (double& x : out.returns) x /= l;
  out.alpha = alpha;
  out.scale = sample.scale * l;
  return out;
}

BandFilterResult filter_by_index_band(const ReturnSample& sample, const DailySeries& index, double lo, double hi) {
  if (!(lo <= hi)) throw DomainError("index band needs lo <= hi");
  if (sample.dates.size() != sample.returns.size()) throw ContractError("band filtering needs a dated sample");
  BandFilterResult out;
  out.sample = sample;
  out.sample.returns.clear();
  out.sample.dates.clear();
  const auto& pts = index.points;
  for (std::size_t i = 0; i < sample.returns.size(); ++i) {
    const auto it = std::lower_bound(pts.begin(), pts.end(), sample.dates[i],
                                     [](const DailyPoint& p, Date d) { return p.date < d; });
    if (it == pts.end() || it->date != sample.dates[i]) {
      ++out.dropped_missing;
      continue;
    }
    if (it->close < lo || it->close > hi) {
      ++out.dropped_outside;
      continue;
    }
    out.sample.returns.push_back(sample.returns[i]);
    out.sample.dates.push_back(sample.dates[i]);
  }
  return out;
}

double sample_kurtosis(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("kurtosis needs at least two values");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  if (m2 == 0.0) throw DomainError("kurtosis undefined for a constant sample");
  const double n = static_cast<double>(x.size());
  return (m4 / n) / ((m2 / n) * (m2 / n));
}

}  // namespace stvol::pipeline
