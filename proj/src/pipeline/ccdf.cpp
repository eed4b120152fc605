#include <algorithm>
#include <cmath>
#include <limits>

#include "stvol/error.hpp"
#include "stvol/pipeline/analysis.hpp"

namespace stvol::pipeline {

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw DomainError("log_spaced needs 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

EmpiricalCCDF empirical_ccdf(std::span<const double> sample, std::span<const double> thresholds) {
  if (sample.empty()) throw DomainError("empirical CCDF of an empty sample");
  for (std::size_t j = 0; j < thresholds.size(); ++j) {
    if (!(thresholds[j] >= 0.0) || (j > 0 && !(thresholds[j] > thresholds[j - 1]))) {
      throw ContractError("CCDF thresholds must be non-negative and increasing");
    }
  }
  std::vector<double> mag(sample.size());
  std::transform(sample.begin(), sample.end(), mag.begin(), [](double x) { return std::abs(x); });
  std::sort(mag.begin(), mag.end());
  const double n = static_cast<double>(mag.size());
  EmpiricalCCDF out;
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  out.prob.resize(thresholds.size());
  out.std_error.resize(thresholds.size());
  for (std::size_t j = 0; j < thresholds.size(); ++j) {
    const auto above = mag.end() - std::upper_bound(mag.begin(), mag.end(), thresholds[j]);
    const double p = static_cast<double>(above) / n;
    out.prob[j] = p;
    out.std_error[j] = std::sqrt(p * (1.0 - p) / n);
  }
  out.n_sources = 1;
  out.n_samples = mag.size();
  return out;
}

EmpiricalCCDF aggregate_ccdf(std::span<const EmpiricalCCDF> per_source, Weights weights, Spread spread) {
  if (per_source.empty()) throw ContractError("aggregate_ccdf needs at least one source");
  const auto& grid = per_source.front().thresholds;
  for (const auto& c : per_source) {
    if (c.thresholds != grid || c.prob.size() != grid.size() || c.std_error.size() != grid.size()) {
      throw ContractError("aggregate_ccdf: sources use different threshold grids");
    }
  }
  const std::size_t k = per_source.size();
  EmpiricalCCDF out;
  out.thresholds = grid;
  out.prob.resize(grid.size());
  out.std_error.resize(grid.size());
  out.n_sources = k;
  for (const auto& c : per_source) out.n_samples += c.n_samples;

  std::vector<double> w(k);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::fill(w.begin(), w.end(), 1.0);
    if (weights == Weights::inverse_variance) {
      // A zero error (p = 0 or 1) borrows the smallest positive error at this
      // threshold; if none is positive the weights stay equal.
      double floor_err = std::numeric_limits<double>::infinity();
      for (const auto& c : per_source) {
        if (c.std_error[j] > 0.0) floor_err = std::min(floor_err, c.std_error[j]);
      }
      if (std::isfinite(floor_err)) {
        for (std::size_t i = 0; i < k; ++i) {
          const double e = std::max(per_source[i].std_error[j], floor_err);
          w[i] = 1.0 / (e * e);
        }
      }
    }
    double sw = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      sw += w[i];
      mean += w[i] * per_source[i].prob[j];
    }
    mean /= sw;
    double var = 0.0;
    for (std::size_t i = 0; i < k; ++i) var += w[i] * (per_source[i].prob[j] - mean) * (per_source[i].prob[j] - mean);
    double sd = k > 1 ? std::sqrt(var / sw * static_cast<double>(k) / static_cast<double>(k - 1)) : 0.0;
    if (spread == Spread::std_error) sd /= std::sqrt(static_cast<double>(k));
    out.prob[j] = mean;
    out.std_error[j] = sd;
  }
  // Per-threshold weights can break monotonicity; restore the CCDF invariant.
  for (std::size_t j = 1; j < out.prob.size(); ++j) out.prob[j] = std::min(out.prob[j], out.prob[j - 1]);
  return out;
}

}  // namespace stvol::pipeline
