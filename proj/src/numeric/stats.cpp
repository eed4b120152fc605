#include "stvol/numeric/stats.hpp"

#include <algorithm>
#include <cmath>

#include "stvol/error.hpp"
#include "stvol/numeric/special.hpp"

namespace stvol::numeric {

Moments sample_moments(std::span<const double> x) {
  Moments m;
  m.n = x.size();
  if (m.n < 2) throw DomainError("moments need at least two observations");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(m.n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double n = static_cast<double>(m.n);
  m.mean = mean;
  m.variance = m2 / (n - 1.0);
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.kurtosis = m4 / (m2 * m2);
  }
  return m;
}

double ks_statistic_sorted(std::span<const double> cdf_at_sorted) {
  const double n = static_cast<double>(cdf_at_sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < cdf_at_sorted.size(); ++i) {
    const double f = cdf_at_sorted[i];
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("KS statistic of an empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  for (auto& v : s) v = cdf(v);
  return ks_statistic_sorted(s);
}

double chi_square_sf(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi-square needs positive degrees of freedom");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

ChiSquare chi_square_test(std::span<const double> observed, std::span<const double> expected,
                          std::size_t fitted_params, double min_expected) {
  if (observed.size() != expected.size()) throw ContractError("chi-square: observed and expected differ in length");
  std::vector<double> o, e;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_o += observed[i];
    acc_e += expected[i];
    if (acc_e >= min_expected) {
      o.push_back(acc_o);
      e.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (e.empty()) throw DomainError("chi-square: total expectation below the pooling threshold");
    o.back() += acc_o;
    e.back() += acc_e;
  }
  ChiSquare r;
  r.bins_used = e.size();
  if (r.bins_used < fitted_params + 2) throw DomainError("chi-square: too few bins after pooling");
  for (std::size_t i = 0; i < e.size(); ++i) r.statistic += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  r.dof = r.bins_used - 1 - fitted_params;
  r.p_value = chi_square_sf(r.statistic, static_cast<double>(r.dof));
  return r;
}

}  // namespace stvol::numeric
