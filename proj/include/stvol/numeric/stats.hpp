#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stvol::numeric {

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased (n - 1)
  double skewness = 0.0;
  double kurtosis = 0.0;  ///< non-excess; 3 for a Gaussian
};

Moments sample_moments(std::span<const double> x);

/// sup |F_n(x) - F(x)|. Sorts a copy of the sample.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
/// Same, with the CDF already evaluated at the sorted sample.
double ks_statistic_sorted(std::span<const double> cdf_at_sorted);

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 0.0;
  std::size_t bins_used = 0;
};

/// Pearson test of counts against expected counts. Adjacent bins are pooled
/// left to right until each pooled expectation reaches `min_expected`.
ChiSquare chi_square_test(std::span<const double> observed, std::span<const double> expected,
                          std::size_t fitted_params = 0, double min_expected = 5.0);

/// P(chi2_k > x).
double chi_square_sf(double x, double dof);

}  // namespace stvol::numeric
