#pragma once

// Maximum-entropy volatility densities
//
//   F(w) = w^(a+1) exp(-lambda w^d) / Z(lambda),   Z = G((2+a)/d) / (d lambda^((2+a)/d))
//
// with a = alpha_m the density-of-states exponent (M(w) = w^a) and d = delta
// the exponent of the constrained moment <w^d>. Functions taking `w_tilde`
// work in units of the characteristic length w0 = lambda^(-1/d).

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stvol/parallel.hpp"

namespace stvol::maxent {

class ModelParams {
 public:
  /// Throws DomainError unless alpha_m >= 0 and delta > 0 (both finite).
  ModelParams(double alpha_m, double delta);

  static ModelParams st11() { return {1.0, 1.0}; }
  static ModelParams st01() { return {0.0, 1.0}; }
  static ModelParams st12() { return {1.0, 2.0}; }

  /// Accepts "st11", "st01", "st12" (any case). Unknown names throw a
  /// DomainError that lists the presets.
  static ModelParams from_name(std::string_view name);

  double alpha_m() const noexcept { return alpha_m_; }
  double delta() const noexcept { return delta_; }

  /// Gamma shape (2 + alpha_m) / delta shared by every closed form.
  double shape() const noexcept { return (2.0 + alpha_m_) / delta_; }

  /// Preset name when the parameters match one, else "st(a,d)".
  std::string name() const;

  bool operator==(const ModelParams&) const = default;

 private:
  double alpha_m_;
  double delta_;
};

enum class ScaleKind { lambda, mean_q, w0 };

/// Volatility scale in one of three equivalent parameterizations:
///   lambda  Lagrange multiplier, units w^-delta
///   mean_q  <w^delta>
///   w0      characteristic length, units of w
/// Every accessor converts on demand, so callers may pass whichever they hold.
class VolScale {
 public:
  static VolScale from_lambda(const ModelParams& model, double lambda);
  static VolScale from_mean_q(const ModelParams& model, double mean_q);
  static VolScale from_w0(const ModelParams& model, double w0);
  /// From the expected volatility <w>; equals from_mean_q when delta = 1.
  static VolScale from_mean_w(const ModelParams& model, double mean_w);

  const ModelParams& model() const noexcept { return model_; }
  ScaleKind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }

  double lambda() const;
  double mean_q() const;
  double w0() const;
  double mean_w() const;

  /// Same scale re-expressed in `target` units.
  VolScale convert(ScaleKind target) const;

 private:
  VolScale(const ModelParams& model, ScaleKind kind, double value);
  ModelParams model_;
  ScaleKind kind_;
  double value_;
};

VolScale scale_convert(const VolScale& scale, ScaleKind target);

/// Normalized density F(w~) = d/G((2+a)/d) w~^(a+1) exp(-w~^d).
double volatility_pdf(const ModelParams& model, double w_tilde);
double volatility_log_pdf(const ModelParams& model, double w_tilde);
/// P(W~ <= w~) = P((2+a)/d, w~^d), regularized lower incomplete gamma.
double volatility_cdf(const ModelParams& model, double w_tilde);

/// F(w) in absolute units, evaluated from the multiplier form with Z(lambda).
double volatility_pdf_unnormalized(const ModelParams& model, const VolScale& scale, double w);

double partition_function(const ModelParams& model, double lambda);

/// <w~^alpha> = G((2+a+alpha)/d) / G((2+a)/d). Multiply by w0^alpha for <w^alpha>.
double volatility_moment(const ModelParams& model, double alpha);

/// N_alpha = ∫ |z|^alpha exp(-z^2/2) dz = 2^((alpha+1)/2) G((alpha+1)/2).
double slave_constant(double alpha);

/// Exact draws w = w0 · G^(1/d), G ~ Gamma((2+a)/d, 1). Deterministic in
/// (seed, n) and independent of the thread count.
std::vector<double> sample_volatility(const ModelParams& model, const VolScale& scale, std::size_t n,
                                      std::uint64_t seed, Exec exec = Exec::parallel);

struct EntropyTerms {
  double slave = 0.0;        ///< S_g, entropy of the unit Gaussian
  double master = 0.0;       ///< S_F by quadrature, measure w·M(w)
  double master_exact = 0.0; ///< (2+a)/d + ln Z(lambda)
  double quad_error = 0.0;
};

EntropyTerms process_entropy(const ModelParams& model, const VolScale& scale);

struct MaxentOptions {
  std::size_t grid_nodes = 2048;
  double grid_lo = 1e-4;  ///< in units of w0
  double grid_hi = 50.0;  ///< in units of w0
  double amplitude = 0.5; ///< maximum relative distortion of the log-density
  double tolerance = 1e-9;
};

struct MaxentReport {
  std::size_t trials = 0;
  std::size_t discarded = 0;
  std::size_t violations = 0;
  double reference_entropy = 0.0;     ///< discretized S_F of the maxent form
  double max_perturbed_entropy = 0.0; ///< largest S_F among kept perturbations
  double min_gap = 0.0;               ///< reference minus max perturbed
  std::vector<double> perturbed_entropy;
};

/// Checks the maxent property on a log-spaced grid: random smooth distortions
/// of the log-density are re-tilted by exp(-mu w^d) to restore <w^d>, and
/// none may beat the exponential-family form by more than opts.tolerance.
MaxentReport maxent_verify(const ModelParams& model, const VolScale& scale, std::size_t n_perturbations,
                           std::uint64_t seed, const MaxentOptions& opts = {}, Exec exec = Exec::parallel);

}  // namespace stvol::maxent
