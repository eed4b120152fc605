#pragma once

// One-parameter fits of the return law, model comparison and option-implied
// expected volatility. Scales are reported as the constrained moment <w^d>
// (so <w> for d = 1 and <w^2> for d = 2).

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stvol/maxent.hpp"
#include "stvol/parallel.hpp"

namespace stvol::estim {

using maxent::ModelParams;
using maxent::VolScale;

enum class FitMethod { moment, mle };
std::string to_string(FitMethod m);

struct FitResult {
  ModelParams model;
  VolScale scale_hat;  ///< kind mean_q
  double loglik = 0.0;
  std::size_t n = 0;
  double stderr_scale = 0.0;  ///< standard error of scale_hat.mean_q()
  FitMethod method = FitMethod::moment;
  int iterations = 0;
};

struct FitOptions {
  std::size_t min_n = 30;
  double rel_tol = 1e-8;
  int max_iterations = 200;
  /// MLE starting point as <w^d>; the moment estimate when empty.
  std::optional<double> seed;
};

/// ln f(x) for the raw return law, backed by a spline of ln h(u) in
/// asinh(u). Points past the table fall back to direct quadrature.
class LogLikelihood {
 public:
  explicit LogLikelihood(const ModelParams& model);
  ~LogLikelihood();
  LogLikelihood(LogLikelihood&&) noexcept;
  LogLikelihood& operator=(LogLikelihood&&) noexcept;

  const ModelParams& model() const noexcept;
  /// ln h(u) of the standardized mixture.
  double log_h(double u) const;
  /// Σ ln f(x_i) at characteristic length w0.
  double operator()(std::span<const double> x, double w0) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// <w^d>-hat = mean |x|^d · N_0 / N_d, with delta-method standard error.
FitResult fit_moment(std::span<const double> x, const ModelParams& model, const FitOptions& opts = {});

/// Brent search in ln w0 over [seed/10, seed·10] (in units of the scale),
/// seeded at the moment estimate.
FitResult fit_mle(std::span<const double> x, const ModelParams& model, const FitOptions& opts = {});

struct ModelEntry {
  ModelParams model;
  std::optional<FitResult> fit;
  std::string error;  ///< set when the fit failed
  double aic = 0.0;
  int rank = 0;  ///< 1 = best; 0 for failed fits
};

struct ModelComparison {
  std::vector<ModelEntry> entries;  ///< ranked, failed fits last
};

/// MLE fits of ST11, ST01 and ST12, ranked by log-likelihood.
ModelComparison compare_models(std::span<const double> x, const FitOptions& opts = {}, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Options

enum class OptionKind { call, put };
std::string to_string(OptionKind k);

struct OptionQuote {
  OptionKind kind = OptionKind::call;
  double spot = 0.0;
  double strike = 0.0;
  double expiry_days = 0.0;
  double price = 0.0;
  double rate = 0.0;  ///< reserved; pricing requires zero
};

/// Zero-rate price as a mixture of Gaussian prices over the volatility law:
///   C = ∫ F(w) [S Φ(d1) - K Φ(d2)] dw,  d1,2 = ln(S/K)/w ± w/2.
/// The scale is the return scale at expiry.
double price_option(const OptionQuote& q, const ModelParams& model, const VolScale& scale);

struct ImpliedVol {
  VolScale scale;
  double value = 0.0;  ///< <w^d>^(1/d): <w> for d = 1, sqrt(<w^2>) for d = 2
  int iterations = 0;
};

/// Bisection in the log of value over [1e-8, 10] until the model price is
/// within 1e-10·S of the quote.
ImpliedVol implied_expected_vol(const OptionQuote& q, const ModelParams& model);

/// CSV `kind,spot,strike,expiry_days,price`.
std::vector<OptionQuote> read_option_quotes(std::istream& in, const std::string& source = "<options>");
std::vector<OptionQuote> read_option_quotes_file(const std::string& path);

}  // namespace stvol::estim
