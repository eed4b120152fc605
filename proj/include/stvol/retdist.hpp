#pragma once

// Observed return law as a Gaussian scale mixture over the maxent volatility
// density:  f(x) = ∫ F(w) φ(x/w)/w dw.
//
// Everything reduces to the standardized density h(u) of X/w0, which depends
// on the model only; a raw distribution is h at u = x/w0, a scaled one is h
// at u = r·x with r = l/w0 = (N_a <w~^a> / N_0)^(1/a).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stvol/maxent.hpp"
#include "stvol/parallel.hpp"

namespace stvol::retdist {

using maxent::ModelParams;
using maxent::VolScale;

class ReturnDist {
 public:
  /// x in absolute return units.
  static ReturnDist raw(const VolScale& scale);
  /// x in units of l = <|x|^alpha>^(1/alpha). The scale is carried along but
  /// does not enter any scaled quantity.
  static ReturnDist scaled(const VolScale& scale, double alpha);
  static ReturnDist scaled(const ModelParams& model, double alpha);

  const ModelParams& model() const noexcept { return scale_.model(); }
  const VolScale& scale() const noexcept { return scale_; }
  bool is_scaled() const noexcept { return alpha_.has_value(); }
  /// Normalization order; only meaningful when is_scaled().
  double alpha() const noexcept { return alpha_.value_or(0.0); }

  /// Multiplier r with f(x) = r · h(r·x).
  double unit() const noexcept { return unit_; }

 private:
  ReturnDist(const VolScale& scale, std::optional<double> alpha);
  VolScale scale_;
  std::optional<double> alpha_;
  double unit_;
};

/// l / w0 for normalization order alpha.
double scale_ratio(const ModelParams& model, double alpha);

/// ln h(u) for the standardized mixture (X/w0 has density h).
double standardized_log_pdf(const ModelParams& model, double u);
/// P(|X/w0| > v) = ∫ F~(s) erfc(v / (s√2)) ds.
double standardized_ccdf(const ModelParams& model, double v);

double return_pdf(const ReturnDist& dist, double x);
double return_log_pdf(const ReturnDist& dist, double x);
double return_cdf(const ReturnDist& dist, double x);
/// P(|x| > t); 1 at t = 0, non-increasing.
double return_ccdf_abs(const ReturnDist& dist, double t);

/// <|x|^alpha> = (N_alpha / N_0) <w^alpha>, closed form.
double return_moment_abs(const ReturnDist& dist, double alpha);

/// Scale-free density of x_alpha = x / <|x|^alpha>^(1/alpha).
double scaled_return_pdf(const ModelParams& model, double x_alpha, double alpha);

/// G^{3,0}_{0,3}(z | b1, b2, b3) for z >= 0 by numerical Mellin-Barnes
/// integration along a vertical line through the real saddle point.
double meijer_g30_03(double z, double b1, double b2, double b3);

/// ST11 density from the Meijer-G closed form,
///   f(x) = 3/(π√2 <w>) G^{3,0}_{0,3}((1/2)(3x/(2<w>))^2 | 0, 1, 3/2).
double return_pdf_st11_analytic(double mean_w, double x);
/// Same, but checks that `dist` is a raw ST11 distribution first.
double return_pdf_st11_analytic(const ReturnDist& dist, double x);

/// Exact mixture draws x = w·z. Deterministic in (seed, n), any thread count.
std::vector<double> sample_returns(const ReturnDist& dist, std::size_t n, std::uint64_t seed,
                                   Exec exec = Exec::parallel);

enum class Quantity { pdf, cdf, ccdf_abs };

/// Evaluates one quantity at every point of `xs`.
std::vector<double> evaluate_grid(const ReturnDist& dist, std::span<const double> xs, Quantity what,
                                  Exec exec = Exec::parallel);

/// Two-column validation table: x/<w> and pdf, with a header naming the oracle.
struct ReferenceTable {
  std::string oracle;
  std::vector<double> x;
  std::vector<double> pdf;
};

ReferenceTable read_reference_table(const std::string& path);
void write_reference_table(const std::string& path, const ReferenceTable& table);

}  // namespace stvol::retdist
