#include "stvol/retdist.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "stvol/error.hpp"
#include "stvol/numeric/quadrature.hpp"
#include "stvol/numeric/rng.hpp"
#include "stvol/numeric/special.hpp"

namespace stvol::retdist {

using numeric::kLnSqrt2Pi;
using numeric::kSqrt2;

namespace {

constexpr std::size_t kSampleBlock = 4096;

numeric::QuadOptions mixture_quad() {
  numeric::QuadOptions o;
  o.rel_tol = 1e-12;
  o.max_intervals = 400;
  return o;
}

// ln F~(s) with s = e^t, up to the model constant.
struct MasterLog {
  double log_c, a, d;
  explicit MasterLog(const ModelParams& m)
      : log_c(std::log(m.delta()) - numeric::log_gamma(m.shape())), a(m.alpha_m()), d(m.delta()) {}
};

// Starting point for the mode search of ∫ F~(s) K(s) ds in t = ln s when the
// kernel behaves like exp(-u^2 / (2 s^2)).
double mode_guess(const MasterLog& m, double power, double u) {
  const double bulk = std::pow(power / m.d, 1.0 / m.d);
  const double tail = u > 0.0 ? std::pow(u * u / m.d, 1.0 / (m.d + 2.0)) : 0.0;
  return std::log(std::max(bulk, tail));
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

ReturnDist::ReturnDist(const VolScale& scale, std::optional<double> alpha) : scale_(scale), alpha_(alpha) {
  if (alpha && !(*alpha > 0.0 && std::isfinite(*alpha))) {
    throw DomainError("normalization order alpha must be positive");
  }
  unit_ = alpha ? scale_ratio(scale.model(), *alpha) : 1.0 / scale.w0();
}

ReturnDist ReturnDist::raw(const VolScale& scale) { return {scale, std::nullopt}; }
ReturnDist ReturnDist::scaled(const VolScale& scale, double alpha) { return {scale, alpha}; }
ReturnDist ReturnDist::scaled(const ModelParams& model, double alpha) {
  return {VolScale::from_w0(model, 1.0), alpha};
}

double scale_ratio(const ModelParams& model, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("normalization order alpha must be positive");
  const double ratio = maxent::slave_constant(alpha) / maxent::slave_constant(0.0) *
                       maxent::volatility_moment(model, alpha);
  return std::pow(ratio, 1.0 / alpha);
}

double standardized_log_pdf(const ModelParams& model, double u) {
  require_finite(u, "return");
  u = std::abs(u);
  const MasterLog m(model);
  const double half_u2 = 0.5 * u * u;
  // s = e^t; the ds = s dt Jacobian cancels the 1/s of the slave density.
  auto g = [&](double t) {
    return m.log_c - kLnSqrt2Pi + (m.a + 1.0) * t - std::exp(m.d * t) - half_u2 * std::exp(-2.0 * t);
  };
  const auto r = numeric::integrate_log_peaked(g, mode_guess(m, m.a + 1.0, u), mixture_quad());
  return r.log_value;
}

double standardized_ccdf(const ModelParams& model, double v) {
  require_finite(v, "threshold");
  if (v < 0.0) throw DomainError("CCDF threshold must be non-negative");
  if (v == 0.0) return 1.0;
  const MasterLog m(model);
  const double c = v / kSqrt2;
  auto g = [&](double t) {
    return m.log_c + (m.a + 2.0) * t - std::exp(m.d * t) + numeric::log_erfc(c * std::exp(-t));
  };
  const auto r = numeric::integrate_log_peaked(g, mode_guess(m, m.a + 2.0, v), mixture_quad());
  return std::min(1.0, r.value());
}

double return_log_pdf(const ReturnDist& dist, double x) {
  const double r = dist.unit();
  return std::log(r) + standardized_log_pdf(dist.model(), r * x);
}

double return_pdf(const ReturnDist& dist, double x) { return std::exp(return_log_pdf(dist, x)); }

double return_ccdf_abs(const ReturnDist& dist, double t) {
  if (t < 0.0) throw DomainError("CCDF threshold must be non-negative");
  return standardized_ccdf(dist.model(), dist.unit() * t);
}

double return_cdf(const ReturnDist& dist, double x) {
  require_finite(x, "return");
  const double q = standardized_ccdf(dist.model(), dist.unit() * std::abs(x));
  return x >= 0.0 ? 1.0 - 0.5 * q : 0.5 * q;
}

double return_moment_abs(const ReturnDist& dist, double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("moment order must be non-negative");
  if (alpha == 0.0) return 1.0;
  const auto& model = dist.model();
  const double standardized =
      maxent::slave_constant(alpha) / maxent::slave_constant(0.0) * maxent::volatility_moment(model, alpha);
  return standardized * std::pow(dist.unit(), -alpha);
}

double scaled_return_pdf(const ModelParams& model, double x_alpha, double alpha) {
  const double r = scale_ratio(model, alpha);
  return r * std::exp(standardized_log_pdf(model, r * x_alpha));
}

double meijer_g30_03(double z, double b1, double b2, double b3) {
  if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("meijer_g30_03: argument must be finite and >= 0");
  const double bmin = std::min({b1, b2, b3});
  if (z == 0.0) {
    // Only the leading residue at s = -bmin survives.
    if (bmin > 0.0) return 0.0;
    if (bmin < 0.0) throw DomainError("meijer_g30_03: divergent at z = 0");
    int zeros = 0;
    double prod = 1.0;
    for (double b : {b1, b2, b3}) {
      if (b == 0.0) ++zeros; else prod *= numeric::gamma(b);
    }
    if (zeros > 1) throw DomainError("meijer_g30_03: divergent at z = 0");
    return prod;
  }
  const double log_z = std::log(z);
  auto phi_real = [&](double c) {
    return numeric::log_gamma(b1 + c) + numeric::log_gamma(b2 + c) + numeric::log_gamma(b3 + c) - c * log_z;
  };
  // Real saddle: minimum of the integrand along the real axis.
  double lo = -bmin + 0.25, hi = std::max(lo + 1.0, 4.0 * std::cbrt(z) + 4.0);
  constexpr double r = 0.381966011250105151795;
  double x1 = lo + r * (hi - lo), x2 = hi - r * (hi - lo);
  double f1 = phi_real(x1), f2 = phi_real(x2);
  for (int i = 0; i < 80 && hi - lo > 1e-6; ++i) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = lo + r * (hi - lo); f1 = phi_real(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = hi - r * (hi - lo); f2 = phi_real(x2);
    }
  }
  const double c = 0.5 * (lo + hi);
  const double peak = phi_real(c);
  auto integrand = [&](double t) {
    const std::complex<double> s(c, t);
    const auto lg = numeric::log_gamma(b1 + s) + numeric::log_gamma(b2 + s) + numeric::log_gamma(b3 + s) -
                    s * log_z - peak;
    return std::exp(lg).real();
  };
  // |Γ(b+c+it)| decays like exp(-π|t|/2) per factor.
  double t_max = 4.0;
  while (std::abs(std::exp(numeric::log_gamma(std::complex<double>(b1 + c, t_max)) +
                           numeric::log_gamma(std::complex<double>(b2 + c, t_max)) +
                           numeric::log_gamma(std::complex<double>(b3 + c, t_max)) -
                           std::complex<double>(c, t_max) * log_z - peak)) > 1e-22) {
    t_max *= 1.5;
    if (t_max > 1e4) throw NumericError("meijer_g30_03: contour integrand does not decay");
  }
  std::vector<double> pts;
  const int pieces = std::max(4, static_cast<int>(std::ceil(t_max / 2.0)));
  for (int i = 0; i <= pieces; ++i) pts.push_back(t_max * i / pieces);
  numeric::QuadOptions opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-18;
  const auto q = numeric::integrate(integrand, std::span<const double>(pts), opts);
  return std::exp(peak) * q.value / numeric::kPi;
}

double return_pdf_st11_analytic(double mean_w, double x) {
  if (!(mean_w > 0.0)) throw DomainError("mean_w must be positive");
  require_finite(x, "return");
  const double y = std::abs(x) / mean_w;
  const double arg = 0.5 * (1.5 * y) * (1.5 * y);
  return 3.0 / (numeric::kPi * kSqrt2 * mean_w) * meijer_g30_03(arg, 0.0, 1.0, 1.5);
}

double return_pdf_st11_analytic(const ReturnDist& dist, double x) {
  if (!(dist.model() == ModelParams::st11()) || dist.is_scaled()) {
    throw ContractError("the Meijer-G closed form applies to the raw ST11 distribution only");
  }
  return return_pdf_st11_analytic(dist.scale().mean_w(), x);
}

std::vector<double> sample_returns(const ReturnDist& dist, std::size_t n, std::uint64_t seed, Exec exec) {
  std::vector<double> out(n);
  if (n == 0) return out;
  const auto& model = dist.model();
  const double k = model.shape();
  const double inv_d = 1.0 / model.delta();
  const double unit = 1.0 / dist.unit();  // w0 for raw, 1/r for scaled
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  for_each_index(exec, blocks, [&](std::size_t b) {
    auto rng = numeric::Rng::stream(seed, b);
    std::gamma_distribution<double> gamma(k, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
    for (std::size_t i = b * kSampleBlock; i < end; ++i) {
      const double g = gamma(rng);
      const double w = inv_d == 1.0 ? g : std::pow(g, inv_d);
      out[i] = unit * w * normal(rng);
    }
  });
  return out;
}

std::vector<double> evaluate_grid(const ReturnDist& dist, std::span<const double> xs, Quantity what, Exec exec) {
  std::vector<double> out(xs.size());
  for_each_index(exec, xs.size(), [&](std::size_t i) {
    switch (what) {
      case Quantity::pdf: out[i] = return_pdf(dist, xs[i]); break;
      case Quantity::cdf: out[i] = return_cdf(dist, xs[i]); break;
      case Quantity::ccdf_abs: out[i] = return_ccdf_abs(dist, xs[i]); break;
    }
  });
  return out;
}

ReferenceTable read_reference_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open reference table '" + path + "'");
  ReferenceTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (table.oracle.empty()) table.oracle = line.substr(line.find_first_not_of("# "));
      continue;
    }
    std::istringstream fields(line);
    double x = 0.0, p = 0.0;
    if (!(fields >> x >> p)) throw ParseError(path, lineno, "x/pdf", "expected two numbers");
    table.x.push_back(x);
    table.pdf.push_back(p);
  }
  if (table.oracle.empty()) throw ParseError(path, 1, "header", "missing oracle header line");
  return table;
}

void write_reference_table(const std::string& path, const ReferenceTable& table) {
  if (table.x.size() != table.pdf.size()) throw ContractError("reference table columns differ in length");
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write reference table '" + path + "'");
  out << "# " << table.oracle << "\n";
  char buf[64];
  for (std::size_t i = 0; i < table.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", table.x[i]);
    out << buf << ' ';
    std::snprintf(buf, sizeof buf, "%.17g", table.pdf[i]);
    out << buf << '\n';
  }
}

}  // namespace stvol::retdist
