#include "stvol/estim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "stvol/error.hpp"
#include "stvol/numeric/minimize.hpp"
#include "stvol/numeric/quadrature.hpp"
#include "stvol/numeric/special.hpp"
#include "stvol/pipeline/csv.hpp"
#include "stvol/retdist.hpp"

namespace stvol::estim {

std::string to_string(FitMethod m) { return m == FitMethod::moment ? "moment" : "mle"; }
std::string to_string(OptionKind k) { return k == OptionKind::call ? "call" : "put"; }

namespace {

void check_sample(std::span<const double> x, const FitOptions& opts) {
  if (x.size() < opts.min_n)
    throw DomainError("fit needs at least " + std::to_string(opts.min_n) + " returns, got " + std::to_string(x.size()));
  for (double v : x)
    if (!std::isfinite(v)) throw DomainError("fit sample contains a non-finite return");
}

double w0_of(const ModelParams& model, double mean_q) { return VolScale::from_mean_q(model, mean_q).w0(); }

constexpr double kTableUMax = 400.0;
constexpr std::size_t kTableNodes = 8192;

}  // namespace

struct LogLikelihood::Impl {
  ModelParams model;
  double y_max;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;

  static boost::math::interpolators::cardinal_cubic_b_spline<double> build(const ModelParams& m, double y_max) {
    const double dy = y_max / static_cast<double>(kTableNodes - 1);
    std::vector<double> v(kTableNodes);
    for (std::size_t i = 0; i < kTableNodes; ++i)
      v[i] = retdist::standardized_log_pdf(m, std::sinh(static_cast<double>(i) * dy));
    return {v.begin(), v.end(), 0.0, dy};
  }

  explicit Impl(const ModelParams& m) : model(m), y_max(std::asinh(kTableUMax)), spline(build(m, y_max)) {}
};

LogLikelihood::LogLikelihood(const ModelParams& model) : impl_(std::make_unique<Impl>(model)) {}
LogLikelihood::~LogLikelihood() = default;
LogLikelihood::LogLikelihood(LogLikelihood&&) noexcept = default;
LogLikelihood& LogLikelihood::operator=(LogLikelihood&&) noexcept = default;

const ModelParams& LogLikelihood::model() const noexcept { return impl_->model; }

double LogLikelihood::log_h(double u) const {
  const double y = std::asinh(std::fabs(u));
  if (y < impl_->y_max) return impl_->spline(y);
  return retdist::standardized_log_pdf(impl_->model, u);
}

double LogLikelihood::operator()(std::span<const double> x, double w0) const {
  double s = 0.0;
  const double inv = 1.0 / w0;
  for (double v : x) s += log_h(v * inv);
  return s - static_cast<double>(x.size()) * std::log(w0);
}

FitResult fit_moment(std::span<const double> x, const ModelParams& model, const FitOptions& opts) {
  check_sample(x, opts);
  const double d = model.delta();
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += std::pow(std::fabs(v), d);
  mean /= static_cast<double>(n);
  if (!(mean > 0.0)) throw DomainError("fit sample is degenerate (all returns zero)");
  double var = 0.0;
  for (double v : x) {
    const double e = std::pow(std::fabs(v), d) - mean;
    var += e * e;
  }
  var /= static_cast<double>(n - 1);
  const double c = maxent::slave_constant(0.0) / maxent::slave_constant(d);
  FitResult r{model, VolScale::from_mean_q(model, c * mean), 0.0, n, c * std::sqrt(var / static_cast<double>(n)),
              FitMethod::moment, 0};
  r.loglik = LogLikelihood(model)(x, r.scale_hat.w0());
  return r;
}

namespace {

FitResult fit_mle_with(std::span<const double> x, const LogLikelihood& ll, const FitOptions& opts) {
  const ModelParams& model = ll.model();
  check_sample(x, opts);
  const double d = model.delta();
  const double seed_q = opts.seed ? *opts.seed : fit_moment(x, model, opts).scale_hat.mean_q();
  if (!(seed_q > 0.0) || !std::isfinite(seed_q)) throw DomainError("MLE seed must be a positive scale");
  // theta = ln w0; a factor 10 in <w^d> is a factor 10^(1/d) in w0.
  const double t0 = std::log(w0_of(model, seed_q));
  const double half = std::log(10.0) / d;
  const double lo = t0 - half, hi = t0 + half;
  const double tol = opts.rel_tol / d;
  auto nll = [&](double t) { return -ll(x, std::exp(t)); };

  FitResult r{model, VolScale::from_mean_q(model, seed_q), 0.0, x.size(), 0.0, FitMethod::mle, 0};
  double t_hat;
  const double f0 = nll(t0);
  if (f0 <= nll(t0 - tol) && f0 <= nll(t0 + tol)) {
    t_hat = t0;
    r.loglik = -f0;
  } else {
    const auto b = numeric::brent_minimize(nll, lo, hi, t0, 0.0, tol, opts.max_iterations);
    if (!b.converged) {
      std::ostringstream msg;
      msg << "MLE did not converge in " << b.iterations << " iterations; last points (ln w0, -loglik):";
      const std::size_t from = b.trace.size() > 5 ? b.trace.size() - 5 : 0;
      for (std::size_t i = from; i < b.trace.size(); ++i) msg << " (" << b.trace[i].first << ", " << b.trace[i].second << ")";
      throw NumericError(msg.str());
    }
    if (b.x - lo < 4.0 * tol || hi - b.x < 4.0 * tol) {
      std::ostringstream msg;
      msg << "MLE optimum at the search bracket edge (w0 = " << std::exp(b.x) << ", bracket [" << std::exp(lo) << ", "
          << std::exp(hi) << "])";
      throw NumericError(msg.str());
    }
    t_hat = b.x;
    r.loglik = -b.fx;
    r.iterations = b.iterations;
  }
  const double w0 = std::exp(t_hat);
  r.scale_hat = VolScale::from_w0(model, w0).convert(maxent::ScaleKind::mean_q);
  const double h = 1e-3;
  const double curv = (nll(t_hat + h) - 2.0 * (-r.loglik) + nll(t_hat - h)) / (h * h);
  if (!(curv > 0.0)) throw NumericError("log-likelihood is not concave at the MLE");
  r.stderr_scale = r.scale_hat.mean_q() * d / std::sqrt(curv);
  return r;
}

}  // namespace

FitResult fit_mle(std::span<const double> x, const ModelParams& model, const FitOptions& opts) {
  check_sample(x, opts);
  return fit_mle_with(x, LogLikelihood(model), opts);
}

ModelComparison compare_models(std::span<const double> x, const FitOptions& opts, Exec exec) {
  const std::vector<ModelParams> models{ModelParams::st11(), ModelParams::st01(), ModelParams::st12()};
  ModelComparison out;
  out.entries.resize(models.size(), ModelEntry{ModelParams::st11(), std::nullopt, {}, 0.0, 0});
  for_each_index(exec, models.size(), [&](std::size_t i) {
    auto& e = out.entries[i];
    e.model = models[i];
    try {
      e.fit = fit_mle(x, models[i], opts);
      e.aic = 2.0 - 2.0 * e.fit->loglik;
    } catch (const std::exception& err) {
      e.error = err.what();
    }
  });
  std::stable_sort(out.entries.begin(), out.entries.end(), [](const ModelEntry& a, const ModelEntry& b) {
    if (a.fit.has_value() != b.fit.has_value()) return a.fit.has_value();
    return a.fit && a.fit->loglik > b.fit->loglik;
  });
  int rank = 0;
  for (auto& e : out.entries)
    if (e.fit) e.rank = ++rank;
  return out;
}

namespace {

void check_quote(const OptionQuote& q) {
  if (!(q.spot > 0.0) || !std::isfinite(q.spot)) throw DomainError("option spot must be positive");
  if (!(q.strike > 0.0) || !std::isfinite(q.strike)) throw DomainError("option strike must be positive");
  if (!(q.expiry_days > 0.0)) throw DomainError("option expiry must be positive");
  if (q.rate != 0.0) throw DomainError("only zero interest rates are supported");
}

double gaussian_price(OptionKind kind, double s, double k, double w) {
  if (w <= 0.0) return kind == OptionKind::call ? std::max(s - k, 0.0) : std::max(k - s, 0.0);
  const double m = std::log(s / k);
  const double d1 = m / w + 0.5 * w, d2 = d1 - w;
  using numeric::normal_cdf;
  if (kind == OptionKind::call) return s * normal_cdf(d1) - k * normal_cdf(d2);
  return k * normal_cdf(-d2) - s * normal_cdf(-d1);
}

}  // namespace

double price_option(const OptionQuote& q, const ModelParams& model, const VolScale& scale) {
  check_quote(q);
  if (!(scale.model() == model)) throw ContractError("price_option: scale belongs to a different model");
  const double w0 = scale.w0();
  const double k = model.shape(), d = model.delta();
  const double mode = std::pow(std::max((model.alpha_m() + 1.0) / d, 1e-3), 1.0 / d);
  const double top = std::pow(60.0 + 4.0 * k, 1.0 / d);
  std::vector<double> pts{0.0};
  for (double p = mode / 8.0; p < top; p *= 2.0) pts.push_back(p);
  pts.push_back(top);
  numeric::QuadOptions qo;
  qo.rel_tol = 1e-13;
  qo.abs_tol = 1e-15 * std::max(q.spot, q.strike);
  qo.max_intervals = 2000;
  const auto r = numeric::integrate(
      [&](double wt) { return maxent::volatility_pdf(model, wt) * gaussian_price(q.kind, q.spot, q.strike, w0 * wt); },
      std::span<const double>(pts), qo);
  return r.value;
}

ImpliedVol implied_expected_vol(const OptionQuote& q, const ModelParams& model) {
  check_quote(q);
  const double lower = q.kind == OptionKind::call ? std::max(q.spot - q.strike, 0.0) : std::max(q.strike - q.spot, 0.0);
  const double upper = q.kind == OptionKind::call ? q.spot : q.strike;
  if (!(q.price > lower) || !(q.price < upper)) {
    std::ostringstream msg;
    msg << to_string(q.kind) << " price " << q.price << " outside the no-arbitrage range (" << lower << ", " << upper
        << ")";
    throw DomainError(msg.str());
  }
  const double d = model.delta();
  auto scale_of = [&](double v) { return VolScale::from_mean_q(model, std::pow(v, d)); };
  auto price = [&](double v) { return price_option(q, model, scale_of(v)); };
  double a = std::log(1e-8), b = std::log(10.0);
  const double tol = 1e-10 * q.spot;
  const double pa = price(std::exp(a)), pb = price(std::exp(b));
  if (q.price < pa - tol || q.price > pb + tol) {
    std::ostringstream msg;
    msg << "no implied scale in [1e-8, 10] for " << to_string(q.kind) << " price " << q.price << " (range " << pa << " to "
        << pb << ")";
    throw NumericError(msg.str());
  }
  ImpliedVol out{scale_of(std::exp(0.5 * (a + b))), 0.0, 0};
  for (int it = 1; it <= 200; ++it) {
    const double m = 0.5 * (a + b);
    const double pm = price(std::exp(m));
    out.iterations = it;
    if (std::fabs(pm - q.price) <= tol || b - a < 1e-15) {
      out.value = std::exp(m);
      out.scale = scale_of(out.value);
      return out;
    }
    (pm < q.price ? a : b) = m;
  }
  throw NumericError("implied volatility bisection did not converge");
}

std::vector<OptionQuote> read_option_quotes(std::istream& in, const std::string& source) {
  pipeline::CsvReader csv(in, source);
  const auto c_kind = csv.column("kind"), c_spot = csv.column("spot"), c_strike = csv.column("strike"),
             c_exp = csv.column("expiry_days"), c_price = csv.column("price");
  std::vector<OptionQuote> out;
  while (csv.next()) {
    std::string kind(csv.text(c_kind));
    std::transform(kind.begin(), kind.end(), kind.begin(), [](unsigned char ch) { return std::tolower(ch); });
    OptionQuote q;
    if (kind == "call") q.kind = OptionKind::call;
    else if (kind == "put") q.kind = OptionKind::put;
    else throw ParseError(source, csv.line(), "kind", "expected 'call' or 'put', got '" + kind + "'");
    q.spot = csv.number(c_spot);
    q.strike = csv.number(c_strike);
    q.expiry_days = csv.number(c_exp);
    q.price = csv.number(c_price);
    if (!(q.spot > 0.0)) throw ParseError(source, csv.line(), "spot", "must be positive");
    if (!(q.strike > 0.0)) throw ParseError(source, csv.line(), "strike", "must be positive");
    if (!(q.expiry_days > 0.0)) throw ParseError(source, csv.line(), "expiry_days", "must be positive");
    if (!(q.price >= 0.0)) throw ParseError(source, csv.line(), "price", "must be non-negative");
    out.push_back(q);
  }
  return out;
}

std::vector<OptionQuote> read_option_quotes_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  return read_option_quotes(in, path);
}

}  // namespace stvol::estim
