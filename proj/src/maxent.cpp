#include "stvol/maxent.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "stvol/error.hpp"
#include "stvol/numeric/quadrature.hpp"
#include "stvol/numeric/rng.hpp"
#include "stvol/numeric/special.hpp"

namespace stvol::maxent {

using numeric::log_gamma;

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " must be finite and positive (got " << v << ")";
    throw DomainError(msg.str());
  }
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " must be finite and non-negative (got " << v << ")";
    throw DomainError(msg.str());
  }
}

constexpr std::size_t kSampleBlock = 4096;

}  // namespace

ModelParams::ModelParams(double alpha_m, double delta) : alpha_m_(alpha_m), delta_(delta) {
  require_nonnegative(alpha_m, "alpha_m");
  require_positive(delta, "delta");
}

ModelParams ModelParams::from_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "st11") return st11();
  if (lower == "st01") return st01();
  if (lower == "st12") return st12();
  throw DomainError("unknown model '" + std::string(name) + "'; valid presets: st11, st01, st12");
}

std::string ModelParams::name() const {
  if (*this == st11()) return "st11";
  if (*this == st01()) return "st01";
  if (*this == st12()) return "st12";
  std::ostringstream out;
  out.precision(17);
  out << "st(" << alpha_m_ << "," << delta_ << ")";
  return out.str();
}

VolScale::VolScale(const ModelParams& model, ScaleKind kind, double value)
    : model_(model), kind_(kind), value_(value) {
  require_positive(value, "volatility scale");
}

VolScale VolScale::from_lambda(const ModelParams& model, double lambda) { return {model, ScaleKind::lambda, lambda}; }
VolScale VolScale::from_mean_q(const ModelParams& model, double mean_q) { return {model, ScaleKind::mean_q, mean_q}; }
VolScale VolScale::from_w0(const ModelParams& model, double w0) { return {model, ScaleKind::w0, w0}; }

VolScale VolScale::from_mean_w(const ModelParams& model, double mean_w) {
  require_positive(mean_w, "mean_w");
  if (model.delta() == 1.0) return from_mean_q(model, mean_w);
  return from_w0(model, mean_w / volatility_moment(model, 1.0));
}

double VolScale::lambda() const {
  const double k = model_.shape();
  switch (kind_) {
    case ScaleKind::lambda: return value_;
    case ScaleKind::mean_q: return k / value_;
    case ScaleKind::w0: return std::pow(value_, -model_.delta());
  }
  return value_;
}

double VolScale::mean_q() const {
  const double k = model_.shape();
  switch (kind_) {
    case ScaleKind::lambda: return k / value_;
    case ScaleKind::mean_q: return value_;
    case ScaleKind::w0: return k * std::pow(value_, model_.delta());
  }
  return value_;
}

double VolScale::w0() const {
  const double d = model_.delta();
  switch (kind_) {
    case ScaleKind::lambda: return std::pow(value_, -1.0 / d);
    case ScaleKind::mean_q: return std::pow(value_ / model_.shape(), 1.0 / d);
    case ScaleKind::w0: return value_;
  }
  return value_;
}

double VolScale::mean_w() const {
  if (model_.delta() == 1.0) return mean_q();
  return w0() * volatility_moment(model_, 1.0);
}

VolScale VolScale::convert(ScaleKind target) const {
  switch (target) {
    case ScaleKind::lambda: return from_lambda(model_, lambda());
    case ScaleKind::mean_q: return from_mean_q(model_, mean_q());
    case ScaleKind::w0: return from_w0(model_, w0());
  }
  return *this;
}

VolScale scale_convert(const VolScale& scale, ScaleKind target) { return scale.convert(target); }

double volatility_log_pdf(const ModelParams& model, double w_tilde) {
  require_nonnegative(w_tilde, "w_tilde");
  const double a = model.alpha_m(), d = model.delta();
  if (w_tilde == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(d) - log_gamma(model.shape()) + (a + 1.0) * std::log(w_tilde) - std::pow(w_tilde, d);
}

double volatility_pdf(const ModelParams& model, double w_tilde) {
  require_nonnegative(w_tilde, "w_tilde");
  if (w_tilde == 0.0) return 0.0;
  return std::exp(volatility_log_pdf(model, w_tilde));
}

double volatility_cdf(const ModelParams& model, double w_tilde) {
  require_nonnegative(w_tilde, "w_tilde");
  return numeric::gamma_p(model.shape(), std::pow(w_tilde, model.delta()));
}

double partition_function(const ModelParams& model, double lambda) {
  require_positive(lambda, "lambda");
  const double k = model.shape();
  return std::exp(log_gamma(k) - std::log(model.delta()) - k * std::log(lambda));
}

double volatility_pdf_unnormalized(const ModelParams& model, const VolScale& scale, double w) {
  require_nonnegative(w, "w");
  if (!(scale.model() == model)) throw ContractError("volatility scale was built for a different model");
  if (w == 0.0) return 0.0;
  const double lambda = scale.lambda();
  const double log_num = (model.alpha_m() + 1.0) * std::log(w) - lambda * std::pow(w, model.delta());
  return std::exp(log_num) / partition_function(model, lambda);
}

double volatility_moment(const ModelParams& model, double alpha) {
  const double top = (2.0 + model.alpha_m() + alpha) / model.delta();
  if (!(top > 0.0) || !std::isfinite(top)) {
    throw DomainError("volatility_moment: order must exceed -(2 + alpha_m)");
  }
  return std::exp(log_gamma(top) - log_gamma(model.shape()));
}

double slave_constant(double alpha) {
  require_nonnegative(alpha, "alpha");
  return std::exp(0.5 * (alpha + 1.0) * std::log(2.0) + log_gamma(0.5 * (alpha + 1.0)));
}

std::vector<double> sample_volatility(const ModelParams& model, const VolScale& scale, std::size_t n,
                                      std::uint64_t seed, Exec exec) {
  std::vector<double> out(n);
  if (n == 0) return out;
  const double w0 = scale.w0();
  const double k = model.shape();
  const double inv_d = 1.0 / model.delta();
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  for_each_index(exec, blocks, [&](std::size_t b) {
    auto rng = numeric::Rng::stream(seed, b);
    std::gamma_distribution<double> g(k, 1.0);
    const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
    for (std::size_t i = b * kSampleBlock; i < end; ++i) {
      const double x = g(rng);
      out[i] = w0 * (inv_d == 1.0 ? x : std::pow(x, inv_d));
    }
  });
  return out;
}

EntropyTerms process_entropy(const ModelParams& model, const VolScale& scale) {
  if (!(scale.model() == model)) throw ContractError("volatility scale was built for a different model");
  EntropyTerms out;
  out.slave = numeric::kLnSqrt2Pi + 0.5;
  const double lambda = scale.lambda();
  const double w0 = scale.w0();
  const double d = model.delta();
  const double log_z = std::log(partition_function(model, lambda));
  out.master_exact = model.shape() + log_z;

  // -F ln[F / (w M(w))], with the log taken analytically so the tails stay finite.
  auto integrand = [&](double w) {
    if (w <= 0.0) return 0.0;
    const double log_ratio = -lambda * std::pow(w, d) - log_z;
    const double log_f = (model.alpha_m() + 1.0) * std::log(w) + log_ratio;
    return -std::exp(log_f) * log_ratio;
  };
  // Tail cut where lambda w^d ~ 60, i.e. F has fallen ~1e-26 below its peak.
  const double w_max = w0 * std::pow(60.0 + 4.0 * model.shape(), 1.0 / d);
  std::vector<double> pts{0.0};
  for (double c : {0.25, 0.5, 1.0, 2.0, 4.0, 10.0})
    if (c * w0 < w_max) pts.push_back(c * w0);
  pts.push_back(w_max);
  numeric::QuadOptions opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-15;
  const auto q = numeric::integrate(integrand, std::span<const double>(pts), opts);
  out.master = q.value;
  out.quad_error = q.abs_error;
  return out;
}

namespace {

struct Grid {
  std::vector<double> w;        // nodes
  std::vector<double> weight;   // trapezoid weight for dw
  std::vector<double> log_m;    // ln(w M(w)) = (a+1) ln w
  std::vector<double> q;        // w^delta
};

Grid make_grid(const ModelParams& model, double w0, const MaxentOptions& opts) {
  if (opts.grid_nodes < 8) throw DomainError("maxent_verify: grid needs at least 8 nodes");
  Grid g;
  const std::size_t n = opts.grid_nodes;
  const double u_lo = std::log(opts.grid_lo * w0), u_hi = std::log(opts.grid_hi * w0);
  const double du = (u_hi - u_lo) / static_cast<double>(n - 1);
  g.w.resize(n);
  g.weight.resize(n);
  g.log_m.resize(n);
  g.q.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = u_lo + du * static_cast<double>(i);
    g.w[i] = std::exp(u);
    const double trap = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    g.weight[i] = trap * du * g.w[i];
    g.log_m[i] = (model.alpha_m() + 1.0) * u;
    g.q[i] = std::pow(g.w[i], model.delta());
  }
  return g;
}

// Normalizes exp(log_p) on the grid in place (log-sum-exp) and returns the
// density values.
std::vector<double> normalize(const Grid& g, const std::vector<double>& log_p) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < log_p.size(); ++i) top = std::max(top, log_p[i]);
  double z = 0.0;
  for (std::size_t i = 0; i < log_p.size(); ++i) z += g.weight[i] * std::exp(log_p[i] - top);
  std::vector<double> p(log_p.size());
  const double log_z = top + std::log(z);
  for (std::size_t i = 0; i < log_p.size(); ++i) p[i] = std::exp(log_p[i] - log_z);
  return p;
}

double grid_entropy(const Grid& g, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s -= g.weight[i] * p[i] * (std::log(p[i]) - g.log_m[i]);
  }
  return s;
}

double grid_mean_q(const Grid& g, const std::vector<double>& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) m += g.weight[i] * p[i] * g.q[i];
  return m;
}

}  // namespace

MaxentReport maxent_verify(const ModelParams& model, const VolScale& scale, std::size_t n_perturbations,
                           std::uint64_t seed, const MaxentOptions& opts, Exec exec) {
  if (n_perturbations == 0) throw DomainError("maxent_verify: need at least one perturbation");
  if (!(scale.model() == model)) throw ContractError("volatility scale was built for a different model");
  const double w0 = scale.w0();
  const double lambda = scale.lambda();
  const Grid g = make_grid(model, w0, opts);
  const std::size_t n = g.w.size();

  std::vector<double> log_ref(n);
  for (std::size_t i = 0; i < n; ++i) log_ref[i] = g.log_m[i] - lambda * g.q[i];
  const auto ref = normalize(g, log_ref);
  const double target = grid_mean_q(g, ref);
  const double s_ref = grid_entropy(g, ref);
  std::vector<double> log_ref_norm(n);
  for (std::size_t i = 0; i < n; ++i) log_ref_norm[i] = std::log(ref[i]);

  const double u_lo = std::log(g.w.front()), u_hi = std::log(g.w.back());
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> entropy(n_perturbations, kNaN);

  for_each_index(exec, n_perturbations, [&](std::size_t trial) {
    auto rng = numeric::Rng::stream(seed, trial);
    const double eps = opts.amplitude * rng.uniform();
    std::array<double, 3> amp{}, centre{}, width{};
    for (int j = 0; j < 3; ++j) {
      amp[j] = 2.0 * rng.uniform() - 1.0;
      centre[j] = u_lo + (u_hi - u_lo) * rng.uniform();
      width[j] = 0.2 + 1.3 * rng.uniform();
    }
    std::vector<double> base(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = std::log(g.w[i]);
      double bump = 0.0;
      for (int j = 0; j < 3; ++j) {
        const double z = (u - centre[j]) / width[j];
        bump += amp[j] * std::exp(-0.5 * z * z);
      }
      base[i] = (1.0 + eps * bump) * log_ref_norm[i];
    }
    // Tilt by exp(-mu w^d); the tilted mean of w^d decreases in mu.
    std::vector<double> tilted(n);
    auto mean_at = [&](double mu) {
      for (std::size_t i = 0; i < n; ++i) tilted[i] = base[i] - mu * g.q[i];
      return grid_mean_q(g, normalize(g, tilted));
    };
    double lo = -lambda, hi = lambda;
    for (int i = 0; i < 60 && mean_at(lo) < target; ++i) lo *= 2.0;
    for (int i = 0; i < 60 && mean_at(hi) > target; ++i) hi *= 2.0;
    // Infeasible trials stay NaN and are counted as discarded.
    if (mean_at(lo) < target || mean_at(hi) > target) return;
    double mu = 0.0;
    bool hit = false;
    if (std::abs(mean_at(0.0) - target) <= 1e-15 * target) {
      mu = 0.0;
      hit = true;
    }
    for (int it = 0; it < 200 && !hit; ++it) {
      mu = 0.5 * (lo + hi);
      const double m = mean_at(mu);
      if (std::abs(m - target) <= 1e-14 * target || hi - lo <= 1e-16 * std::abs(mu)) {
        hit = true;
        break;
      }
      if (m > target) lo = mu; else hi = mu;
    }
    for (std::size_t i = 0; i < n; ++i) tilted[i] = base[i] - mu * g.q[i];
    const auto p = normalize(g, tilted);
    if (std::abs(grid_mean_q(g, p) - target) > 1e-12 * target) return;
    entropy[trial] = grid_entropy(g, p);
  });

  MaxentReport report;
  report.trials = n_perturbations;
  report.reference_entropy = s_ref;
  report.max_perturbed_entropy = -std::numeric_limits<double>::infinity();
  for (double s : entropy) {
    if (std::isnan(s)) {
      ++report.discarded;
      continue;
    }
    report.perturbed_entropy.push_back(s);
    report.max_perturbed_entropy = std::max(report.max_perturbed_entropy, s);
    if (s > s_ref + opts.tolerance) ++report.violations;
  }
  report.min_gap = s_ref - report.max_perturbed_entropy;
  return report;
}

}  // namespace stvol::maxent
