#include <cmath>
#include <limits>
#include <memory>
#include <ostream>

#include "CLI11.hpp"

#include "commands.hpp"
#include "stvol/error.hpp"
#include "stvol/estim.hpp"
#include "stvol/numeric/stats.hpp"
#include "stvol/pipeline/analysis.hpp"
#include "stvol/pipeline/data.hpp"
#include "stvol/pipeline/timestamps.hpp"
#include "stvol/retdist.hpp"

namespace stvol::cli {

using maxent::ModelParams;

namespace {

void warn(const Globals& g, const std::string& source, const pipeline::Diagnostic& w) {
  if (g.err) *g.err << "warning: " << source << ":" << w.line << ": " << w.message << '\n';
}

std::optional<ModelParams> overlay_model(const std::string& name) {
  if (name == "none") return std::nullopt;
  return ModelParams::from_name(name);
}

struct ReturnsArgs {
  std::string daily;
  std::size_t dt = 1;
  double alpha = 2.0;
  std::vector<double> thresholds;
  double t_min = 0.1, t_max = 20.0;
  std::size_t points = 50;
  std::string weights = "inverse-variance";
  std::string spread = "std-dev";
  std::string index;
  double band_lo = 0.0;
  double band_hi = std::numeric_limits<double>::infinity();
  std::string model = "st11";
};

void register_analyze_returns(CLI::App& root, std::vector<Command>& out, const Globals& g) {
  auto a = std::make_shared<ReturnsArgs>();
  auto* sub = root.add_subcommand("analyze-returns", "Aggregated CCDF of normalized returns");
  sub->add_option("--daily", a->daily, "Daily closes CSV (date,ticker,close)")->required();
  sub->add_option("--dt", a->dt, "Return lag in observations")->capture_default_str();
  sub->add_option("--alpha", a->alpha, "Normalization order")->capture_default_str();
  sub->add_option("--t", a->thresholds, "Thresholds (default: log-spaced grid)");
  sub->add_option("--t-min", a->t_min)->capture_default_str();
  sub->add_option("--t-max", a->t_max)->capture_default_str();
  sub->add_option("--points", a->points)->capture_default_str();
  sub->add_option("--weights", a->weights)->check(CLI::IsMember({"inverse-variance", "equal"}))->capture_default_str();
  sub->add_option("--spread", a->spread, "Reported uncertainty: per-stock std-dev or std-error")
      ->check(CLI::IsMember({"std-dev", "std-error"}))
      ->capture_default_str();
  sub->add_option("--index", a->index, "Volatility index CSV (date,value) for band filtering");
  sub->add_option("--band-lo", a->band_lo)->capture_default_str();
  sub->add_option("--band-hi", a->band_hi);
  sub->add_option("--model", a->model, "Model overlay column, or 'none'")->capture_default_str();
  out.push_back({"analyze-returns", Format::csv, false, sub, [a, &g] {
                   const auto overlay = overlay_model(a->model);
                   const auto thresholds =
                       a->thresholds.empty() ? pipeline::log_spaced(a->t_min, a->t_max, a->points) : a->thresholds;
                   auto daily = pipeline::ingest_daily_file(a->daily);
                   for (const auto& w : daily.warnings) warn(g, a->daily, w);
                   if (daily.series.empty()) throw DomainError("'" + a->daily + "' contains no usable rows");
                   std::optional<pipeline::DailySeries> index;
                   if (!a->index.empty()) index = pipeline::ingest_index_file(a->index);

                   Document d;
                   d.config = {{"daily", a->daily}, {"dt", a->dt}, {"alpha", a->alpha}, {"weights", a->weights},
                               {"spread", a->spread}, {"model", a->model}};
                   if (a->thresholds.empty()) d.config["grid"] = {a->t_min, a->t_max, a->points};
                   else d.config["t"] = a->thresholds;
                   if (index) {
                     d.config["index"] = a->index;
                     d.config["band"] = {a->band_lo, std::isinf(a->band_hi) ? nlohmann::json("inf") : nlohmann::json(a->band_hi)};
                   }

                   std::vector<pipeline::EmpiricalCCDF> per;
                   std::vector<double> pooled;
                   std::size_t dropped_missing = 0, dropped_outside = 0;
                   auto skipped = nlohmann::json::array();
                   for (const auto& s : daily.series) {
                     auto sample = pipeline::compute_returns(s, a->dt);
                     if (index) {
                       auto f = pipeline::filter_by_index_band(sample, *index, a->band_lo, a->band_hi);
                       dropped_missing += f.dropped_missing;
                       dropped_outside += f.dropped_outside;
                       sample = std::move(f.sample);
                       if (sample.empty()) {
                         skipped.push_back(s.ticker);
                         if (g.err) *g.err << "warning: no returns of " << s.ticker << " inside the index band\n";
                         continue;
                       }
                     }
                     const auto norm = pipeline::normalize_sample(sample, a->alpha);
                     per.push_back(pipeline::empirical_ccdf(norm.returns, thresholds));
                     pooled.insert(pooled.end(), norm.returns.begin(), norm.returns.end());
                   }
                   if (per.empty()) throw DomainError("no ticker has returns left to analyze");
                   const auto agg = pipeline::aggregate_ccdf(
                       per, a->weights == "equal" ? pipeline::Weights::equal : pipeline::Weights::inverse_variance,
                       a->spread == "std-error" ? pipeline::Spread::std_error : pipeline::Spread::std_dev);
                   d.summary["n_sources"] = agg.n_sources;
                   d.summary["n_samples"] = agg.n_samples;
                   d.summary["warnings"] = daily.warnings.size();
                   if (pooled.size() >= 2) d.summary["pooled_kurtosis"] = pipeline::sample_kurtosis(pooled);
                   if (index) {
                     d.summary["dropped_missing_index"] = dropped_missing;
                     d.summary["dropped_outside_band"] = dropped_outside;
                     d.summary["skipped_tickers"] = skipped;
                   }
                   d.table.columns = {"threshold", "prob", "stderr", "model_prob"};
                   std::optional<retdist::ReturnDist> dist;
                   if (overlay) dist = retdist::ReturnDist::scaled(*overlay, a->alpha);
                   for (std::size_t j = 0; j < agg.thresholds.size(); ++j) {
                     Cell model_prob;
                     if (dist) model_prob = retdist::return_ccdf_abs(*dist, agg.thresholds[j]);
                     d.table.add({agg.thresholds[j], agg.prob[j], agg.std_error[j], model_prob});
                   }
                   return d;
                 }});
}

struct DiffusionArgs {
  std::string ticks;
  std::string tick_sizes;
  std::optional<double> tick_size;
  double window_minutes = 15.0;
  double time_unit_seconds = 0.0;
  std::string normalization = "whole-sample";
  std::size_t trailing_days = 3;
  double wide_spread = 1.5;
  std::string model = "st11";
};

void register_analyze_diffusion(CLI::App& root, std::vector<Command>& out, const Globals& g) {
  auto a = std::make_shared<DiffusionArgs>();
  auto* sub = root.add_subcommand("analyze-diffusion", "Windowed diffusion coefficients from tick quotes");
  sub->add_option("--ticks", a->ticks, "Tick CSV (timestamp,ticker,bid,ask)")->required();
  sub->add_option("--tick-sizes", a->tick_sizes, "JSON map of ticker to tick size");
  sub->add_option_function<double>("--tick-size", [a](double v) { a->tick_size = v; }, "Tick size for every ticker");
  sub->add_option("--window-minutes", a->window_minutes)->capture_default_str();
  sub->add_option("--time-unit-seconds", a->time_unit_seconds, "Unit of D; 0 means per window")->capture_default_str();
  sub->add_option("--normalization", a->normalization)
      ->check(CLI::IsMember({"whole-sample", "trailing"}))
      ->capture_default_str();
  sub->add_option("--trailing-days", a->trailing_days)->capture_default_str();
  sub->add_option("--wide-spread", a->wide_spread, "Flag windows with mean spread above this many ticks")
      ->capture_default_str();
  sub->add_option("--model", a->model, "Model overlay column, or 'none'")->capture_default_str();
  out.push_back({"analyze-diffusion", Format::csv, false, sub, [a, &g] {
                   const auto overlay = overlay_model(a->model);
                   pipeline::TickSizes sizes;
                   if (!a->tick_sizes.empty()) sizes = pipeline::load_tick_sizes_file(a->tick_sizes);
                   if (a->tick_size) sizes["default"] = *a->tick_size;
                   if (sizes.empty()) throw DomainError("give --tick-sizes or --tick-size");
                   if (!(a->window_minutes > 0.0)) throw DomainError("--window-minutes must be positive");
                   if (a->time_unit_seconds < 0.0) throw DomainError("--time-unit-seconds must be >= 0");
                   auto ticks = pipeline::ingest_ticks_file(a->ticks, sizes);
                   for (const auto& w : ticks.warnings) warn(g, a->ticks, w);

                   pipeline::DiffusionOptions opts;
                   opts.window = std::chrono::duration_cast<Nanos>(std::chrono::duration<double, std::ratio<60>>(a->window_minutes));
                   opts.time_unit = std::chrono::duration_cast<Nanos>(std::chrono::duration<double>(a->time_unit_seconds));
                   opts.normalization = a->normalization == "trailing" ? pipeline::DiffusionNorm::trailing_days
                                                                       : pipeline::DiffusionNorm::whole_sample;
                   opts.trailing_days = a->trailing_days;
                   opts.wide_spread = a->wide_spread;

                   Document d;
                   d.config = {{"ticks", a->ticks}, {"window_minutes", a->window_minutes},
                               {"time_unit_seconds", a->time_unit_seconds}, {"normalization", a->normalization},
                               {"wide_spread", a->wide_spread}, {"model", a->model}};
                   if (!a->tick_sizes.empty()) d.config["tick_sizes"] = a->tick_sizes;
                   if (a->tick_size) d.config["tick_size"] = *a->tick_size;
                   if (opts.normalization == pipeline::DiffusionNorm::trailing_days)
                     d.config["trailing_days"] = a->trailing_days;
                   d.table.columns = {"ticker", "window_start", "window_seconds", "transitions", "mean_price",
                                      "mean_spread", "d_value", "wide_spread", "normalized", "model_density"};
                   auto per_ticker = nlohmann::json::object();
                   for (const auto& s : ticks.series) {
                     const auto events = pipeline::detect_transitions(s);
                     const auto est = pipeline::estimate_diffusion(events, s, opts);
                     per_ticker[s.ticker] = {{"quotes", s.quotes.size()}, {"transitions", events.size()},
                                             {"windows", est.size()}};
                     for (const auto& e : est) {
                       Cell norm, dens;
                       if (e.normalized) {
                         norm = *e.normalized;
                         if (overlay) dens = pipeline::diffusion_density(*overlay, *e.normalized);
                       }
                       const double secs = std::chrono::duration<double>(e.window_len).count();
                       d.table.add({s.ticker, pipeline::format_rfc3339(e.window_start), secs, e.transition_count,
                                    e.mean_price, e.mean_spread, e.d_value, e.wide_spread, norm, dens});
                     }
                   }
                   d.summary["tickers"] = per_ticker;
                   d.summary["warnings"] = ticks.warnings.size();
                   return d;
                 }});
}

struct FitArgs {
  std::string returns;
  std::string model = "all";
  std::string method = "mle";
  std::size_t min_n = 30;
};

std::vector<Cell> fit_row(const ModelParams& m, const estim::FitResult* f, int rank, double aic,
                          const std::string& error) {
  if (!f) return {m.name(), Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, error};
  return {m.name(), estim::to_string(f->method), f->scale_hat.mean_q(), f->scale_hat.mean_w(), f->scale_hat.w0(),
          f->stderr_scale, f->loglik, aic, static_cast<std::uint64_t>(f->n), static_cast<std::int64_t>(f->iterations),
          static_cast<std::int64_t>(rank), std::string()};
}

void register_fit(CLI::App& root, std::vector<Command>& out) {
  auto a = std::make_shared<FitArgs>();
  auto* sub = root.add_subcommand("fit", "Fit the expected volatility to a return sample");
  sub->add_option("--returns", a->returns, "CSV with a log_return or return column")->required();
  sub->add_option("--model", a->model, "st11, st01, st12 or all")->capture_default_str();
  sub->add_option("--method", a->method)->check(CLI::IsMember({"mle", "moment"}))->capture_default_str();
  sub->add_option("--min-n", a->min_n)->capture_default_str();
  out.push_back({"fit", Format::json, false, sub, [a] {
                   const auto x = pipeline::ingest_return_column_file(a->returns);
                   estim::FitOptions opts;
                   opts.min_n = a->min_n;
                   Document d;
                   d.config = {{"returns", a->returns}, {"model", a->model}, {"method", a->method}, {"min_n", a->min_n}};
                   // scale is the constrained moment <w^delta>
                   d.table.columns = {"model", "method", "scale", "mean_w", "w0", "stderr", "loglik", "aic",
                                      "n", "iterations", "rank", "error"};
                   std::vector<ModelParams> models;
                   if (a->model == "all") models = {ModelParams::st11(), ModelParams::st01(), ModelParams::st12()};
                   else models = {ModelParams::from_name(a->model)};
                   if (a->method == "mle" && models.size() > 1) {
                     const auto cmp = estim::compare_models(x, opts);
                     for (const auto& e : cmp.entries)
                       d.table.add(fit_row(e.model, e.fit ? &*e.fit : nullptr, e.rank, e.aic, e.error));
                     return d;
                   }
                   std::vector<estim::FitResult> fits;
                   for (const auto& m : models)
                     fits.push_back(a->method == "mle" ? estim::fit_mle(x, m, opts) : estim::fit_moment(x, m, opts));
                   std::vector<std::size_t> order(fits.size());
                   for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
                   std::stable_sort(order.begin(), order.end(),
                                    [&](auto i, auto j) { return fits[i].loglik > fits[j].loglik; });
                   int rank = 0;
                   for (auto i : order) d.table.add(fit_row(fits[i].model, &fits[i], ++rank, 2.0 - 2.0 * fits[i].loglik, ""));
                   return d;
                 }});
}

struct ImpliedArgs {
  std::string options;
  std::string model = "st11";
};

void register_implied(CLI::App& root, std::vector<Command>& out) {
  auto a = std::make_shared<ImpliedArgs>();
  auto* sub = root.add_subcommand("implied-vol", "Implied expected volatility of European option quotes");
  sub->add_option("--options", a->options, "CSV kind,spot,strike,expiry_days,price")->required();
  sub->add_option("--model", a->model)->capture_default_str();
  out.push_back({"implied-vol", Format::json, false, sub, [a] {
                   const auto model = ModelParams::from_name(a->model);
                   const auto quotes = estim::read_option_quotes_file(a->options);
                   Document d;
                   d.config = {{"options", a->options}, {"model", a->model}};
                   d.table.columns = {"quote", "kind", "spot", "strike", "expiry_days", "price", "implied",
                                      "iterations", "error"};
                   for (std::size_t i = 0; i < quotes.size(); ++i) {
                     const auto& q = quotes[i];
                     std::vector<Cell> row{static_cast<std::uint64_t>(i), estim::to_string(q.kind), q.spot, q.strike,
                                           q.expiry_days, q.price};
                     try {
                       const auto iv = estim::implied_expected_vol(q, model);
                       row.insert(row.end(), {iv.value, static_cast<std::int64_t>(iv.iterations), std::string()});
                     } catch (const std::exception& e) {
                       row.insert(row.end(), {Cell{}, Cell{}, std::string(e.what())});
                     }
                     d.table.add(std::move(row));
                   }
                   return d;
                 }});
}

}  // namespace

void register_data_commands(CLI::App& root, std::vector<Command>& out, const Globals& g) {
  register_analyze_returns(root, out, g);
  register_analyze_diffusion(root, out, g);
  register_fit(root, out);
  register_implied(root, out);
}

}  // namespace stvol::cli
