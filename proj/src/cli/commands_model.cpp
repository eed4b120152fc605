#include <cmath>
#include <fstream>
#include <memory>

#include "CLI11.hpp"

#include "commands.hpp"
#include "stvol/error.hpp"
#include "stvol/microsim.hpp"
#include "stvol/pipeline/analysis.hpp"
#include "stvol/pipeline/csv.hpp"
#include "stvol/pipeline/data.hpp"
#include "stvol/pipeline/timestamps.hpp"
#include "stvol/retdist.hpp"

namespace stvol::cli {

using maxent::ModelParams;
using maxent::VolScale;

maxent::ModelParams ModelArgs::params() const { return ModelParams::from_name(model); }

maxent::VolScale ModelArgs::scale_for(const ModelParams& m) const {
  const int given = mean_w.has_value() + mean_q.has_value() + w0.has_value() + lambda.has_value();
  if (given > 1) throw DomainError("give at most one of --mean-w, --mean-q, --w0, --lambda");
  if (mean_q) return VolScale::from_mean_q(m, *mean_q);
  if (w0) return VolScale::from_w0(m, *w0);
  if (lambda) return VolScale::from_lambda(m, *lambda);
  return VolScale::from_mean_w(m, mean_w.value_or(default_mean_w));
}

maxent::VolScale ModelArgs::scale() const { return scale_for(params()); }

nlohmann::json ModelArgs::config() const {
  nlohmann::json j;
  j["model"] = model;
  if (mean_q) j["mean_q"] = *mean_q;
  else if (w0) j["w0"] = *w0;
  else if (lambda) j["lambda"] = *lambda;
  else j["mean_w"] = mean_w.value_or(default_mean_w);
  return j;
}

void add_model_options(CLI::App& sub, ModelArgs& m, bool with_scale) {
  sub.add_option("--model", m.model, "Model preset: st11, st01, st12")->capture_default_str();
  if (!with_scale) return;
  sub.add_option_function<double>("--mean-w", [&m](double v) { m.mean_w = v; }, "Expected volatility <w>");
  sub.add_option_function<double>("--mean-q", [&m](double v) { m.mean_q = v; }, "Constrained moment <w^delta>");
  sub.add_option_function<double>("--w0", [&m](double v) { m.w0 = v; }, "Characteristic length lambda^(-1/delta)");
  sub.add_option_function<double>("--lambda", [&m](double v) { m.lambda = v; }, "Lagrange multiplier");
}

namespace {

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n == 0) throw DomainError("grid needs at least one point");
  if (!(hi >= lo)) throw DomainError("grid upper end below lower end");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

struct DistArgs {
  ModelArgs model;
  std::vector<double> points;
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
  bool scaled = false;
  double alpha = 2.0;

  retdist::ReturnDist dist() const {
    return scaled ? retdist::ReturnDist::scaled(model.scale(), alpha) : retdist::ReturnDist::raw(model.scale());
  }
  nlohmann::json config(const char* var) const {
    auto j = model.config();
    if (!points.empty()) j[var] = points;
    else j["grid"] = {lo, hi, count};
    j["scaled"] = scaled;
    if (scaled) j["alpha"] = alpha;
    return j;
  }
};

void add_dist_options(CLI::App& sub, DistArgs& a, const char* var, const char* what) {
  add_model_options(sub, a.model);
  sub.add_option(std::string("--") + var, a.points, what);
  sub.add_flag("--scaled", a.scaled, "Use returns normalized by <|x|^alpha>^(1/alpha)");
  sub.add_option("--alpha", a.alpha, "Normalization order for --scaled")->capture_default_str();
}

void register_pdf(CLI::App& root, std::vector<Command>& out) {
  auto a = std::make_shared<DistArgs>();
  a->lo = -5.0;
  a->hi = 5.0;
  a->count = 201;
  auto meijer = std::make_shared<bool>(false);
  auto* sub = root.add_subcommand("pdf", "Return density f(x)");
  add_dist_options(*sub, *a, "x", "Evaluation points (default: linear grid)");
  sub->add_option("--x-min", a->lo)->capture_default_str();
  sub->add_option("--x-max", a->hi)->capture_default_str();
  sub->add_option("--points", a->count)->capture_default_str();
  sub->add_flag("--meijer", *meijer, "Add the ST11 Meijer-G closed form as a second column");
  out.push_back({"pdf", Format::csv, false, sub, [a, meijer] {
                   const auto dist = a->dist();
                   const auto xs = a->points.empty() ? linear_grid(a->lo, a->hi, a->count) : a->points;
                   if (*meijer && (dist.is_scaled() || !(dist.model() == ModelParams::st11())))
                     throw DomainError("--meijer needs an unscaled st11 distribution");
                   const auto f = retdist::evaluate_grid(dist, xs, retdist::Quantity::pdf);
                   Document d;
                   d.config = a->config("x");
                   d.config["meijer"] = *meijer;
                   d.table.columns = {"x", "pdf"};
                   if (*meijer) d.table.columns.push_back("pdf_meijer");
                   for (std::size_t i = 0; i < xs.size(); ++i) {
                     std::vector<Cell> row{xs[i], f[i]};
                     if (*meijer) row.emplace_back(retdist::return_pdf_st11_analytic(dist, xs[i]));
                     d.table.add(std::move(row));
                   }
                   return d;
                 }});
}

void register_ccdf(CLI::App& root, std::vector<Command>& out) {
  auto a = std::make_shared<DistArgs>();
  a->lo = 0.1;
  a->hi = 20.0;
  a->count = 50;
  auto* sub = root.add_subcommand("ccdf", "P(|x| > t) with a Gaussian reference column");
  add_dist_options(*sub, *a, "t", "Thresholds (default: log-spaced grid)");
  sub->add_option("--t-min", a->lo)->capture_default_str();
  sub->add_option("--t-max", a->hi)->capture_default_str();
  sub->add_option("--points", a->count)->capture_default_str();
  out.push_back({"ccdf", Format::csv, false, sub, [a] {
                   const auto dist = a->dist();
                   const auto ts = a->points.empty() ? pipeline::log_spaced(a->lo, a->hi, a->count) : a->points;
                   const auto p = retdist::evaluate_grid(dist, ts, retdist::Quantity::ccdf_abs);
                   // Gaussian with the same normalization: unit <|z|^alpha>, or the same variance.
                   const double sigma =
                       dist.is_scaled()
                           ? std::pow(maxent::slave_constant(0.0) / maxent::slave_constant(dist.alpha()), 1.0 / dist.alpha())
                           : dist.scale().w0() * std::sqrt(maxent::volatility_moment(dist.model(), 2.0));
                   Document d;
                   d.config = a->config("t");
                   d.table.columns = {"t", "ccdf", "gaussian_ccdf"};
                   for (std::size_t i = 0; i < ts.size(); ++i)
                     d.table.add({ts[i], p[i], std::erfc(ts[i] / (sigma * std::sqrt(2.0)))});
                   return d;
                 }});
}

struct SimArgs {
  ModelArgs model;
  std::string mode = "windows";
  std::size_t windows = 1000;
  std::size_t runs = 1000;
  std::uint64_t transitions = 400;
  double tick = 0.01;
  double price = 10.0;
  double eta = 0.5;
  std::uint64_t max_transitions = 100'000'000;
  std::uint64_t low_count = 10;
  std::string ticks_out;
  std::string ticker = "SYN";
  std::size_t windows_per_day = 34;
  double window_minutes = 15.0;
  std::string first_day = "2024-01-02";
  std::vector<double> day_scale;
};

Document simulate_ticks(const SimArgs& a, const Globals& g, nlohmann::json config) {
  microsim::TickStreamConfig cfg;
  cfg.walk = {a.tick, a.price, a.eta, 0};
  cfg.walk.validate();
  const auto minutes = std::chrono::duration<double, std::ratio<60>>(a.window_minutes);
  cfg.window = std::chrono::duration_cast<Nanos>(minutes);
  cfg.windows_per_day = a.windows_per_day;
  const auto day = pipeline::parse_date(a.first_day);
  if (!day) throw DomainError("--first-day must be YYYY-MM-DD");
  cfg.first_day = *day;
  cfg.day_scale = a.day_scale;
  const auto stream = microsim::simulate_tick_stream(a.model.params(), a.model.scale(), cfg, a.windows, g.seed);

  Document d;
  d.command = "simulate";
  d.config = std::move(config);
  d.seed = g.seed;
  d.uses_seed = true;
  d.summary["quotes"] = stream.quotes.size();
  d.table.columns = {"window_start", "w_drawn", "N"};
  for (const auto& w : stream.windows) d.table.add({pipeline::format_rfc3339(w.start), w.w, w.transitions});

  std::ofstream f(a.ticks_out, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + a.ticks_out + "'");
  f << metadata_lines(d) << "# tick_size: " << pipeline::format_double(a.tick) << '\n';
  const pipeline::TickSeries series{a.ticker, stream.quotes, a.tick};
  pipeline::write_ticks_csv(f, std::span<const pipeline::TickSeries>(&series, 1));
  if (!f) throw DomainError("failed writing '" + a.ticks_out + "'");
  return d;
}

void register_simulate(CLI::App& root, std::vector<Command>& out, const Globals& g) {
  auto a = std::make_shared<SimArgs>();
  a->model.default_mean_w = 0.01;
  auto* sub = root.add_subcommand("simulate", "Ideally liquid stock simulations");
  add_model_options(*sub, a->model);
  sub->add_option("--mode", a->mode, "windows: double-stochastic windows; walk: fixed-N walks")
      ->check(CLI::IsMember({"windows", "walk"}))
      ->capture_default_str();
  sub->add_option("--windows,-n", a->windows, "Number of windows")->capture_default_str();
  sub->add_option("--runs", a->runs, "Walks in --mode walk")->capture_default_str();
  sub->add_option("--transitions", a->transitions, "Transitions per walk in --mode walk")->capture_default_str();
  sub->add_option("--tick", a->tick)->capture_default_str();
  sub->add_option("--price", a->price, "Starting mid-price")->capture_default_str();
  sub->add_option("--eta", a->eta, "Up-move probability")->capture_default_str();
  sub->add_option("--max-transitions", a->max_transitions)->capture_default_str();
  sub->add_option("--low-count", a->low_count, "Flag windows with fewer transitions")->capture_default_str();
  sub->add_option("--ticks-out", a->ticks_out, "Simulate a quote stream and write it here");
  sub->add_option("--ticker", a->ticker)->capture_default_str();
  sub->add_option("--windows-per-day", a->windows_per_day)->capture_default_str();
  sub->add_option("--window-minutes", a->window_minutes)->capture_default_str();
  sub->add_option("--first-day", a->first_day)->capture_default_str();
  sub->add_option("--day-scale", a->day_scale, "Per-day volatility multipliers");
  out.push_back({"simulate", Format::csv, true, sub, [a, &g] {
                   nlohmann::json c = a->model.config();
                   c["tick"] = a->tick;
                   c["price"] = a->price;
                   c["eta"] = a->eta;
                   if (!a->ticks_out.empty()) {
                     if (a->mode != "windows") throw DomainError("--ticks-out works with --mode windows only");
                     c["mode"] = "ticks";
                     c["windows"] = a->windows;
                     c["ticks_out"] = a->ticks_out;
                     c["ticker"] = a->ticker;
                     c["windows_per_day"] = a->windows_per_day;
                     c["window_minutes"] = a->window_minutes;
                     c["first_day"] = a->first_day;
                     c["day_scale"] = a->day_scale;
                     return simulate_ticks(*a, g, std::move(c));
                   }
                   const microsim::WalkConfig walk{a->tick, a->price, a->eta, a->transitions};
                   Document d;
                   c["mode"] = a->mode;
                   if (a->mode == "walk") {
                     c["transitions"] = a->transitions;
                     c["runs"] = a->runs;
                     d.config = c;
                     walk.validate();
                     std::vector<microsim::WalkResult> res(a->runs);
                     for_each_index(Exec::parallel, a->runs, [&](std::size_t i) {
                       auto rng = numeric::Rng::stream(g.seed, i);
                       res[i] = microsim::simulate_walk(walk, rng);
                     });
                     d.table.columns = {"run_index", "log_return", "min_price", "max_price"};
                     for (std::size_t i = 0; i < res.size(); ++i)
                       d.table.add({static_cast<std::uint64_t>(i), res[i].log_return, res[i].summary.min, res[i].summary.max});
                     d.summary["predicted_std"] = std::sqrt(static_cast<double>(a->transitions)) * a->tick / a->price;
                     return d;
                   }
                   c["windows"] = a->windows;
                   c["max_transitions"] = a->max_transitions;
                   c["low_count"] = a->low_count;
                   d.config = c;
                   const microsim::DoubleStochasticOptions opts{a->max_transitions, a->low_count};
                   const auto rows = microsim::simulate_double_stochastic(a->model.params(), a->model.scale(), walk,
                                                                          {1.0, a->windows}, g.seed, opts);
                   d.table.columns = {"window_index", "w_drawn", "N", "log_return", "low_count"};
                   for (const auto& r : rows)
                     d.table.add({static_cast<std::uint64_t>(r.index), r.w, r.transitions, r.log_return, r.low_count});
                   return d;
                 }});
}

struct EntropyArgs {
  ModelArgs model;
  std::size_t perturbations = 100;
  maxent::MaxentOptions opts;
};

void register_entropy(CLI::App& root, std::vector<Command>& out, const Globals& g) {
  auto a = std::make_shared<EntropyArgs>();
  a->model.model = "all";
  auto* sub = root.add_subcommand("entropy-check", "Process entropy and the maximum-entropy property");
  add_model_options(*sub, a->model);
  sub->add_option("--perturbations", a->perturbations)->capture_default_str();
  sub->add_option("--grid-nodes", a->opts.grid_nodes)->capture_default_str();
  sub->add_option("--amplitude", a->opts.amplitude)->capture_default_str();
  sub->add_option("--tolerance", a->opts.tolerance)->capture_default_str();
  out.push_back({"entropy-check", Format::csv, true, sub, [a, &g] {
                   std::vector<ModelParams> models;
                   if (a->model.model == "all") models = {ModelParams::st11(), ModelParams::st01(), ModelParams::st12()};
                   else models = {a->model.params()};
                   Document d;
                   d.config = a->model.config();
                   d.config["perturbations"] = a->perturbations;
                   d.config["grid_nodes"] = a->opts.grid_nodes;
                   d.config["amplitude"] = a->opts.amplitude;
                   d.config["tolerance"] = a->opts.tolerance;
                   d.table.columns = {"model", "slave_entropy", "master_entropy", "master_exact", "quad_error",
                                      "trials", "discarded", "violations", "reference_entropy",
                                      "max_perturbed_entropy", "min_gap", "pass"};
                   for (const auto& m : models) {
                     const auto scale = a->model.scale_for(m);
                     const auto e = maxent::process_entropy(m, scale);
                     const auto r = maxent::maxent_verify(m, scale, a->perturbations, g.seed, a->opts);
                     d.table.add({m.name(), e.slave, e.master, e.master_exact, e.quad_error,
                                  static_cast<std::uint64_t>(r.trials), static_cast<std::uint64_t>(r.discarded),
                                  static_cast<std::uint64_t>(r.violations), r.reference_entropy,
                                  r.max_perturbed_entropy, r.min_gap, r.violations == 0});
                   }
                   return d;
                 }});
}

}  // namespace

void register_model_commands(CLI::App& root, std::vector<Command>& out, const Globals& g) {
  register_pdf(root, out);
  register_ccdf(root, out);
  register_simulate(root, out, g);
  register_entropy(root, out, g);
}

}  // namespace stvol::cli
