#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "stvol/error.hpp"
#include "stvol/microsim.hpp"
#include "stvol/numeric/quadrature.hpp"
#include "stvol/numeric/stats.hpp"
#include "stvol/pipeline/analysis.hpp"
#include "stvol/pipeline/csv.hpp"
#include "stvol/pipeline/data.hpp"
#include "stvol/pipeline/timestamps.hpp"
#include "stvol/retdist.hpp"

using namespace stvol;
using namespace stvol::pipeline;
using namespace std::chrono_literals;

namespace {

Date day0() { return Date{std::chrono::year{2024} / 1 / 2}; }

DailySeries series_of(std::vector<double> closes) {
  DailySeries s{"T", {}};
  for (std::size_t i = 0; i < closes.size(); ++i) s.points.push_back({day0() + std::chrono::days(i), closes[i]});
  return s;
}

Timestamp at(std::int64_t seconds) { return Timestamp(day0()) + std::chrono::seconds(seconds); }

}  // namespace

TEST_CASE("CSV reader") {
  std::istringstream in("\xEF\xBB\xBF# comment\n\na,b\n1,2\n# mid\n3,x\n4\n");
  CsvReader csv(in, "mem");
  CHECK(csv.header() == std::vector<std::string>{"a", "b"});
  CHECK(csv.column("b") == 1);
  CHECK_FALSE(csv.find_column("c").has_value());
  CHECK_THROWS_AS(csv.column("c"), ParseError);
  REQUIRE(csv.next());
  CHECK(csv.number(0) == 1.0);
  CHECK(csv.line() == 4);
  REQUIRE(csv.next());
  CHECK(csv.line() == 6);
  try {
    csv.number(1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 6);
    CHECK(e.field() == "b");
  }
  CHECK_THROWS_AS(csv.next(), ParseError);
  CHECK(parse_double("1e-3") == 1e-3);
  CHECK_FALSE(parse_double("1e-3x").has_value());
  CHECK_FALSE(parse_double("nan").has_value());
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(parse_double(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("timestamps") {
  const auto t = parse_rfc3339("2024-03-01T09:30:00.25+01:00");
  REQUIRE(t.has_value());
  CHECK(format_rfc3339(*t) == "2024-03-01T08:30:00.25Z");
  CHECK(parse_rfc3339("2024-03-01T08:30:00.250Z") == t);
  CHECK_FALSE(parse_rfc3339("2024-03-01T08:30:00").has_value());
  CHECK_FALSE(parse_rfc3339("2024-02-30T08:30:00Z").has_value());
  CHECK(format_date(*parse_date("2024-02-29")) == "2024-02-29");
  CHECK_FALSE(parse_date("2023-02-29").has_value());
  CHECK(utc_day(*parse_rfc3339("2024-03-01T23:30:00-02:00")) == *parse_date("2024-03-02"));
}

TEST_CASE("daily ingestion") {
  std::istringstream ok("date,ticker,close\n2024-01-02,AAA,10\n2024-01-03,AAA,11\n2024-01-04,AAA,12\n");
  const auto a = ingest_daily(ok);
  REQUIRE(a.series.size() == 1);
  CHECK(a.series[0].points.size() == 3);
  CHECK(a.warnings.empty());

  std::istringstream zero("date,ticker,close\n2024-01-02,AAA,10\n2024-01-03,AAA,0\n2024-01-04,AAA,12\n");
  const auto z = ingest_daily(zero);
  CHECK(z.series[0].points.size() == 2);
  REQUIRE(z.warnings.size() == 1);
  CHECK(z.warnings[0].line == 3);

  std::istringstream dup("date,ticker,close\n2024-01-02,AAA,10\n2024-01-03,BBB,5\n2024-01-02,AAA,11\n");
  try {
    ingest_daily(dup, "dup.csv");
    FAIL("expected a duplicate error");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("lines 2 and 4") != std::string::npos);
  }

  std::istringstream bad("date,ticker,close\n2024-01-02,AAA,10\n2024-13-01,AAA,11\n");
  try {
    ingest_daily(bad, "bad.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.field() == "date");
  }
  std::istringstream unordered("date,ticker,close\n2024-01-03,AAA,11\n2024-01-02,AAA,10\n");
  const auto u = ingest_daily(unordered);
  CHECK(u.series[0].points[0].close == 10.0);
  CHECK_THROWS_AS(ingest_daily_file("no/such/file.csv"), DomainError);
}

TEST_CASE("index, tick and return-column ingestion") {
  std::istringstream idx("date,value\n2024-01-02,15.5\n2024-01-03,16\n2024-01-02,17\n");
  CHECK_THROWS_AS(ingest_index(idx), ParseError);

  std::istringstream js(R"({"AAA": 0.01, "default": 0.05})");
  const auto sizes = load_tick_sizes(js);
  CHECK(sizes.at("AAA") == 0.01);
  std::istringstream badjs(R"({"AAA": -1})");
  CHECK_THROWS_AS(load_tick_sizes(badjs), ParseError);

  std::istringstream ticks(
      "timestamp,ticker,bid,ask\n"
      "2024-01-02T09:00:00Z,AAA,10.00,10.01\n"
      "2024-01-02T09:00:01Z,AAA,10.02,10.01\n"
      "2024-01-02T09:00:02Z,BBB,5.00,5.05\n"
      "2024-01-02T09:00:03Z,AAA,10.01,10.02\n");
  const auto t = ingest_ticks(ticks, sizes);
  REQUIRE(t.series.size() == 2);
  CHECK(t.series[0].quotes.size() == 2);
  CHECK(t.series[0].tick_size == 0.01);
  CHECK(t.series[1].tick_size == 0.05);
  CHECK(t.warnings.size() == 1);

  std::istringstream back("timestamp,ticker,bid,ask\n2024-01-02T09:00:05Z,AAA,1,1.01\n2024-01-02T09:00:04Z,AAA,1,1.01\n");
  CHECK_THROWS_AS(ingest_ticks(back, sizes), ParseError);
  std::istringstream nosize("timestamp,ticker,bid,ask\n2024-01-02T09:00:05Z,ZZZ,1,1.01\n");
  CHECK_THROWS_AS(ingest_ticks(nosize, TickSizes{{"AAA", 0.01}}), DomainError);

  std::vector<TickSeries> out_series = t.series;
  std::stringstream round;
  write_ticks_csv(round, out_series);
  const auto again = ingest_ticks(round, sizes);
  CHECK(again.series[0].quotes[1].ts == t.series[0].quotes[1].ts);
  CHECK(again.series[0].quotes[1].ask == t.series[0].quotes[1].ask);

  std::istringstream rc("# x\nwindow_index,log_return\n0,0.5\n1,-0.25\n");
  CHECK(ingest_return_column(rc) == std::vector<double>{0.5, -0.25});
  std::istringstream rc2("return\n0.1\n");
  CHECK(ingest_return_column(rc2) == std::vector<double>{0.1});
  std::istringstream none("x\n1\n");
  CHECK_THROWS_AS(ingest_return_column(none), ParseError);
}

TEST_CASE("returns and normalization") {
  CHECK(compute_returns(series_of({100, 110}), 1).returns[0] == doctest::Approx(0.0953102).epsilon(1e-6));
  for (double x : compute_returns(series_of({5, 5, 5, 5}), 1).returns) CHECK(x == 0.0);
  const auto two = compute_returns(series_of({100, 110, 121}), 2);
  REQUIRE(two.returns.size() == 1);
  CHECK(two.returns[0] == doctest::Approx(2.0 * std::log(1.1)).epsilon(1e-15));
  CHECK(two.dates[0] == day0() + std::chrono::days(2));
  CHECK_THROWS_AS(compute_returns(series_of({100, 110}), 2), DomainError);

  ReturnSample s;
  s.returns = {-2.0, 2.0};
  const auto n = normalize_sample(s, 2.0);
  CHECK(n.scale == 2.0);
  CHECK(n.returns == std::vector<double>{-1.0, 1.0});
  s.returns = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(normalize_sample(s, 2.0), DomainError);

  std::mt19937_64 g(1);
  std::student_t_distribution<double> t(4.0);
  ReturnSample r;
  for (int i = 0; i < 1000; ++i) r.returns.push_back(0.01 * t(g));
  const auto once = normalize_sample(r, 2.0);
  double ms = 0.0;
  for (double x : once.returns) ms += x * x;
  CHECK(ms / 1000.0 == doctest::Approx(1.0).epsilon(1e-14));
  const auto twice = normalize_sample(once, 2.0);
  CHECK(twice.scale / once.scale == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical CCDF") {
  const std::vector<double> sample{-1.0, 2.0, -3.0};
  const std::vector<double> t{0.0, 2.5};
  const auto c = empirical_ccdf(sample, t);
  CHECK(c.prob == std::vector<double>{1.0, 1.0 / 3.0});
  CHECK(c.std_error[1] == doctest::Approx(std::sqrt(2.0 / 27.0)));
  CHECK_THROWS_AS(empirical_ccdf(sample, std::vector<double>{1.0, 0.5}), ContractError);

  const auto grid = log_spaced();
  REQUIRE(grid.size() == 50);
  CHECK(grid.front() == doctest::Approx(0.1));
  CHECK(grid.back() == doctest::Approx(20.0));

  std::mt19937_64 g(11);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> x(500);
    for (auto& v : x) v = z(g);
    const auto e = empirical_ccdf(x, grid);
    for (std::size_t j = 1; j < e.prob.size(); ++j) CHECK(e.prob[j] <= e.prob[j - 1]);
    const auto direct = std::count_if(x.begin(), x.end(), [&](double v) { return std::abs(v) > grid[0]; });
    CHECK(e.prob[0] == static_cast<double>(direct) / 500.0);
  }
}

TEST_CASE("CCDF aggregation") {
  const std::vector<double> t{0.0, 1.0, 2.0};
  const auto a = empirical_ccdf(std::vector<double>{0.5, 1.5, -2.5, 0.1}, t);
  const std::vector<EmpiricalCCDF> same{a, a};
  for (auto w : {Weights::equal, Weights::inverse_variance}) {
    const auto agg = aggregate_ccdf(same, w);
    CHECK(agg.prob == a.prob);
    for (double e : agg.std_error) CHECK(e == doctest::Approx(0.0));
    CHECK(agg.n_sources == 2);
    CHECK(agg.n_samples == 8);
  }
  auto other = empirical_ccdf(std::vector<double>{1.0}, std::vector<double>{0.0, 1.5, 2.0});
  CHECK_THROWS_AS(aggregate_ccdf(std::vector<EmpiricalCCDF>{a, other}), ContractError);
  CHECK_THROWS_AS(aggregate_ccdf(std::vector<EmpiricalCCDF>{}), ContractError);

  const auto b = empirical_ccdf(std::vector<double>{3.0, 3.0, 3.0, 3.0}, t);
  const auto eq = aggregate_ccdf(std::vector<EmpiricalCCDF>{a, b}, Weights::equal, Spread::std_dev);
  CHECK(eq.prob[1] == doctest::Approx(0.75));
  CHECK(eq.std_error[1] == doctest::Approx(std::sqrt(2.0) * 0.25));
  const auto se = aggregate_ccdf(std::vector<EmpiricalCCDF>{a, b}, Weights::equal, Spread::std_error);
  CHECK(se.std_error[1] == doctest::Approx(0.25));
}

TEST_CASE("aggregated synthetic ST11 stocks match the model") {
  const auto model = maxent::ModelParams::st11();
  const auto scaled = retdist::ReturnDist::scaled(model, 2.0);
  const std::vector<double> t = log_spaced(0.1, 4.0, 20);
  auto run = [&](std::size_t k, std::uint64_t seed) {
    std::vector<EmpiricalCCDF> per;
    for (std::size_t s = 0; s < k; ++s) {
      const auto raw = retdist::ReturnDist::raw(maxent::VolScale::from_mean_w(model, 0.01 * (1.0 + s % 3)));
      ReturnSample smp;
      smp.returns = retdist::sample_returns(raw, 4000, seed * 1000 + s);
      per.push_back(empirical_ccdf(normalize_sample(smp, 2.0).returns, t));
    }
    return aggregate_ccdf(per);
  };
  const auto agg = run(20, 1);
  for (std::size_t j = 0; j < t.size(); ++j)
    CHECK(std::abs(agg.prob[j] - retdist::return_ccdf_abs(scaled, t[j])) <= 2.0 * agg.std_error[j]);

  // RMS error over the grid shrinks roughly as 1/sqrt(K).
  std::vector<double> rms;
  for (std::size_t k : {5, 20, 80}) {
    double acc = 0.0;
    for (std::uint64_t rep = 0; rep < 4; ++rep) {
      const auto a = run(k, 100 + rep + 10 * k);
      for (std::size_t j = 0; j < t.size(); ++j) {
        const double d = a.prob[j] - retdist::return_ccdf_abs(scaled, t[j]);
        acc += d * d;
      }
    }
    rms.push_back(std::sqrt(acc / (4.0 * t.size())));
  }
  CHECK(rms[1] < rms[0]);
  CHECK(rms[2] < rms[1]);
  CHECK(rms[0] / rms[2] == doctest::Approx(4.0).epsilon(0.5));
}

TEST_CASE("transition detection") {
  TickSeries flat{"A", {}, 0.01};
  for (int i = 0; i < 5; ++i) flat.quotes.push_back({at(i), 10.00, 10.02});
  CHECK(detect_transitions(flat).empty());

  TickSeries one{"A", {{at(0), 10.00, 10.02}, {at(1), 10.00, 10.04}}, 0.01};
  const auto ev = detect_transitions(one);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].mid_before == doctest::Approx(10.01));
  CHECK(ev[0].mid_after == doctest::Approx(10.02));
  CHECK(ev[0].amplitude() == doctest::Approx(0.01));
  CHECK(ev[0].ts == at(1));

  // decimal noise below half a tick does not create events
  TickSeries noisy{"A", {{at(0), 0.1 + 0.2, 0.31}, {at(1), 0.3, 0.31}}, 0.01};
  CHECK(detect_transitions(noisy).empty());
}

TEST_CASE("tick stream round trip") {
  const auto model = maxent::ModelParams::st11();
  microsim::TickStreamConfig cfg;
  cfg.walk = {0.01, 50.0, 0.5, 0};
  const auto scale = maxent::VolScale::from_mean_w(model, 0.002);
  const std::size_t n = 34 * 6;
  const auto stream = microsim::simulate_tick_stream(model, scale, cfg, n, 17);
  TickSeries ts{"SYN", stream.quotes, 0.01};
  const auto events = detect_transitions(ts);
  std::uint64_t expected = 0;
  for (const auto& w : stream.windows) expected += w.transitions;
  CHECK(events.size() == expected);

  const auto est = estimate_diffusion(events, ts);
  REQUIRE(est.size() == n);
  std::vector<double> d, w2;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(est[i].window_start == stream.windows[i].start);
    CHECK(est[i].transition_count == stream.windows[i].transitions);
    CHECK_FALSE(est[i].wide_spread);
    d.push_back(est[i].d_value);
    w2.push_back(stream.windows[i].w * stream.windows[i].w);
  }
  const auto md = numeric::sample_moments(d), mw = numeric::sample_moments(w2);
  double cov = 0.0;
  for (std::size_t i = 0; i < n; ++i) cov += (d[i] - md.mean) * (w2[i] - mw.mean);
  cov /= static_cast<double>(n - 1);
  CHECK(cov / std::sqrt(md.variance * mw.variance) > 0.99);
}

TEST_CASE("diffusion estimates") {
  TickSeries ts{"A", {}, 0.01};
  ts.quotes.push_back({at(0), 9.995, 10.005});
  std::vector<TransitionEvent> ev;
  for (int i = 0; i < 100; ++i) ev.push_back({at(1 + i), 10.0, 10.01});
  ts.quotes.push_back({at(900), 9.995, 10.005});
  ts.quotes.push_back({at(1800), 9.995, 10.005});
  const auto est = estimate_diffusion(ev, ts);
  REQUIRE(est.size() == 2);
  CHECK(est[0].d_value == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(est[0].mean_price == doctest::Approx(10.0));
  CHECK(est[1].d_value == 0.0);
  CHECK(est[1].transition_count == 0);
  REQUIRE(est[0].normalized.has_value());
  CHECK(*est[0].normalized == doctest::Approx(2.0));

  DiffusionOptions per_second;
  per_second.time_unit = 1s;
  CHECK(estimate_diffusion(ev, ts, per_second)[0].d_value == doctest::Approx(1e-4 / 900.0).epsilon(1e-12));

  TickSeries wide{"A", {{at(0), 9.99, 10.01}, {at(900), 9.99, 10.01}}, 0.01};
  CHECK(estimate_diffusion({}, wide)[0].wide_spread);

  TickSeries short_series{"A", {{at(0), 9.995, 10.005}, {at(100), 9.995, 10.005}}, 0.01};
  CHECK_THROWS_AS(estimate_diffusion({}, short_series), DomainError);
}

TEST_CASE("trailing-day normalization") {
  const auto model = maxent::ModelParams::st11();
  microsim::TickStreamConfig cfg;
  cfg.walk = {0.01, 50.0, 0.5, 0};
  cfg.window = 5min;
  cfg.windows_per_day = 150;
  cfg.day_scale = {1, 1, 1, 1, 1, 2, 2, 2, 2, 2};
  const auto scale = maxent::VolScale::from_mean_w(model, 0.001);
  const auto stream = microsim::simulate_tick_stream(model, scale, cfg, 1500, 23);
  TickSeries ts{"SYN", stream.quotes, 0.01};
  const auto ev = detect_transitions(ts);
  DiffusionOptions whole_opts;
  whole_opts.window = 5min;
  DiffusionOptions trailing = whole_opts;
  trailing.normalization = DiffusionNorm::trailing_days;
  const auto tr = estimate_diffusion(ev, ts, trailing);
  const auto whole = estimate_diffusion(ev, ts, whole_opts);
  REQUIRE(tr.size() == 1500);
  for (std::size_t i = 0; i < 450; ++i) CHECK_FALSE(tr[i].normalized.has_value());
  CHECK(tr[450].normalized.has_value());
  double mean_tr = 0.0, mean_whole = 0.0;
  for (std::size_t i = 1200; i < 1500; ++i) {
    REQUIRE(tr[i].normalized.has_value());
    mean_tr += *tr[i].normalized / 300.0;
    mean_whole += *whole[i].normalized / 300.0;
  }
  // late high-regime days: trailing reference already adapted, whole-sample one has not
  CHECK(mean_tr == doctest::Approx(1.0).epsilon(0.35));
  CHECK(mean_whole > 1.2);
  DiffusionOptions zero_days = trailing;
  zero_days.trailing_days = 0;
  CHECK_THROWS_AS(estimate_diffusion(ev, ts, zero_days), DomainError);
}

TEST_CASE("diffusion density") {
  const auto st11 = maxent::ModelParams::st11();
  CHECK(diffusion_density(st11, 1.0 / 3.0) == doctest::Approx(6.0 * std::exp(-2.0)).epsilon(1e-13));
  CHECK(diffusion_density(st11, 1.0 / 3.0) == doctest::Approx(0.8120117).epsilon(1e-7));
  for (double d : {0.01, 0.5, 2.0, 7.0})
    CHECK(diffusion_density(st11, d) == doctest::Approx(6.0 * std::sqrt(3.0 * d) * std::exp(-2.0 * std::sqrt(3.0 * d))).epsilon(1e-13));
  CHECK(diffusion_density(st11, 0.0) == 0.0);
  CHECK(diffusion_density(maxent::ModelParams::st12(), 0.0) == 0.0);
  // alpha_m = 0: F~(w)/w tends to delta/Gamma(k), so the density stays finite
  const auto st01 = maxent::ModelParams::st01();
  CHECK(diffusion_density(st01, 0.0) == doctest::Approx(0.5 * maxent::volatility_moment(st01, 2.0)));
  CHECK(diffusion_density(st01, 1e-12) == doctest::Approx(diffusion_density(st01, 0.0)).epsilon(1e-5));
  CHECK_THROWS_AS(diffusion_density(st11, -0.1), DomainError);
  for (const auto& m : {st11, st01, maxent::ModelParams::st12()}) {
    const std::vector<double> pts{0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0};
    numeric::QuadOptions o;
    o.rel_tol = 1e-12;
    const double mass = numeric::integrate([&](double d) { return diffusion_density(m, d); }, std::span<const double>(pts), o).value;
    const double mean = numeric::integrate([&](double d) { return d * diffusion_density(m, d); }, std::span<const double>(pts), o).value;
    CHECK(std::abs(mass - 1.0) < 1e-8);
    CHECK(std::abs(mean - 1.0) < 1e-8);
    CHECK(diffusion_cdf(m, 2.0) == doctest::Approx(numeric::integrate([&](double d) { return diffusion_density(m, d); }, 0.0, 2.0, o).value).epsilon(1e-10));
  }
}

TEST_CASE("volatility-index band filter") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> z;
  DailySeries prices{"X", {{day0(), 100.0}}};
  DailySeries index{"index", {}};
  double p = 100.0;
  for (int i = 1; i <= 4000; ++i) {
    const bool calm = (i / 50) % 2 == 0;
    p *= std::exp((calm ? 0.01 : 0.03) * z(g));
    const Date d = day0() + std::chrono::days(i);
    prices.points.push_back({d, p});
    if (i % 97 != 0) index.points.push_back({d, calm ? 18.0 : 35.0});
  }
  const auto sample = compute_returns(prices, 1);
  const auto all = filter_by_index_band(sample, index, 0.0, std::numeric_limits<double>::infinity());
  CHECK(all.sample.returns.size() + all.dropped_missing == sample.returns.size());
  CHECK(all.dropped_outside == 0);
  const auto none = filter_by_index_band(sample, index, 100.0, 200.0);
  CHECK(none.sample.empty());
  CHECK_THROWS_AS(normalize_sample(none.sample, 2.0), DomainError);
  const auto band = filter_by_index_band(sample, index, 15.0, 25.0);
  const double k_all = sample_kurtosis(sample.returns);
  const double k_band = sample_kurtosis(band.sample.returns);
  CHECK(k_band < k_all);
  CHECK(std::abs(k_band - 3.0) < 0.5);

  std::vector<double> identity_returns = sample.returns;
  DailySeries full_index{"index", {}};
  for (const auto& pt : prices.points) full_index.points.push_back({pt.date, 20.0});
  CHECK(filter_by_index_band(sample, full_index, 0.0, std::numeric_limits<double>::infinity()).sample.returns ==
        identity_returns);
  CHECK_THROWS_AS(filter_by_index_band(sample, index, 2.0, 1.0), DomainError);
}
