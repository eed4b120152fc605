#include "stvol/pipeline/data.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "json.hpp"

#include "stvol/error.hpp"
#include "stvol/pipeline/csv.hpp"
#include "stvol/pipeline/timestamps.hpp"

namespace stvol::pipeline {
namespace {

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  return in;
}

}  // namespace

Ingested<DailySeries> ingest_daily(std::istream& in, const std::string& source) {
  CsvReader csv(in, source);
  const auto c_date = csv.column("date"), c_ticker = csv.column("ticker"), c_close = csv.column("close");
  Ingested<DailySeries> out;
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::vector<std::size_t>> lines;  // parallel to points, for duplicate reports
  while (csv.next()) {
    const auto date = parse_date(csv.text(c_date));
    if (!date) throw ParseError(source, csv.line(), "date", "expected YYYY-MM-DD, got '" + std::string(csv.text(c_date)) + "'");
    const std::string ticker(csv.text(c_ticker));
    if (ticker.empty()) throw ParseError(source, csv.line(), "ticker", "empty ticker");
    const double close = csv.number(c_close);
    if (!(close > 0.0)) {
      out.warnings.push_back({csv.line(), "non-positive close for " + ticker + " on " + format_date(*date) + "; row dropped"});
      continue;
    }
    auto [it, fresh] = slot.try_emplace(ticker, out.series.size());
    if (fresh) {
      out.series.push_back({ticker, {}});
      lines.emplace_back();
    }
    out.series[it->second].points.push_back({*date, close});
    lines[it->second].push_back(csv.line());
  }
  for (std::size_t s = 0; s < out.series.size(); ++s) {
    auto& pts = out.series[s].points;
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pts[a].date < pts[b].date; });
    std::vector<DailyPoint> sorted;
    sorted.reserve(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i > 0 && pts[order[i]].date == pts[order[i - 1]].date) {
        const auto a = lines[s][order[i - 1]], b = lines[s][order[i]];
        throw ParseError(source, b, "date",
                         "duplicate date " + format_date(pts[order[i]].date) + " for " + out.series[s].ticker +
                             " (lines " + std::to_string(a) + " and " + std::to_string(b) + ")");
      }
      sorted.push_back(pts[order[i]]);
    }
    pts = std::move(sorted);
  }
  return out;
}

Ingested<DailySeries> ingest_daily_file(const std::string& path) {
  auto in = open(path);
  return ingest_daily(in, path);
}

DailySeries ingest_index(std::istream& in, const std::string& source) {
  CsvReader csv(in, source);
  const auto c_date = csv.column("date"), c_value = csv.column("value");
  DailySeries index{"index", {}};
  std::map<Date, std::size_t> seen;
  while (csv.next()) {
    const auto date = parse_date(csv.text(c_date));
    if (!date) throw ParseError(source, csv.line(), "date", "expected YYYY-MM-DD");
    const auto [it, fresh] = seen.emplace(*date, csv.line());
    if (!fresh)
      throw ParseError(source, csv.line(), "date",
                       "duplicate index date " + format_date(*date) + " (lines " + std::to_string(it->second) + " and " +
                           std::to_string(csv.line()) + ")");
    index.points.push_back({*date, csv.number(c_value)});
  }
  std::stable_sort(index.points.begin(), index.points.end(), [](auto& a, auto& b) { return a.date < b.date; });
  return index;
}

DailySeries ingest_index_file(const std::string& path) {
  auto in = open(path);
  return ingest_index(in, path);
}

TickSizes load_tick_sizes(std::istream& in, const std::string& source) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 1, "json", e.what());
  }
  if (!doc.is_object()) throw ParseError(source, 1, "json", "expected an object of ticker -> tick size");
  TickSizes sizes;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_number() || !(value.get<double>() > 0.0)) {
      throw ParseError(source, 1, key, "tick size must be a positive number");
    }
    sizes[key] = value.get<double>();
  }
  return sizes;
}

TickSizes load_tick_sizes_file(const std::string& path) {
  auto in = open(path);
  return load_tick_sizes(in, path);
}

Ingested<TickSeries> ingest_ticks(std::istream& in, const TickSizes& sizes, const std::string& source) {
  CsvReader csv(in, source);
  const auto c_ts = csv.column("timestamp"), c_ticker = csv.column("ticker");
  const auto c_bid = csv.column("bid"), c_ask = csv.column("ask");
  Ingested<TickSeries> out;
  std::unordered_map<std::string, std::size_t> slot;
  while (csv.next()) {
    const auto ts = parse_rfc3339(csv.text(c_ts));
    if (!ts) throw ParseError(source, csv.line(), "timestamp", "expected RFC-3339 with offset, got '" + std::string(csv.text(c_ts)) + "'");
    const std::string ticker(csv.text(c_ticker));
    const double bid = csv.number(c_bid), ask = csv.number(c_ask);
    if (!(bid > 0.0) || ask < bid) {
      out.warnings.push_back({csv.line(), "crossed or non-positive quote for " + ticker + "; row dropped"});
      continue;
    }
    auto [it, fresh] = slot.try_emplace(ticker, out.series.size());
    if (fresh) {
      auto size = sizes.find(ticker);
      if (size == sizes.end()) size = sizes.find("default");
      if (size == sizes.end()) throw DomainError("no tick size configured for ticker '" + ticker + "'");
      out.series.push_back({ticker, {}, size->second});
    }
    auto& quotes = out.series[it->second].quotes;
    if (!quotes.empty() && *ts < quotes.back().ts) {
      throw ParseError(source, csv.line(), "timestamp", "timestamps go backwards for " + ticker);
    }
    quotes.push_back({*ts, bid, ask});
  }
  return out;
}

Ingested<TickSeries> ingest_ticks_file(const std::string& path, const TickSizes& sizes) {
  auto in = open(path);
  return ingest_ticks(in, sizes, path);
}

std::vector<double> ingest_return_column(std::istream& in, const std::string& source) {
  CsvReader csv(in, source);
  auto col = csv.find_column("log_return");
  if (!col) col = csv.find_column("return");
  if (!col) throw ParseError(source, 1, "log_return", "need a 'log_return' or 'return' column");
  std::vector<double> values;
  while (csv.next()) values.push_back(csv.number(*col));
  return values;
}

std::vector<double> ingest_return_column_file(const std::string& path) {
  auto in = open(path);
  return ingest_return_column(in, path);
}

void write_daily_csv(std::ostream& out, std::span<const DailySeries> series) {
  out << "date,ticker,close\n";
  for (const auto& s : series) {
    for (const auto& p : s.points) out << format_date(p.date) << ',' << s.ticker << ',' << format_double(p.close) << '\n';
  }
}

void write_index_csv(std::ostream& out, const DailySeries& index) {
  out << "date,value\n";
  for (const auto& p : index.points) out << format_date(p.date) << ',' << format_double(p.close) << '\n';
}

void write_ticks_csv(std::ostream& out, std::span<const TickSeries> series) {
  out << "timestamp,ticker,bid,ask\n";
  for (const auto& s : series) {
    for (const auto& q : s.quotes) {
      out << format_rfc3339(q.ts) << ',' << s.ticker << ',' << format_double(q.bid) << ',' << format_double(q.ask) << '\n';
    }
  }
}

}  // namespace stvol::pipeline
