#pragma once

// Market data containers and their CSV forms:
//   daily   date,ticker,close
//   index   date,value
//   ticks   timestamp,ticker,bid,ask   (+ JSON side-car: {"TICKER": tick_size, ...})
//   returns any CSV with a `log_return` or `return` column

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "stvol/market.hpp"

namespace stvol::pipeline {

struct DailyPoint {
  Date date;
  double close = 0.0;
};

/// Time-ordered closes of one instrument; dates strictly increase.
struct DailySeries {
  std::string ticker;
  std::vector<DailyPoint> points;
};

struct TickSeries {
  std::string ticker;
  std::vector<TickQuote> quotes;  ///< non-decreasing timestamps, ask >= bid > 0
  double tick_size = 0.0;
};

/// A row that was dropped on ingestion but did not abort it.
struct Diagnostic {
  std::size_t line = 0;
  std::string message;
};

template <typename T>
struct Ingested {
  std::vector<T> series;
  std::vector<Diagnostic> warnings;
};

/// One series per ticker, in order of first appearance. Rows with a
/// non-positive close are dropped with a warning; a repeated (ticker, date)
/// is a ParseError naming both lines.
Ingested<DailySeries> ingest_daily(std::istream& in, const std::string& source = "<daily>");
Ingested<DailySeries> ingest_daily_file(const std::string& path);

/// `date,value` volatility-index series (returned with ticker "index").
DailySeries ingest_index(std::istream& in, const std::string& source = "<index>");
DailySeries ingest_index_file(const std::string& path);

using TickSizes = std::map<std::string, double, std::less<>>;

/// JSON object mapping ticker to tick size; a "default" key applies to
/// tickers not listed.
TickSizes load_tick_sizes(std::istream& in, const std::string& source = "<tick sizes>");
TickSizes load_tick_sizes_file(const std::string& path);

/// Crossed (ask < bid) or non-positive quotes are dropped with a warning;
/// timestamps going backwards within a ticker are a ParseError.
Ingested<TickSeries> ingest_ticks(std::istream& in, const TickSizes& sizes, const std::string& source = "<ticks>");
Ingested<TickSeries> ingest_ticks_file(const std::string& path, const TickSizes& sizes);

/// Values of the `log_return` (or `return`) column.
std::vector<double> ingest_return_column(std::istream& in, const std::string& source = "<returns>");
std::vector<double> ingest_return_column_file(const std::string& path);

void write_daily_csv(std::ostream& out, std::span<const DailySeries> series);
void write_index_csv(std::ostream& out, const DailySeries& index);
void write_ticks_csv(std::ostream& out, std::span<const TickSeries> series);

}  // namespace stvol::pipeline
