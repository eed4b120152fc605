#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "stvol/market.hpp"

namespace stvol::pipeline {

/// ISO-8601 calendar date, YYYY-MM-DD.
std::optional<Date> parse_date(std::string_view s);
std::string format_date(Date d);

/// RFC-3339 timestamp with a mandatory offset (Z or ±hh:mm) and optional
/// fractional seconds up to nanoseconds; returned in UTC.
std::optional<Timestamp> parse_rfc3339(std::string_view s);
/// UTC, `YYYY-MM-DDTHH:MM:SS[.fffffffff]Z`; fraction only when non-zero.
std::string format_rfc3339(Timestamp ts);

/// UTC calendar day containing ts.
Date utc_day(Timestamp ts);

}  // namespace stvol::pipeline
