#pragma once

#include <string>

namespace lining {

/// True for a well-formed ISO-8601 calendar date (YYYY-MM-DD) that exists in
/// the Gregorian calendar.
bool is_valid_date(const std::string& iso);

/// The date `days` after `iso` (days may be 0); throws DataError on a bad date.
std::string add_days(const std::string& iso, int days);

} // namespace lining
