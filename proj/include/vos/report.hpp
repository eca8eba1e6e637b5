// Copyright 2026 the vosfuse authors
// SPDX-License-Identifier: Apache-2.0
//
// Report emission. Renders a harness::DatasetReport as JSON, CSV, or a
// plain-text table of per-variant mean J / mean F plus the relative drop of
// each variant below the frame-wise ideal, printed "(down x.xx%)" style as
// e.g. "↓2.50%".

#pragma once

#include <string>
#include <string_view>

#include "vos/harness.hpp"

namespace vos::report {

enum class Format { Json, Csv, Text };

/// "json" | "csv" | "text"; std::invalid_argument otherwise.
Format parse_format(std::string_view name);
std::string_view format_name(Format format);

/// (ideal - value) / ideal * 100; 0 when ideal is 0.
double gap_percent(double value, double ideal);

/// gap_percent formatted "↓x.xx%" (two decimals, half-away-from-zero).
std::string gap_string(double value, double ideal);

/// Renders the report in the requested format. JSON carries the config
/// echo, per-sequence means, dataset means, gap strings, and counters; CSV
/// and text carry the same numbers in tabular form.
std::string render(const harness::DatasetReport& report, Format format);

/// Parses a JSON report back into a DatasetReport (per-frame records are
/// not serialized, so `frames` is left empty). Throws DataError on
/// malformed input. render(from_json(to_json(r)), f) == render(r, f) for
/// every format f.
std::string to_json(const harness::DatasetReport& report);
harness::DatasetReport from_json(const std::string& text);

}  // namespace vos::report
