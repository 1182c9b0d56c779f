// emit.hpp - CSV / JSON output of sweep results
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "relax/sweep.hpp"

namespace relax {

inline constexpr std::string_view kCsvHeader = "scenario,L,L_A,x,t_or_window,metric,value,value_normalized,stderr,seed";

enum class OutputFormat { Csv, Json };

/// Shortest decimal that parses back to the same double; "inf", "-inf", "nan".
std::string format_double(double value);

std::string to_csv(const SweepResult& result);
/// Rows plus a "config" block (the YAML echo and its parsed fields).
std::string to_json(const SweepResult& result);

/// Writes <dir>/<scenario>.csv or .json and returns the path. Throws IoError.
std::filesystem::path write_result(const SweepResult& result, const std::filesystem::path& dir, OutputFormat format);

/// Rows of a CSV produced by to_csv. Throws IoError on a malformed header or row.
std::vector<ResultRow> parse_csv(const std::string& text);

}  // namespace relax
