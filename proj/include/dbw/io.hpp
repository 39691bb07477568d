#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "dbw/types.hpp"

namespace dbw {

// Reads a CSV with a header naming columns u and v (any order, other columns
// ignored) into Z_t = u_t + i v_t. Every row must hold finite numbers; at
// least 16 rows are required.
TimeSeries ingest_velocity_csv(const std::filesystem::path& path, double delta);

// Writes u,v with 17 significant digits, so ingest_velocity_csv reproduces
// the values exactly.
void write_velocity_csv(const std::filesystem::path& path, const TimeSeries& z);

// Generic series input for the CLI: a u,v file is read as complex, anything
// else as a single real column (first column, optional non-numeric header).
TimeSeries read_series_csv(const std::filesystem::path& path, double delta);

// Formats with "%.17g".
std::string format_double(double v);

}  // namespace dbw
