#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cqipred::csv {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Writes `table` to `path`, creating parent directories. Throws
/// std::runtime_error naming the path on any I/O failure.
void write(const Table& table, const std::filesystem::path& path);

/// Reads a comma-separated file with a header row. Blank lines and lines
/// starting with '#' are skipped.
Table read(const std::filesystem::path& path);

} // namespace cqipred::csv
