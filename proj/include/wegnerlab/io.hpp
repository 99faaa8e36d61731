#pragma once

#include <string>
#include <vector>

namespace wl {

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::string& path);
/// Writes atomically enough for our purposes (truncate + write).
void write_file(const std::string& path, const std::string& bytes);

/// Shortest round-trip decimal representation.
std::string fmt_double(double value);

/// Joins fields with commas.
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace wl
