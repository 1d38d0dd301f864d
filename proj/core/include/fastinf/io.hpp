#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fastinf {

/// Shortest round-trip decimal form. Deterministic across runs and platforms
/// that share IEEE doubles; used for every number written to CSV.
std::string format_number(double value);

/// Quotes a CSV field if it contains a separator, quote or newline.
std::string csv_field(std::string_view value);

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_record(std::string_view line);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and renames into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace fastinf
