#pragma once
// Small text helpers shared by the TSV/CSV readers and writers.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nudgesim {

// Shortest decimal representation that parses back to the identical double.
std::string format_double(double value);

// Strict parse: the whole field must be a finite number.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

// RFC 4180 style field splitting for a single CSV record (no embedded newlines).
std::optional<std::vector<std::string>> parse_csv_record(std::string_view line);
std::string csv_field(std::string_view value);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace nudgesim
