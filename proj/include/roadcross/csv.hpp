#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace roadcross::csv {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Row {
    std::size_t line_number = 0; // 1-based line in the file
    std::vector<std::string> fields;
};

// Reads a comma-separated file. The first line must equal `expected_header`
// exactly; every data row must have the same field count as the header.
// Throws ParseError naming the file and line on any violation.
std::vector<Row> read_rows(const std::filesystem::path& path,
                           const std::string& expected_header);

long long parse_int(const std::string& field, const std::filesystem::path& path,
                    std::size_t line);
double parse_double(const std::string& field, const std::filesystem::path& path,
                    std::size_t line);

std::vector<std::string> split_fields(const std::string& line);

} // namespace roadcross::csv
