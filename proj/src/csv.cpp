#include "roadcross/csv.hpp"

#include <charconv>
#include <fstream>

namespace roadcross::csv {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::vector<Row> read_rows(const std::filesystem::path& path,
                           const std::string& expected_header)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());

    std::string line;
    std::size_t line_number = 0;
    if (!std::getline(in, line))
        throw ParseError(path.string() + ": empty file, expected header '" +
                         expected_header + "'");
    ++line_number;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != expected_header)
        throw ParseError(path.string() + ":1: bad header, expected '" +
                         expected_header + "' got '" + line + "'");

    const std::size_t field_count = split_fields(expected_header).size();
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        Row row;
        row.line_number = line_number;
        row.fields = split_fields(line);
        if (row.fields.size() != field_count)
            throw ParseError(path.string() + ":" + std::to_string(line_number) +
                             ": expected " + std::to_string(field_count) +
                             " fields, got " + std::to_string(row.fields.size()));
        rows.push_back(std::move(row));
    }
    return rows;
}

long long parse_int(const std::string& field, const std::filesystem::path& path,
                    std::size_t line)
{
    long long value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError(path.string() + ":" + std::to_string(line) +
                         ": expected integer, got '" + field + "'");
    return value;
}

double parse_double(const std::string& field, const std::filesystem::path& path,
                    std::size_t line)
{
    try {
        std::size_t pos = 0;
        const double value = std::stod(field, &pos);
        if (pos != field.size())
            throw std::invalid_argument(field);
        return value;
    } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(line) +
                         ": expected number, got '" + field + "'");
    }
}

} // namespace roadcross::csv
