#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace adl {

// Parsed CSV file: header row plus data rows (no quoting/escaping; the
// pipeline formats never need it).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
};

// Throws MissingFile / ParseError (with file and line in the message).
CsvTable read_csv(const std::filesystem::path& path);

std::vector<std::string> split_csv_line(const std::string& line);

// Shortest exact decimal representation capped at 17 significant digits,
// so re-parsing yields the identical double and re-serializing is
// byte-stable.
std::string format_double(double value);

double parse_double(const std::string& text, const std::string& context);
long parse_long(const std::string& text, const std::string& context);

}  // namespace adl
