#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace netboot::tsv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column position by name, or npos-like -1 when absent.
    int column(std::string_view name) const;
};

// Splits one line on tabs; a trailing '\r' is stripped first.
std::vector<std::string> split_line(std::string_view line);

// Reads a whole TSV file. Blank lines are skipped. Every row must have as many
// fields as the header (DataError otherwise, with the 1-based line number).
Table read(const std::filesystem::path& path);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

// Writes content to path via a sibling temp file and rename, so readers never
// observe a partially written file.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace netboot::tsv
