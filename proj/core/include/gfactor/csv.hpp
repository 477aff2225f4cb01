#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gfactor/linalg.hpp"

namespace gfactor {

/// Shortest decimal that parses back to exactly `v` (at most 17 significant digits).
std::string format_double(double v);
/// Strict parse of a full field; throws DataError naming `where` on failure.
double parse_double(std::string_view field, std::string_view where);

/// A numeric table read from CSV. When the file has an id column its header
/// cell is dropped from `columns` and the ids land in `row_ids`.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::string> row_ids;
    Matrix values;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> missing;  ///< cells holding NA

    bool any_missing() const { return missing.size() > 0 && missing.any(); }
};

struct CsvReadOptions {
    bool id_column = true;
    bool allow_na = false;
};

/// Header row required. Throws DataError with file:line diagnostics.
CsvTable read_csv(const std::filesystem::path& path, CsvReadOptions opts = {});

/// Writes a header row and one row per matrix row. When `row_ids` is
/// non-empty an `id` column comes first. NaN cells are written as NA.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const Matrix& values, const std::vector<std::string>& row_ids = {});

/// Splits one CSV line on commas (no quoting; ids must not contain commas).
std::vector<std::string> split_csv_line(std::string_view line);

/// Creates parent directories and writes `text`; throws DataError when unwritable.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace gfactor
