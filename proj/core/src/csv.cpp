#include "gfactor/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gfactor/error.hpp"

namespace gfactor {

std::string format_double(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, std::string_view where) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r' || field.back() == '\n')) field.remove_suffix(1);
    if (field == "Inf") return std::numeric_limits<double>::infinity();
    if (field == "-Inf") return -std::numeric_limits<double>::infinity();
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw DataError(std::string(where) + ": not a number: '" + std::string(field) + "'");
    return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

CsvTable read_csv(const std::filesystem::path& path, CsvReadOptions opts) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    const std::string name = path.string();
    std::string line;
    if (!std::getline(in, line)) throw DataError(name + ": empty file");
    CsvTable t;
    t.columns = split_csv_line(line);
    if (opts.id_column) {
        if (t.columns.empty()) throw DataError(name + ":1: missing header");
        t.columns.erase(t.columns.begin());
    }
    const std::size_t width = t.columns.size();
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<bool>> na_rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        const std::string where = name + ":" + std::to_string(line_no);
        if (opts.id_column) {
            t.row_ids.push_back(fields.front());
            fields.erase(fields.begin());
        }
        if (fields.size() != width)
            throw DataError(where + ": expected " + std::to_string(width) + " values, found " +
                            std::to_string(fields.size()));
        std::vector<double> row(width);
        std::vector<bool> na(width, false);
        for (std::size_t c = 0; c < width; ++c) {
            if (fields[c] == "NA" || fields[c] == "") {
                if (!opts.allow_na) throw DataError(where + ": missing value in column '" + t.columns[c] + "'");
                na[c] = true;
                row[c] = std::numeric_limits<double>::quiet_NaN();
            } else {
                row[c] = parse_double(fields[c], where);
            }
        }
        rows.push_back(std::move(row));
        na_rows.push_back(std::move(na));
    }
    const auto n = static_cast<Index>(rows.size());
    t.values.resize(n, static_cast<Index>(width));
    t.missing.resize(n, static_cast<Index>(width));
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < static_cast<Index>(width); ++c) {
            t.values(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            t.missing(r, c) = na_rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    return t;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns, const Matrix& values,
               const std::vector<std::string>& row_ids) {
    if (static_cast<Index>(columns.size()) != values.cols())
        throw ParameterError("write_csv: column names do not match the matrix width");
    if (!row_ids.empty() && static_cast<Index>(row_ids.size()) != values.rows())
        throw ParameterError("write_csv: row ids do not match the matrix height");
    std::string out;
    out.reserve(static_cast<std::size_t>(values.size()) * 20 + 64);
    if (!row_ids.empty()) out += "id,";
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ',';
        out += columns[c];
    }
    out += '\n';
    for (Index r = 0; r < values.rows(); ++r) {
        if (!row_ids.empty()) {
            out += row_ids[static_cast<std::size_t>(r)];
            out += ',';
        }
        for (Index c = 0; c < values.cols(); ++c) {
            if (c) out += ',';
            out += format_double(values(r, c));
        }
        out += '\n';
    }
    write_text_file(path, out);
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace gfactor
