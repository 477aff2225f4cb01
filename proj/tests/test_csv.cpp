#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "gfactor/csv.hpp"
#include "gfactor/error.hpp"
#include "gfactor/rng.hpp"

using namespace gfactor;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("gfactor_csv_" + name); }

}  // namespace

TEST_SUITE("csv") {
    TEST_CASE("doubles round-trip exactly through text") {
        RngStream rng(1);
        for (int i = 0; i < 100000; ++i) {
            const double v = std::ldexp(rng.normal(), static_cast<int>(rng.uniform() * 200) - 100);
            const std::string s = format_double(v);
            REQUIRE(parse_double(s, "t") == v);
            // Shortest form: never longer than "-d.dddddddddddddddde-ddd".
            REQUIRE(s.size() <= 24);
        }
        CHECK(format_double(0.1) == "0.1");
        CHECK(format_double(2.0) == "2");
        CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "NA");
        CHECK(parse_double(" 1.5\r\n", "t") == 1.5);
        CHECK(parse_double(format_double(std::numeric_limits<double>::denorm_min()), "t") ==
              std::numeric_limits<double>::denorm_min());
    }

    TEST_CASE("malformed numbers name their location") {
        CHECK_THROWS_WITH_AS(parse_double("1.5x", "Y.csv:3"), doctest::Contains("Y.csv:3"), DataError);
        CHECK_THROWS_AS(parse_double("", "f"), DataError);
    }

    TEST_CASE("table round trip with ids and NA") {
        const auto path = temp_path("table.csv");
        Matrix m{{1.0 / 3, -2.5e-12}, {NAN, 42.0}};
        write_csv(path, {"a", "b"}, m, {"r1", "r2"});
        CsvReadOptions opts;
        opts.allow_na = true;
        const CsvTable t = read_csv(path, opts);
        CHECK(t.columns == std::vector<std::string>{"a", "b"});
        CHECK(t.row_ids == std::vector<std::string>{"r1", "r2"});
        CHECK(t.values(0, 0) == 1.0 / 3);
        CHECK(t.values(0, 1) == -2.5e-12);
        CHECK(t.missing(1, 0));
        CHECK_FALSE(t.missing(1, 1));
        CHECK(t.any_missing());
        CHECK_THROWS_AS(read_csv(path), DataError);
        fs::remove(path);
    }

    TEST_CASE("tables without an id column") {
        const auto path = temp_path("plain.csv");
        write_csv(path, {"x", "y"}, Matrix{{1, 2}, {3, 4}});
        CsvReadOptions opts;
        opts.id_column = false;
        const CsvTable t = read_csv(path, opts);
        CHECK(t.values == Matrix{{1, 2}, {3, 4}});
        CHECK(t.row_ids.empty());
        fs::remove(path);
    }

    TEST_CASE("ragged rows are reported with file and line") {
        const auto path = temp_path("ragged.csv");
        std::ofstream(path) << "id,a,b\nr1,1,2\nr2,3\n";
        CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("ragged.csv:3"), DataError);
        std::ofstream(path, std::ios::trunc) << "";
        CHECK_THROWS_AS(read_csv(path), DataError);
        CHECK_THROWS_AS(read_csv(temp_path("absent.csv")), DataError);
        fs::remove(path);
    }

    TEST_CASE("CRLF files are accepted") {
        const auto path = temp_path("crlf.csv");
        std::ofstream(path, std::ios::binary) << "id,a\r\nr1,0.25\r\n";
        CHECK(read_csv(path).values(0, 0) == 0.25);
        fs::remove(path);
    }

    TEST_CASE("line splitting and text files") {
        CHECK(split_csv_line("a,,b") == std::vector<std::string>{"a", "", "b"});
        CHECK(split_csv_line("a,") == std::vector<std::string>{"a", ""});
        const auto path = temp_path("nested") / "deeper" / "t.txt";
        write_text_file(path, "hello\n");
        CHECK(read_text_file(path) == "hello\n");
        fs::remove_all(temp_path("nested"));
    }
}
