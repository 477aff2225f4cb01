#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gfactor/error.hpp"
#include "gfactor/pedigree.hpp"

using namespace gfactor;

namespace {

PedigreeRecord rec(std::string id, std::optional<std::string> sire = {}, std::optional<std::string> dam = {}) {
    return {std::move(id), std::move(sire), std::move(dam)};
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("gfactor_test_" + name);
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_SUITE("pedigree") {
    TEST_CASE("founders are unrelated") {
        const Pedigree ped({rec("a"), rec("b")});
        CHECK(additive_relationship(ped).matrix() == Matrix::Identity(2, 2));
    }

    TEST_CASE("parent-offspring, full-sib and half-sib coefficients") {
        const Pedigree ped({rec("s"), rec("d"), rec("d2"), rec("o1", "s", "d"), rec("o2", "s", "d"),
                            rec("o3", "s", "d2")});
        const SymmetricMatrix A = additive_relationship(ped);
        CHECK(A(0, 3) == 0.5);
        CHECK(A(1, 3) == 0.5);
        CHECK(A(3, 4) == 0.5);
        CHECK(A(3, 5) == 0.25);
        CHECK(A(3, 3) == 1.0);
    }

    TEST_CASE("offspring of a full-sib mating is inbred to 1.25") {
        const Pedigree ped({rec("s"), rec("d"), rec("b", "s", "d"), rec("c", "s", "d"), rec("x", "b", "c")});
        const SymmetricMatrix A = additive_relationship(ped);
        CHECK(A(4, 4) == 1.25);
        CHECK(A(2, 4) == 0.75);
    }

    TEST_CASE("records may list offspring before parents") {
        const Pedigree ped({rec("o", "s", {}), rec("s")});
        const SymmetricMatrix A = additive_relationship(ped);
        CHECK(A(0, 1) == 0.5);
        const auto order = ped.topological_order();
        CHECK(order == std::vector<std::size_t>{1, 0});
    }

    TEST_CASE("cycles and dangling parents are data errors naming an id") {
        const Pedigree cyc({rec("a", "b"), rec("b", "a")});
        CHECK_THROWS_WITH_AS(cyc.topological_order(), doctest::Contains("pedigree cycle"), DataError);
        CHECK_THROWS_AS(additive_relationship(cyc), DataError);
        CHECK_THROWS_WITH_AS(Pedigree({rec("a", "ghost")}), doctest::Contains("ghost"), DataError);
        CHECK_THROWS_AS(Pedigree({rec("a"), rec("a")}), DataError);
        const Pedigree self({rec("a", "a")});
        CHECK_THROWS_AS(self.topological_order(), DataError);
    }

    TEST_CASE("halfsib_A shape and coefficients") {
        const Kinship small = halfsib_A(1, 2);
        CHECK(small.A().matrix() == Matrix{{1.0, 0.25}, {0.25, 1.0}});
        const SymmetricMatrix big = halfsib_relationship(100, 10);
        CHECK(big.order() == 1000);
        Index blocks = 0;
        for (Index i = 0; i < 1000; ++i) {
            if (i % 10 == 0) {
                ++blocks;
                if (i > 0) REQUIRE(big(i, i - 1) == 0.0);
            } else {
                REQUIRE(big(i, i - 1) == 0.25);
            }
        }
        CHECK(blocks == 100);
        CHECK((big.matrix().array() != 0).count() == 100 * 100);
    }

    TEST_CASE("halfsib_A equals the tabular method on the explicit pedigree") {
        for (auto [s, o] : {std::pair<Index, Index>{1, 1}, {3, 4}, {10, 10}}) {
            const SymmetricMatrix tab = additive_relationship(halfsib_pedigree(s, o));
            const Matrix offspring = tab.matrix().bottomRightCorner(s * o, s * o);
            CHECK(offspring == halfsib_relationship(s, o).matrix());
        }
    }

    TEST_CASE("relationship matrices factor without jitter") {
        const Pedigree ped({rec("s"), rec("d"), rec("b", "s", "d"), rec("c", "s", "d"), rec("x", "b", "c"),
                            rec("y", "b", "c")});
        Matrix L;
        CHECK(try_cholesky(additive_relationship(ped).matrix(), L));
        CHECK(try_cholesky(halfsib_relationship(5, 3).matrix(), L));
        const Kinship k = a_matrix_from_pedigree(ped);
        CHECK(k.ids() == std::vector<std::string>{"s", "d", "b", "c", "x", "y"});
    }

    TEST_CASE("pedigree CSV with 0 and empty unknown parents") {
        const auto path = temp_file("ped.csv", "id,sire,dam\ns1,0,\nd1,,0\nk1,s1,d1\nk2,s1,0\n");
        const Pedigree ped = read_pedigree_csv(path);
        REQUIRE(ped.size() == 4);
        CHECK_FALSE(ped.records()[0].sire.has_value());
        CHECK(ped.records()[2].dam.value() == "d1");
        const SymmetricMatrix A = additive_relationship(ped);
        CHECK(A(2, 3) == 0.25);
        std::filesystem::remove(path);
    }

    TEST_CASE("malformed pedigree files") {
        const auto bad_header = temp_file("ped_bad1.csv", "id,father,mother\na,0,0\n");
        CHECK_THROWS_AS(read_pedigree_csv(bad_header), DataError);
        const auto short_row = temp_file("ped_bad2.csv", "id,sire,dam\na\n");
        CHECK_THROWS_WITH_AS(read_pedigree_csv(short_row), doctest::Contains(":2"), DataError);
        CHECK_THROWS_AS(read_pedigree_csv("/nonexistent/ped.csv"), DataError);
        std::filesystem::remove(bad_header);
        std::filesystem::remove(short_row);
    }
}
