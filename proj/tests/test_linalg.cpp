#include "doctest.h"
#include "gfactor/error.hpp"
#include "gfactor/linalg.hpp"
#include "gfactor/pedigree.hpp"

using namespace gfactor;

TEST_SUITE("linalg") {
    TEST_CASE("symmetric construction mirrors the lower triangle") {
        Matrix m{{1, 9}, {2, 3}};
        const SymmetricMatrix s(m);
        CHECK(s(0, 1) == 2.0);
        CHECK(s(1, 0) == 2.0);
        CHECK(s.matrix() == s.matrix().transpose());
        CHECK_THROWS_AS(SymmetricMatrix(Matrix(2, 3)), ParameterError);
    }

    TEST_CASE("arithmetic keeps exact symmetry") {
        const SymmetricMatrix a(Matrix::Random(4, 4));
        const SymmetricMatrix b(Matrix::Random(4, 4));
        const SymmetricMatrix c = 0.3 * a + b;
        CHECK(c.matrix() == c.matrix().transpose());
        CHECK(SymmetricMatrix::diagonal(Vector::Ones(3)).matrix() == Matrix::Identity(3, 3));
    }

    TEST_CASE("jittered Cholesky reproduces a positive definite matrix") {
        const SymmetricMatrix A = halfsib_relationship(3, 4);
        const Matrix L = jittered_cholesky(A.matrix());
        CHECK((L * L.transpose() - A.matrix()).cwiseAbs().maxCoeff() / A.matrix().cwiseAbs().maxCoeff() <= 1e-8);
    }

    TEST_CASE("jitter rescues a singular positive semi-definite matrix") {
        const Vector v = Vector::LinSpaced(4, 1, 4);
        const Matrix m = v * v.transpose();
        Matrix lower;
        CHECK_FALSE(try_cholesky(m, lower));
        const Matrix L = jittered_cholesky(m);
        CHECK((L * L.transpose() - m).cwiseAbs().maxCoeff() < 1e-6);
    }

    TEST_CASE("indefinite matrices fail after the retries") {
        const Matrix m{{1.0, 2.0}, {2.0, 1.0}};
        CHECK_THROWS_AS(jittered_cholesky(m), NumericalError);
    }

    TEST_CASE("smallest eigenvalue") {
        const SymmetricMatrix m(Matrix{{2.0, 1.0}, {1.0, 2.0}});
        CHECK(min_eigenvalue(m) == doctest::Approx(1.0));
    }
}
