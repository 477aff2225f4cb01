#include <cmath>

#include "doctest.h"
#include "gfactor/error.hpp"
#include "gfactor/kinship_basis.hpp"
#include "gfactor/model.hpp"
#include "gfactor/pedigree.hpp"
#include "gfactor/sampler.hpp"
#include "toy.hpp"

using namespace gfactor;

namespace {

// p traits, one factor with loadings `lambda`, heritability index/grid.
ChainState hand_state(const Vector& lambda, int h2_index, int grid, double psi_a, double psi_e) {
    const Index p = lambda.size();
    ChainState s;
    s.Lambda = lambda;
    s.h2_index = Eigen::VectorXi::Constant(1, h2_index);
    s.h2_grid = grid;
    s.psi_a_prec = Vector::Constant(p, 1.0 / psi_a);
    s.sigma2_prec = Vector::Constant(p, 1.0 / psi_e);
    s.delta_shrink = Vector::Ones(1);
    s.refresh_tau();
    return s;
}

double rel(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(1e-300, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_SUITE("model") {
    TEST_CASE("three-trait hand evaluation of G, R and P") {
        const ChainState s = hand_state(Vector{{1.0, 2.0, 0.0}}, 5, 10, 0.1, 0.1);
        const SymmetricMatrix G = reconstruct_G(s), R = reconstruct_R(s), P = reconstruct_P(s);
        CHECK(G(0, 1) == doctest::Approx(1.0));
        CHECK(R(0, 1) == doctest::Approx(1.0));
        CHECK(P(0, 1) == doctest::Approx(2.0));
        CHECK(G(1, 1) == doctest::Approx(0.5 * 4 + 0.1));
        CHECK(G(2, 2) == doctest::Approx(0.1));
        CHECK(P(0, 0) == doctest::Approx(1.2));
    }

    TEST_CASE("zero loadings and zero heritability reduce to the idiosyncratic parts") {
        ChainState s = hand_state(Vector::Zero(4), 3, 10, 0.2, 0.3);
        CHECK(reconstruct_G(s).matrix().isApprox(0.2 * Matrix::Identity(4, 4)));
        CHECK(reconstruct_R(s).matrix().isApprox(0.3 * Matrix::Identity(4, 4)));
        CHECK(reconstruct_P(s).matrix().isApprox(0.5 * Matrix::Identity(4, 4)));
        s = hand_state(Vector{{1.0, -1.0, 2.0}}, 0, 10, 0.2, 0.3);
        CHECK(reconstruct_G(s).matrix().isApprox(0.2 * Matrix::Identity(3, 3)));
    }

    TEST_CASE("trait heritabilities") {
        const SymmetricMatrix P(Matrix{{2.0, 0.3}, {0.3, 1.0}});
        const SymmetricMatrix G = 0.5 * P;
        CHECK(trait_heritabilities(G, P).isApprox(Vector::Constant(2, 0.5)));
        const SymmetricMatrix G2 = 0.2 * SymmetricMatrix::identity(3), P2 = 0.4 * SymmetricMatrix::identity(3);
        CHECK(trait_heritabilities(G2, P2).isApprox(Vector::Constant(3, 0.5)));
        const SymmetricMatrix P3(Matrix{{1.0, 0.0}, {0.0, 0.0}});
        try {
            trait_heritabilities(SymmetricMatrix(2), P3);
            FAIL("expected a degenerate-trait error");
        } catch (const DegenerateTraitError& e) {
            CHECK(e.trait() == 1);
        }
    }

    TEST_CASE("selection response is the fitness column of Lambda Diag(h2) Lambda'") {
        ChainState s = hand_state(Vector{{1.0, 2.0, 3.0}}, 10, 10, 0.5, 0.5);  // h2 = 1
        CHECK(selection_response(s, 2).isApprox(Vector{{3.0, 6.0}}));
        s = hand_state(Vector{{1.0, 2.0, 3.0}}, 5, 10, 0.5, 0.5);
        const Vector resp = selection_response(s, 2);
        const SymmetricMatrix G = reconstruct_G(s);
        CHECK(resp(0) == doctest::Approx(G(0, 2)));
        CHECK(resp(1) == doctest::Approx(G(1, 2)));
        s = hand_state(Vector{{1.0, 2.0, 0.0}}, 5, 10, 0.5, 0.5);
        CHECK(selection_response(s, 2).isZero(0));
        CHECK_THROWS_AS(selection_response(s, 3), ParameterError);
    }

    TEST_CASE("fitness variance fraction") {
        ChainState s = hand_state(Vector{{0.4, 1.0}}, 5, 10, 0.5, 0.5);
        CHECK(fitness_variance_fraction(s, 1) == doctest::Approx(0.5));
        s.psi_a_prec.setConstant(1e300);
        CHECK(fitness_variance_fraction(s, 1) == doctest::Approx(1.0));
        s = hand_state(Vector{{0.4, 0.0}}, 5, 10, 0.5, 0.5);
        CHECK(fitness_variance_fraction(s, 1) == doctest::Approx(0.0));
    }

    TEST_CASE("G + R == P and G is positive semi-definite on random states") {
        RngStream rng(3);
        for (int rep = 0; rep < 50; ++rep) {
            testing::ToyShape shape;
            shape.p = 6;
            const testing::Toy toy = testing::make_toy(shape, 100 + rep);
            const KinshipBasis basis(toy.kinship, toy.data.level, toy.data.n());
            const ChainState s = sample_prior_state(toy.data.n(), 6, 2, basis, toy.hyper, 4, rng);
            const SymmetricMatrix G = reconstruct_G(s), R = reconstruct_R(s), P = reconstruct_P(s);
            REQUIRE(rel((G + R).matrix(), P.matrix()) <= 1e-12);
            REQUIRE(min_eigenvalue(G) >= -1e-10 * G.matrix().trace());
            const Vector h2 = trait_heritabilities(G, P);
            REQUIRE(((h2.array() >= -1e-10) && (h2.array() <= 1 + 1e-10)).all());
        }
    }

    TEST_CASE("scaling one loading column scales only its rank-one term") {
        ChainState s = hand_state(Vector{{1.0, -0.5, 2.0}}, 4, 10, 0.3, 0.2);
        s.Lambda.conservativeResize(3, 2);
        s.Lambda.col(1) = Vector{{0.2, 0.7, -1.0}};
        s.h2_index.conservativeResize(2);
        s.h2_index(1) = 7;
        const double c = 3.0;
        const SymmetricMatrix before = reconstruct_G(s);
        s.Lambda.col(0) *= c;
        const SymmetricMatrix after = reconstruct_G(s);
        const Vector l = s.Lambda.col(0) / c;
        const Matrix expected = before.matrix() + (c * c - 1) * 0.4 * l * l.transpose();
        CHECK(rel(after.matrix(), expected) <= 1e-12);
    }

    TEST_CASE("tau is the running product and h2 stays on the grid") {
        ChainState s;
        s.delta_shrink = Vector{{2.0, 3.0, 0.5}};
        s.refresh_tau();
        CHECK(s.tau == Vector{{2.0, 6.0, 3.0}});
        s.h2_index = Eigen::VectorXi{{0, 3, 99}};
        s.h2_grid = 100;
        CHECK(s.h2() == Vector{{0.0, 0.03, 0.99}});
        const Vector grid = heritability_grid(100);
        CHECK(grid(0) == 0.0);
        CHECK(grid(99) == 0.99);
        const Vector lp = heritability_log_prior(100);
        CHECK(std::exp(lp(0)) == doctest::Approx(0.5));
        CHECK(std::exp(lp(1)) == doctest::Approx(0.5 / 99));
        CHECK(lp.array().exp().sum() == doctest::Approx(1.0));
    }

    TEST_CASE("hyperparameter defaults and validation") {
        const Hyperparameters h;
        CHECK(h.nu == 3.0);
        CHECK(h.a1 == 2.0);
        CHECK(h.b1 == 1.0 / 20);
        CHECK(h.a2 == 3.0);
        CHECK(h.b2 == 1.0);
        CHECK(h.n_h == 100);
        CHECK(h.b_prec == 1e-6);
        const Hyperparameters clamped = h.for_traits(5);
        CHECK(clamped.k_init == 5);
        CHECK(clamped.k_max == 5);
        CHECK(h.for_traits(1000).k_init == 20);
        CHECK(h.for_traits(1000).k_max == 150);
        Hyperparameters bad = h;
        bad.a2 = 0.5;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        bad = h;
        bad.n_h = 1;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        bad = h;
        bad.nu = -1;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }

    TEST_CASE("incidence round trip and validation") {
        PhenotypeData d = PhenotypeData::with_identity_incidence(Matrix::Random(4, 2));
        CHECK(d.incidence() == Matrix::Identity(4, 4));
        Matrix Z = Matrix::Zero(4, 2);
        Z(0, 0) = Z(1, 1) = Z(2, 1) = Z(3, 0) = 1;
        d.set_incidence(Z);
        CHECK(d.levels == 2);
        CHECK(d.level == std::vector<Index>{0, 1, 1, 0});
        CHECK(d.incidence() == Z);
        Z(0, 1) = 1;
        CHECK_THROWS_AS(d.set_incidence(Z), DataError);
        d.Y(1, 1) = NAN;
        CHECK_THROWS_AS(d.validate(), DataError);
        d.missing(1, 1) = true;
        CHECK_NOTHROW(d.validate());
    }

    TEST_CASE("kinship caches its factor and inverse") {
        const Kinship k = halfsib_A(2, 3);
        CHECK(rel(k.cholesky() * k.cholesky().transpose(), k.A().matrix()) <= 1e-8);
        CHECK(rel(k.A().matrix() * k.inverse(), Matrix::Identity(6, 6)) <= 1e-10);
        CHECK_THROWS_AS(Kinship(SymmetricMatrix::identity(2), {"a"}), DataError);
    }
}
