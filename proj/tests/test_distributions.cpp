#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gfactor/distributions.hpp"
#include "gfactor/error.hpp"
#include "gfactor/pedigree.hpp"

using namespace gfactor;

namespace {

struct Moments {
    double mean = 0, var = 0, m4 = 0;
};

template <typename F>
Moments moments(int n, F draw) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (auto& x : xs) x = draw();
    Moments m;
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    for (double x : xs) {
        const double d = x - m.mean;
        m.var += d * d;
        m.m4 += d * d * d * d;
    }
    m.var /= n - 1;
    m.m4 /= n;
    return m;
}

}  // namespace

TEST_SUITE("distributions") {
    TEST_CASE("gamma(5, 2) mean and variance") {
        RngStream rng(1);
        const int n = 1000000;
        const Moments m = moments(n, [&] { return sample_gamma(5, 2, rng); });
        CHECK(std::abs(m.mean - 2.5) < 3 * std::sqrt(1.25 / n));
        // Var of the sample variance is roughly (mu4 - sigma^4) / n; mu4 = 3 sigma^4 (1 + 2/shape).
        const double var = 1.25, mu4 = 3 * var * var * (1 + 2.0 / 5);
        CHECK(std::abs(m.var - var) < 4 * std::sqrt((mu4 - var * var) / n));
    }

    TEST_CASE("gamma with shape below one") {
        RngStream rng(2);
        const int n = 200000;
        const Moments m = moments(n, [&] { return sample_gamma(0.4, 2.0, rng); });
        CHECK(std::abs(m.mean - 0.2) < 4 * std::sqrt(0.1 / n));
    }

    TEST_CASE("gamma(1, 1) is the standard exponential") {
        RngStream rng(3);
        const int n = 1000000;
        int above = 0;
        for (int i = 0; i < n; ++i) above += sample_gamma(1, 1, rng) > 1.0;
        const double p = std::exp(-1.0);
        CHECK(std::abs(above / double(n) - p) < 3 * std::sqrt(p * (1 - p) / n));
    }

    TEST_CASE("normal scale mixture with gamma(1.5, 1.5) precision is heavy tailed") {
        RngStream rng(4);
        const int n = 1000000;
        const Moments m = moments(n, [&] { return rng.normal() / std::sqrt(sample_gamma(1.5, 1.5, rng)); });
        // Student-t with 3 df has infinite kurtosis; the sample excess kurtosis is far above 0.
        CHECK(m.m4 / (m.var * m.var) - 3.0 > 3.0);
    }

    TEST_CASE("gamma rejects non-positive parameters") {
        RngStream rng(5);
        CHECK_THROWS_AS(sample_gamma(0, 1, rng), ParameterError);
        CHECK_THROWS_AS(sample_gamma(1, -1, rng), ParameterError);
        CHECK_THROWS_AS(sample_gamma(NAN, 1, rng), ParameterError);
    }

    TEST_CASE("categorical edge cases and frequencies") {
        RngStream rng(6);
        const std::vector<double> point{1, 0, 0};
        for (int i = 0; i < 1000; ++i) REQUIRE(sample_categorical(point, rng) == 0);
        const std::vector<double> half{1, 1};
        const int n = 100000;
        int ones = 0;
        for (int i = 0; i < n; ++i) ones += static_cast<int>(sample_categorical(half, rng));
        CHECK(std::abs(ones / double(n) - 0.5) < 3 * std::sqrt(0.25 / n));

        const std::vector<double> zero{0, 0};
        const std::vector<double> negative{1, -1};
        CHECK_THROWS_AS(sample_categorical(zero, rng), ParameterError);
        CHECK_THROWS_AS(sample_categorical(negative, rng), ParameterError);
    }

    TEST_CASE("log-space categorical matches the normalised weights and survives underflow") {
        RngStream rng(7);
        const std::vector<double> lw{-2000.0, -2001.0, -2003.0, -INFINITY};
        double total = 0;
        std::vector<double> p;
        for (double l : lw) p.push_back(std::exp(l + 2000.0));
        total = std::accumulate(p.begin(), p.end(), 0.0);
        const int n = 100000;
        std::vector<int> counts(4);
        for (int i = 0; i < n; ++i) ++counts[sample_categorical_log(lw, rng)];
        for (std::size_t i = 0; i < 4; ++i) {
            const double q = p[i] / total;
            CHECK(std::abs(counts[i] / double(n) - q) <= 3 * std::sqrt(q * (1 - q) / n) + 1e-12);
        }
        CHECK(counts[3] == 0);
    }

    TEST_CASE("Wishart mean with p + 1 dof and scale I/p") {
        RngStream rng(8);
        const Index p = 4;
        const SymmetricMatrix scale = (1.0 / p) * SymmetricMatrix::identity(p);
        const int n = 10000;
        Matrix sum = Matrix::Zero(p, p), sq = Matrix::Zero(p, p);
        for (int i = 0; i < n; ++i) {
            const SymmetricMatrix W = sample_wishart(p + 1, scale, rng);
            Matrix chol;
            REQUIRE(try_cholesky(W.matrix(), chol));
            REQUIRE(W.matrix() == W.matrix().transpose());
            sum += W.matrix();
            sq += W.matrix().cwiseProduct(W.matrix());
        }
        const Matrix mean = sum / n;
        const Matrix se = ((sq / n - mean.cwiseProduct(mean)) / n).cwiseSqrt();
        const Matrix expected = 1.25 * Matrix::Identity(p, p);
        CHECK(((mean - expected).cwiseAbs().array() <= 3 * se.array()).all());
    }

    TEST_CASE("one-dimensional Wishart is chi-square") {
        RngStream rng(9);
        const int n = 100000;
        const Moments m = moments(n, [&] { return sample_wishart(3, SymmetricMatrix::identity(1), rng)(0, 0); });
        CHECK(std::abs(m.mean - 3.0) < 4 * std::sqrt(6.0 / n));
        CHECK(m.var == doctest::Approx(6.0).epsilon(0.03));
        CHECK_THROWS_AS(sample_wishart(2, SymmetricMatrix::identity(3), rng), ParameterError);
    }

    TEST_CASE("matrix normal: scalar case is N(1, 6)") {
        RngStream rng(10);
        const int n = 100000;
        const Matrix mean = Matrix::Constant(1, 1, 1.0);
        const SymmetricMatrix r = 2.0 * SymmetricMatrix::identity(1), c = 3.0 * SymmetricMatrix::identity(1);
        const Moments m = moments(n, [&] { return sample_matrix_normal(mean, r, c, rng)(0, 0); });
        CHECK(std::abs(m.mean - 1.0) < 4 * std::sqrt(6.0 / n));
        CHECK(std::abs(m.var - 6.0) < 4 * std::sqrt(2 * 36.0 / n));
    }

    TEST_CASE("matrix normal: identity covariances give uncorrelated entries") {
        RngStream rng(11);
        const int n = 100000;
        const SymmetricMatrix I2 = SymmetricMatrix::identity(2);
        double cross = 0;
        for (int i = 0; i < n; ++i) {
            const Matrix x = sample_matrix_normal(Matrix::Zero(2, 2), I2, I2, rng);
            cross += x(0, 0) * x(1, 1);
        }
        CHECK(std::abs(cross / n) < 3 / std::sqrt(double(n)));
    }

    TEST_CASE("matrix normal: half-sib rows and diagonal columns give a Kronecker covariance") {
        RngStream rng(12);
        const SymmetricMatrix A = halfsib_relationship(1, 3);
        const SymmetricMatrix D = SymmetricMatrix::diagonal(Vector::LinSpaced(2, 1.0, 2.0));
        const int n = 100000;
        Matrix acc = Matrix::Zero(6, 6), acc2 = Matrix::Zero(6, 6);
        for (int i = 0; i < n; ++i) {
            const Matrix x = sample_matrix_normal(Matrix::Zero(3, 2), A, D, rng);
            const Eigen::Map<const Vector> v(x.data(), 6);
            const Matrix outer = v * v.transpose();
            acc += outer;
            acc2 += outer.cwiseProduct(outer);
        }
        const Matrix cov = acc / n;
        const Matrix se = ((acc2 / n - cov.cwiseProduct(cov)) / n).cwiseSqrt();
        Matrix expected(6, 6);
        for (Index a = 0; a < 2; ++a)
            for (Index b = 0; b < 2; ++b) expected.block(3 * a, 3 * b, 3, 3) = D(a, b) * A.matrix();
        CHECK(((cov - expected).cwiseAbs().array() <= 4 * se.array() + 1e-12).all());
    }

    TEST_CASE("matrix normal transposition swaps the covariances") {
        RngStream rng(13);
        const SymmetricMatrix R = SymmetricMatrix(Matrix{{2.0, 0.5}, {0.5, 1.0}});
        const SymmetricMatrix I3 = SymmetricMatrix::identity(3);
        const int n = 100000;
        double a01 = 0, b01 = 0;
        for (int i = 0; i < n; ++i) {
            const Matrix x = sample_matrix_normal(Matrix::Zero(2, 3), R, I3, rng);
            const Matrix y = sample_matrix_normal(Matrix::Zero(3, 2), I3, R, rng).transpose();
            a01 += x(0, 1) * x(1, 1);
            b01 += y(0, 1) * y(1, 1);
        }
        CHECK(std::abs(a01 / n - 0.5) < 4 * std::sqrt(2.25 / n));
        CHECK(std::abs(b01 / n - 0.5) < 4 * std::sqrt(2.25 / n));
    }

    TEST_CASE("matrix normal rejects covariances that are not positive semi-definite") {
        RngStream rng(14);
        const SymmetricMatrix bad(Matrix{{1.0, 2.0}, {2.0, 1.0}});
        CHECK_THROWS_AS(sample_matrix_normal(Matrix::Zero(2, 1), bad, SymmetricMatrix::identity(1), rng),
                        NumericalError);
    }

    TEST_CASE("HPD on 1..100 holds 95 points and starts at the lowest tie") {
        std::vector<double> xs(100);
        std::iota(xs.begin(), xs.end(), 1.0);
        const Interval iv = hpd_interval(xs, 0.95);
        CHECK(iv.lower == 1.0);
        CHECK(iv.upper == 95.0);
    }

    TEST_CASE("HPD of a point mass") {
        const std::vector<double> xs(20, 3.5);
        const Interval iv = hpd_interval(xs, 0.95);
        CHECK(iv.lower == 3.5);
        CHECK(iv.upper == 3.5);
    }

    TEST_CASE("HPD of standard normal draws matches +-1.96") {
        RngStream rng(15);
        std::vector<double> xs(100000);
        for (auto& x : xs) x = rng.normal();
        const Interval iv = hpd_interval(xs, 0.95);
        CHECK(std::abs(iv.lower + 1.96) < 0.05);
        CHECK(std::abs(iv.upper - 1.96) < 0.05);
    }

    TEST_CASE("HPD picks the short side of a skewed sample") {
        const std::vector<double> xs{0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 10};
        const Interval iv = hpd_interval(xs, 0.9);
        CHECK(iv.lower == 0.0);
        CHECK(iv.upper == 0.8);
    }

    TEST_CASE("HPD argument errors") {
        const std::vector<double> few(9, 1.0);
        CHECK_THROWS_AS(hpd_interval(few, 0.95), InsufficientDataError);
        const std::vector<double> enough(10, 1.0);
        CHECK_THROWS_AS(hpd_interval(enough, 1.0), ParameterError);
    }
}
