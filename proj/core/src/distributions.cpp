#include "gfactor/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gfactor/error.hpp"

namespace gfactor {

namespace {

// Marsaglia & Tsang (2000), shape >= 1, unit rate.
double gamma_unit_rate(double shape, RngStream& rng) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace

double sample_gamma(double shape, double rate, RngStream& rng) {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
        throw ParameterError("gamma requires positive finite shape and rate");
    if (shape < 1.0) {
        // Ga(a) = Ga(a + 1) * U^(1/a)
        const double g = gamma_unit_rate(shape + 1.0, rng);
        return g * std::pow(rng.uniform(), 1.0 / shape) / rate;
    }
    return gamma_unit_rate(shape, rng) / rate;
}

Matrix standard_normal_matrix(Index rows, Index cols, RngStream& rng) {
    Matrix z(rows, cols);
    double* data = z.data();
    for (Index i = 0; i < z.size(); ++i) data[i] = rng.normal();
    return z;
}

Matrix sample_matrix_normal(const Matrix& mean, const SymmetricMatrix& row_cov,
                            const SymmetricMatrix& col_cov, RngStream& rng) {
    if (row_cov.order() != mean.rows() || col_cov.order() != mean.cols())
        throw ParameterError("matrix-normal covariance dimensions do not match the mean");
    const Matrix row_l = jittered_cholesky(row_cov.matrix());
    const Matrix col_l = jittered_cholesky(col_cov.matrix());
    const Matrix z = standard_normal_matrix(mean.rows(), mean.cols(), rng);
    return mean + row_l * z * col_l.transpose();
}

std::size_t sample_categorical(std::span<const double> weights, RngStream& rng) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ParameterError("categorical weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw ParameterError("categorical weights sum to zero");
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) last_positive = i;
        acc += weights[i];
        if (target < acc && weights[i] > 0.0) return i;
    }
    return last_positive;
}

std::size_t sample_categorical_log(std::span<const double> log_weights, RngStream& rng) {
    if (log_weights.empty()) throw ParameterError("categorical needs at least one weight");
    double max_lw = -std::numeric_limits<double>::infinity();
    for (double lw : log_weights) {
        if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity())
            throw ParameterError("log weights must be finite or -infinity");
        max_lw = std::max(max_lw, lw);
    }
    if (max_lw == -std::numeric_limits<double>::infinity())
        throw ParameterError("categorical log weights carry no mass");
    std::vector<double> w(log_weights.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - max_lw);
    return sample_categorical(w, rng);
}

SymmetricMatrix sample_wishart(double dof, const SymmetricMatrix& scale, RngStream& rng) {
    const Index p = scale.order();
    if (p == 0) throw ParameterError("Wishart scale must be non-empty");
    if (!(dof >= static_cast<double>(p)))
        throw ParameterError("Wishart degrees of freedom must be at least the matrix order");
    Matrix chol;
    if (!try_cholesky(scale.matrix(), chol))
        throw ParameterError("Wishart scale must be positive definite");
    // Bartlett decomposition.
    Matrix bart = Matrix::Zero(p, p);
    for (Index i = 0; i < p; ++i) {
        bart(i, i) = std::sqrt(2.0 * sample_gamma(0.5 * (dof - static_cast<double>(i)), 1.0, rng));
        for (Index j = 0; j < i; ++j) bart(i, j) = rng.normal();
    }
    const Matrix la = chol * bart;
    return SymmetricMatrix(Matrix(la * la.transpose()));
}

Interval hpd_interval(std::span<const double> samples, double mass) {
    if (!(mass > 0.0 && mass < 1.0)) throw ParameterError("HPD mass must lie in (0, 1)");
    const std::size_t n = samples.size();
    if (n < 10) throw InsufficientDataError("HPD interval needs at least 10 samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    // Guard against mass * n landing a hair above an integer.
    const auto count =
        static_cast<std::size_t>(std::ceil(mass * static_cast<double>(n) * (1.0 - 1e-12)));
    if (count < 1 || count > n) throw InsufficientDataError("too few samples for the requested mass");
    std::size_t best = 0;
    double best_width = sorted[count - 1] - sorted[0];
    for (std::size_t i = 1; i + count <= n; ++i) {
        const double width = sorted[i + count - 1] - sorted[i];
        if (width < best_width) {
            best_width = width;
            best = i;
        }
    }
    return {sorted[best], sorted[best + count - 1]};
}

}  // namespace gfactor
