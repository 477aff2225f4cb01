#pragma once

#include <span>
#include <utility>

#include "gfactor/linalg.hpp"
#include "gfactor/rng.hpp"

namespace gfactor {

/// Gamma(shape, rate) draw, mean shape / rate (Marsaglia-Tsang).
double sample_gamma(double shape, double rate, RngStream& rng);

/// Normal draw with the given mean and standard deviation.
inline double sample_normal(double mean, double sd, RngStream& rng) { return mean + sd * rng.normal(); }

/// Matrix of iid standard normals.
Matrix standard_normal_matrix(Index rows, Index cols, RngStream& rng);

/// vec(X) ~ N(vec(mean), col_cov (x) row_cov). Covariances may be
/// semi-definite; they are factored with the jitter policy.
Matrix sample_matrix_normal(const Matrix& mean, const SymmetricMatrix& row_cov,
                            const SymmetricMatrix& col_cov, RngStream& rng);

/// Index drawn with probability weights[i] / sum(weights).
std::size_t sample_categorical(std::span<const double> weights, RngStream& rng);

/// Same, from unnormalised log weights (max-subtracted before exponentiation).
/// Entries equal to -infinity carry zero mass.
std::size_t sample_categorical_log(std::span<const double> log_weights, RngStream& rng);

/// Wishart draw with `dof` degrees of freedom and scale matrix (mean dof * scale).
SymmetricMatrix sample_wishart(double dof, const SymmetricMatrix& scale, RngStream& rng);

struct Interval {
    double lower;
    double upper;
};

/// Shortest window of the sorted samples holding ceil(mass * n) of them.
/// Ties go to the window with the smaller lower endpoint.
Interval hpd_interval(std::span<const double> samples, double mass);

}  // namespace gfactor
