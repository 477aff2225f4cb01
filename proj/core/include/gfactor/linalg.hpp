#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace gfactor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense symmetric matrix. Construction mirrors the lower triangle onto the
/// upper one, so entries(i, j) == entries(j, i) holds bit-for-bit.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(Index order) : m_(Matrix::Zero(order, order)) {}
    /// Throws ParameterError if `m` is not square.
    explicit SymmetricMatrix(Matrix m);

    static SymmetricMatrix identity(Index order);
    static SymmetricMatrix diagonal(const Vector& diag);

    Index order() const noexcept { return m_.rows(); }
    double operator()(Index i, Index j) const { return m_(i, j); }
    const Matrix& matrix() const noexcept { return m_; }

    SymmetricMatrix& operator+=(const SymmetricMatrix& o);
    friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }
    friend SymmetricMatrix operator*(double c, SymmetricMatrix a);

private:
    Matrix m_;
};

/// Lower Cholesky factor with the diagonal-jitter retry policy: on failure add
/// 1e-10 * mean(diag) to the diagonal (cumulatively) up to three times.
/// Throws NumericalError when every attempt fails.
Matrix jittered_cholesky(const Matrix& m, int max_retries = 3);

/// Plain Cholesky (no jitter); returns false when `m` is not positive definite.
bool try_cholesky(const Matrix& m, Matrix& lower);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const SymmetricMatrix& m);

}  // namespace gfactor
