#include "gfactor/linalg.hpp"

#include <Eigen/Eigenvalues>

#include "gfactor/error.hpp"

namespace gfactor {

SymmetricMatrix::SymmetricMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw ParameterError("symmetric matrix must be square");
    m_.triangularView<Eigen::StrictlyUpper>() = m_.transpose();
}

SymmetricMatrix SymmetricMatrix::identity(Index order) {
    return SymmetricMatrix(Matrix::Identity(order, order));
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& diag) {
    return SymmetricMatrix(Matrix(diag.asDiagonal()));
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& o) {
    if (o.order() != order()) throw ParameterError("symmetric matrix order mismatch");
    m_ += o.m_;
    return *this;
}

SymmetricMatrix operator*(double c, SymmetricMatrix a) {
    a.m_ *= c;
    return a;
}

bool try_cholesky(const Matrix& m, Matrix& lower) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) return false;
    lower = llt.matrixL();
    return lower.allFinite();
}

Matrix jittered_cholesky(const Matrix& m, int max_retries) {
    Matrix lower;
    if (try_cholesky(m, lower)) return lower;
    const double mean_diag = m.rows() > 0 ? m.diagonal().mean() : 0.0;
    const double jitter = 1e-10 * (mean_diag > 0 ? mean_diag : 1.0);
    Matrix work = m;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        work.diagonal().array() += jitter;
        if (try_cholesky(work, lower)) return lower;
    }
    throw NumericalError("matrix is not positive semi-definite (Cholesky failed after jitter)");
}

double min_eigenvalue(const SymmetricMatrix& m) {
    if (m.order() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
    return es.eigenvalues().minCoeff();
}

}  // namespace gfactor
