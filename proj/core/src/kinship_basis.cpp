#include "gfactor/kinship_basis.hpp"

#include <Eigen/Eigenvalues>

#include "gfactor/error.hpp"

namespace gfactor {

KinshipBasis::KinshipBasis(const Kinship& kinship, const std::vector<Index>& level, Index n) {
    const Index r = kinship.order();
    if (static_cast<Index>(level.size()) != n) throw DataError("incidence length does not match individuals");

    Vector counts = Vector::Zero(r);
    for (Index l : level) {
        if (l < 0 || l >= r) throw DataError("genetic level outside the kinship matrix");
        counts(l) += 1.0;
    }

    const Matrix& L = kinship.cholesky();
    const Matrix middle = L.transpose() * counts.asDiagonal() * L;
    Eigen::SelfAdjointEigenSolver<Matrix> es(middle);
    if (es.info() != Eigen::Success) throw NumericalError("kinship basis eigen-decomposition failed");

    d_ = es.eigenvalues().cwiseMax(0.0);
    const Matrix& W = es.eigenvectors();
    Q_ = L.triangularView<Eigen::Lower>() * W;
    // Q^-1 = W' L^-1
    Q_inv_ = L.triangularView<Eigen::Lower>().solve(Matrix::Identity(r, r));
    Q_inv_ = W.transpose() * Q_inv_;

    G_.resize(n, r);
    for (Index m = 0; m < n; ++m) G_.row(m) = Q_.row(level[static_cast<std::size_t>(m)]);

    const double tol = 1e-10 * (d_.size() > 0 ? d_.maxCoeff() : 0.0);
    for (Index m = 0; m < r; ++m)
        if (d_(m) > tol) range_.push_back(m);
}

}  // namespace gfactor
