#pragma once

#include <vector>

#include "gfactor/model.hpp"

namespace gfactor {

/// Simultaneous diagonalisation of the kinship prior and the incidence.
///
/// With A = L L' and L' Z'Z L = W Diag(d) W', the matrix Q = L W satisfies
///   Q' A^-1 Q = I  and  Q' Z'Z Q = Diag(d).
/// Genetic effects u ~ N(0, s A) become independent N(0, s) coordinates under
/// u = Q c, and Z u = G c with G = Z Q having orthogonal columns (G'G = Diag(d)),
/// so Z A Z' = G G'. All per-iteration genetic updates run in these coordinates.
class KinshipBasis {
public:
    KinshipBasis(const Kinship& kinship, const std::vector<Index>& level, Index n);

    Index n() const { return G_.rows(); }
    Index r() const { return Q_.rows(); }
    const Matrix& Q() const { return Q_; }
    const Matrix& Q_inverse() const { return Q_inv_; }
    const Vector& d() const { return d_; }
    const Matrix& G() const { return G_; }
    /// Coordinates with d > 1e-10 * max(d); the column space of Z A Z'.
    const std::vector<Index>& range() const { return range_; }
    Index rank() const { return static_cast<Index>(range_.size()); }

    Matrix to_natural(const Matrix& coords) const { return Q_ * coords; }
    Matrix to_basis(const Matrix& natural) const { return Q_inv_ * natural; }

private:
    Matrix Q_;
    Matrix Q_inv_;
    Vector d_;
    Matrix G_;
    std::vector<Index> range_;
};

}  // namespace gfactor
