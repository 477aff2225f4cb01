#pragma once

#include <string>
#include <vector>

#include "gfactor/linalg.hpp"

namespace gfactor {

struct ModelDims {
    Index n = 0;       ///< individuals
    Index p = 0;       ///< traits
    Index r = 0;       ///< genetic levels (order of A)
    Index b = 0;       ///< fixed-effect covariates
    Index k_star = 0;  ///< current number of factor columns
};

/// Observed traits with a missing-cell mask, the fixed-effect design X and
/// the genetic incidence Z (stored as one level index per individual).
struct PhenotypeData {
    Matrix Y;                                         ///< n x p; masked cells are ignored
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> missing;  ///< n x p
    Matrix X;                                         ///< n x b
    std::vector<Index> level;                         ///< row of A for each individual
    Index levels = 0;                                 ///< r
    std::vector<std::string> trait_names;
    std::vector<std::string> individual_ids;

    Index n() const { return Y.rows(); }
    Index p() const { return Y.cols(); }
    Index b() const { return X.cols(); }
    Index missing_count() const { return missing.size() == 0 ? 0 : missing.count(); }

    /// Dense n x r 0/1 incidence matrix.
    Matrix incidence() const;
    /// Replace the incidence; every row must contain exactly one 1 and zeros elsewhere.
    void set_incidence(const Matrix& Z);

    /// Checks shapes, level ranges, finiteness of observed Y, X.
    void validate() const;

    /// Fully observed data with X = 1 and Z = I.
    static PhenotypeData with_identity_incidence(Matrix Y);
};

/// Additive relationship matrix with cached Cholesky factor and inverse.
class Kinship {
public:
    Kinship() = default;
    /// Factors `A` with the jitter policy (NumericalError on failure).
    explicit Kinship(SymmetricMatrix A, std::vector<std::string> ids = {});

    Index order() const { return A_.order(); }
    const SymmetricMatrix& A() const { return A_; }
    const Matrix& cholesky() const { return chol_; }
    const Matrix& inverse() const { return inverse_; }
    const std::vector<std::string>& ids() const { return ids_; }

private:
    SymmetricMatrix A_;
    Matrix chol_;
    Matrix inverse_;
    std::vector<std::string> ids_;
};

struct Hyperparameters {
    double nu = 3.0;
    double a1 = 2.0;
    double b1 = 1.0 / 20.0;
    double a2 = 3.0;
    double b2 = 1.0;
    int n_h = 100;
    double a_g = 1.0, b_g = 1.0;  ///< Gamma prior on idiosyncratic genetic precisions
    double a_r = 1.0, b_r = 1.0;  ///< Gamma prior on residual precisions
    double b_prec = 1e-6;         ///< prior precision of fixed effects
    double adapt_alpha0 = -1.0;
    double adapt_alpha1 = -5e-4;
    double adapt_epsilon = 1e-2;
    int k_init = 20;
    int k_max = 150;
    /// Use the loading-precision rate (nu + lambda^2)/2 without the column
    /// precision tau. Off by default; the tau-scaled rate is the conjugate one.
    bool literal_phi_rate = false;

    /// Clamps k_init / k_max to the trait count.
    Hyperparameters for_traits(Index p) const;
    /// Throws ConfigError on invalid values.
    void validate() const;
};

/// One full Gibbs state.
///
/// `Fa` (r x k) and `Delta` (r x p) hold genetic effects in the coordinates of
/// the sampler's kinship basis: natural-scale effects are `KinshipBasis::Q()`
/// times these. Everything else is on the natural scale.
struct ChainState {
    Matrix B;                  ///< b x p
    Matrix Lambda;             ///< p x k
    Matrix F;                  ///< n x k factor scores
    Matrix Fa;                 ///< r x k genetic factor effects (basis coordinates)
    Eigen::VectorXi h2_index;  ///< k, factor heritability = h2_index / h2_grid
    int h2_grid = 100;         ///< n_h
    Matrix Delta;              ///< r x p residual genetic effects (basis coordinates)
    Matrix Phi;                ///< p x k loading precisions
    Vector delta_shrink;       ///< k
    Vector tau;                ///< k, cumulative products of delta_shrink
    Vector psi_a_prec;         ///< p, precisions of Psi_a
    Vector sigma2_prec;        ///< p, residual precisions
    Vector imputed;            ///< current values of masked Y cells (column-major mask order)

    Index k_star() const { return Lambda.cols(); }
    Vector h2() const;
    /// Recomputes tau from delta_shrink.
    void refresh_tau();
};

/// Grid values l / n_h for l = 0 .. n_h - 1.
Vector heritability_grid(int n_h);
/// Log prior: pi(0) = 1/2, pi(l / n_h) = 1 / (2 (n_h - 1)).
Vector heritability_log_prior(int n_h);

/// G = Lambda Diag(h2) Lambda' + Psi_a.
SymmetricMatrix reconstruct_G(const ChainState& s);
/// R = Lambda Diag(1 - h2) Lambda' + Psi_e, with Psi_e = Diag(1 / sigma2_prec).
SymmetricMatrix reconstruct_R(const ChainState& s);
/// P = Lambda Lambda' + Psi_a + Psi_e.
SymmetricMatrix reconstruct_P(const ChainState& s);

/// h2_i = G_ii / P_ii. Throws DegenerateTraitError when P_ii <= 0.
Vector trait_heritabilities(const SymmetricMatrix& G, const SymmetricMatrix& P);

/// Genetic covariance of every other trait with the fitness trait through the
/// factors: entries of Lambda Diag(h2) Lambda' in the fitness column, fitness row removed.
Vector selection_response(const ChainState& s, Index fitness);

/// 1 - Psi_a[f] / G[f, f].
double fitness_variance_fraction(const ChainState& s, Index fitness);

}  // namespace gfactor
