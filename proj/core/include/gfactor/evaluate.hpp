#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gfactor/model.hpp"

namespace gfactor {

/// Half-sib method-of-moments G: 4 (MS_between - MS_within) / n_offspring.
/// Throws DataError (unsupported design) unless families are balanced.
SymmetricMatrix moments_G(const Matrix& Y, const std::vector<Index>& sire);

/// Frobenius norm of estimate - truth.
double frobenius_error(const Matrix& estimate, const Matrix& truth);

/// Sum of the eigenvalues of S = Ek' Tk Tk' Ek, with Ek, Tk the top-k
/// eigenvectors of the estimate and the truth. Lies in [0, k].
double krzanowski(const SymmetricMatrix& estimate, const SymmetricMatrix& truth, Index k);

struct FactorMatch {
    Index true_index;
    Index estimated_index;
    double angle_degrees;
};

/// Greedy one-to-one matching of true to estimated loading columns by
/// ascending acute angle; ties go to the lower estimated index. Zero columns
/// are skipped.
std::vector<FactorMatch> match_factors(const Matrix& true_Lambda, const Matrix& est_Lambda);

/// Columns whose squared norm exceeds 0.1% of trace(P).
Index count_large_factors(const Matrix& est_Lambda, double P_trace, double threshold = 1e-3);

/// Number of traits for which column j explains more than `fraction` of the
/// trait's phenotypic variance (lambda_ij^2 / P_ii), per column.
std::vector<Index> traits_explained(const Matrix& Lambda, const SymmetricMatrix& P, double fraction = 0.01);

/// Columns explaining more than 1% of phenotypic variance in at least two traits.
std::vector<Index> large_factor_set(const Matrix& Lambda, const SymmetricMatrix& P);

double h2_rmse(const Vector& estimate, const Vector& truth);

struct EvalReport {
    std::string replicate;
    double frobenius_moments = 0;
    double frobenius_posterior = 0;
    double krzanowski_G = 0;
    Index k_G = 0;
    double krzanowski_G_genetic = 0;  ///< scored over the heritable factors only
    Index k_G_genetic = 0;
    double krzanowski_P = 0;
    Index k_P = 0;
    Index n_large_factors = 0;
    double h2_rmse = 0;
    double median_angle = 0;
    std::vector<FactorMatch> factor_match;
    std::vector<double> matched_h2;   ///< posterior-mean h2 of each matched estimate
};

/// Inputs gathered from a fitted replicate and its truth.
struct EvalInputs {
    SymmetricMatrix G_true, P_true;
    Matrix Lambda_true;
    Vector factor_h2_true;
    SymmetricMatrix G_hat, P_hat;
    Matrix Lambda_hat;
    Vector factor_h2_hat;
    Matrix Y;
    std::vector<Index> sire;
    Index k_G = 0, k_G_genetic = 0, k_P = 0;
    std::string replicate;
};

EvalReport evaluate(const EvalInputs& in);

/// Header and one CSV row per report (factor matches excluded).
std::string eval_csv_header();
std::string eval_csv_row(const EvalReport& r);
EvalReport parse_eval_csv_row(const std::string& line);

}  // namespace gfactor
