#pragma once

#include <vector>

#include "gfactor/sampler.hpp"
#include "toy.hpp"

namespace gfactor::testing {

/// Dense reference computations written directly from the model, with
/// natural-scale effects and explicit A^-1 and Z. Each returns the maximum
/// relative error of the sampler's corresponding quantity.
struct OracleInputs {
    const GibbsSampler& sampler;
    const Kinship& kinship;
};

/// Conditional mean of (b_i, delta_i, lambda_i) with W = [X Z F] and prior
/// precision blockdiag(b_prec I, psi_prec A^-1, Diag(phi_i tau)).
double joint_regression_error(const OracleInputs& in);
/// Factor-score precision and mean with Y~ = Y - XB - Z Delta.
double factor_score_error(const OracleInputs& in);
/// Mixed-model equations C = Z'Z/(1-h) + A^-1/h for each factor.
double genetic_factor_error(const OracleInputs& in);
/// Categorical weights from the N(0, h ZAZ' + (1-h) I) log density.
double heritability_weight_error(const OracleInputs& in);
/// Residual sums of squares computed from dense natural-scale effects.
double residual_sum_error(const OracleInputs& in);

/// Structural checks on one chain state.
struct InvariantReport {
    bool tau_is_product = true;    ///< exact equality with the running product
    bool h2_on_grid = true;
    bool precisions_positive = true;
    double additivity_error = 0;   ///< max relative |G + R - P|
    double min_eigen_ratio = 0;    ///< min eigenvalue of G / trace(G)

    bool ok() const {
        return tau_is_product && h2_on_grid && precisions_positive && additivity_error <= 1e-12 &&
               min_eigen_ratio >= -1e-10;
    }
};
InvariantReport check_invariants(const ChainState& s);

struct GewekeMoment {
    std::string name;
    double marginal = 0;     ///< mean under direct prior simulation
    double successive = 0;   ///< mean along the successive-conditional chain
    double z = 0;            ///< difference in combined standard errors
};

struct GewekeResult {
    std::vector<GewekeMoment> moments;
    double max_abs_z() const;
};

/// Marginal-conditional vs successive-conditional simulation on p = 3,
/// n = 8 (two half-sib families of four), k = 2, without adaptation.
/// Compares first and second moments of lambda_11, delta_1, h2_1, sigma_1^-2.
GewekeResult run_geweke(long rounds, std::uint64_t seed);

}  // namespace gfactor::testing
