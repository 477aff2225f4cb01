#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "gfactor/kinship_basis.hpp"
#include "gfactor/model.hpp"
#include "gfactor/rng.hpp"

namespace gfactor {

/// Draw a complete state from the prior (and from the factor model for F
/// given Fa), with k columns. Used for initialisation and by the
/// marginal-conditional side of joint-distribution tests.
ChainState sample_prior_state(Index n, Index p, Index b, const KinshipBasis& basis,
                              const Hyperparameters& hyper, Index k, RngStream& rng);

/// Simulate observations from the likelihood given every latent quantity:
/// Y = X B + F Lambda' + Z Delta + noise with per-trait precisions.
Matrix simulate_observations(const ChainState& s, const Matrix& X, const KinshipBasis& basis,
                             RngStream& rng);

/// Adaptive Gibbs sampler for the genetic sparse factor model.
///
/// Scan order per sweep: impute missing cells, joint (B, Delta, Lambda) per
/// trait, factor scores, factor heritabilities, genetic factor effects,
/// loading precisions, column shrinkage, idiosyncratic genetic precisions,
/// residual precisions. Heritabilities are drawn with Fa integrated out, so
/// they precede the Fa update to keep the (h2, Fa) pair a valid block draw.
class GibbsSampler {
public:
    GibbsSampler(PhenotypeData data, std::shared_ptr<const KinshipBasis> basis,
                 Hyperparameters hyper, RngStream rng);
    GibbsSampler(PhenotypeData data, const Kinship& kinship, Hyperparameters hyper, RngStream rng);

    /// Prior draw for every parameter, with precisions started at 1 / var(y_i)
    /// and masked cells at their trait means.
    void initialize();

    const ChainState& state() const { return state_; }
    void set_state(ChainState s);
    const PhenotypeData& data() const { return data_; }
    const Hyperparameters& hyper() const { return hyper_; }
    const KinshipBasis& basis() const { return *basis_; }
    std::shared_ptr<const KinshipBasis> shared_basis() const { return basis_; }
    RngStream& rng() { return rng_; }
    const RngStream& rng() const { return rng_; }

    /// Y with masked cells holding the current imputations.
    const Matrix& working_Y() const { return Yw_; }
    /// Replace every Y value (masked cells included) and refresh caches.
    void set_observations(const Matrix& Y);

    void step_impute_missing();
    void step_joint_regression();
    void step_factor_scores();
    void step_heritabilities();
    void step_genetic_factor_effects();
    void step_loading_precisions();
    void step_shrinkage();
    void step_idiosyncratic_genetic();
    void step_residual_precisions();

    /// With probability exp(alpha0 + alpha1 * iteration) drop every column
    /// whose loadings are all below epsilon * sd(trait), or append one prior
    /// column when none qualifies. Returns the change in k_star.
    int adapt_truncation(long iteration);
    /// Same decision with the trigger forced (used directly by tests).
    int resize_columns();

    /// One scan of all conditional updates; no adaptation.
    void sweep();

    /// Conditional posterior mean of the stacked (b_i, delta_i, lambda_i),
    /// delta on the natural scale.
    Vector joint_regression_mean(Index trait) const;
    /// Row precision and mean matrix of the factor-score conditional.
    Matrix factor_score_precision() const;
    Matrix factor_score_mean() const;
    /// Conditional mean of Fa column j on the natural scale.
    Vector genetic_factor_mean(Index factor) const;
    /// Normalised log posterior over the heritability grid for one factor.
    Vector heritability_log_weights(Index factor) const;
    /// Sum of squared residuals of trait i under the current state.
    double residual_sum_of_squares(Index trait) const;

    /// Column standard deviations of the observed Y, used by adaptation.
    const Vector& trait_sd() const { return trait_sd_; }

private:
    void refresh_data_caches();
    void refresh_factor_cache();
    void remove_columns(const std::vector<Index>& keep);
    void append_prior_column();
    Matrix regression_design_precision(Index trait, const Matrix& MtM, const Matrix& GtM) const;

    PhenotypeData data_;
    std::shared_ptr<const KinshipBasis> basis_;
    Hyperparameters hyper_;
    RngStream rng_;
    ChainState state_;

    std::vector<std::pair<Index, Index>> missing_cells_;  // (row, trait), column-major
    Matrix Yw_;
    Matrix GtY_, GtX_, XtX_, XtY_;
    Matrix GtF_;
    Vector trait_sd_;
    Matrix grid_inverse_variance_;  // rank x n_h: 1 / (1 - h + h d_m)
    Vector grid_log_det_;           // n_h
};

}  // namespace gfactor
