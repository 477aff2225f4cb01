#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gfactor/chain.hpp"
#include "gfactor/distributions.hpp"
#include "gfactor/evaluate.hpp"
#include "gfactor/simulate.hpp"

namespace gfactor {

/// Writes `lambda_####.csv` per draw plus `h2.csv`, `psi.csv`, `sigma2.csv`,
/// `B.csv`, `imputed.csv` (when cells were masked) and `provenance.txt`.
void write_posterior_dir(const std::filesystem::path& dir, const PosteriorSamples& samples,
                         const std::vector<std::string>& trait_names,
                         const std::vector<std::pair<Index, Index>>& missing_cells,
                         const std::string& provenance);

/// Reads the per-draw files back. Throws DataError when nothing is there.
struct PosteriorDirectory {
    std::vector<std::string> trait_names;
    std::vector<PosteriorDraw> draws;
};
PosteriorDirectory read_posterior_dir(const std::filesystem::path& dir);

struct PosteriorSummary {
    std::vector<std::string> trait_names;
    std::size_t draws = 0;
    SymmetricMatrix G, R, P;
    Matrix Lambda;            ///< mean of aligned loadings
    Vector factor_h2;
    std::vector<Interval> factor_h2_hpd;
    std::vector<Index> large_factors;    ///< columns explaining >1% of variance in >= 2 traits
    Vector trait_h2;
    std::vector<Interval> trait_h2_hpd;
    Matrix genetic_correlation;
    std::optional<Index> fitness;
    Vector fitness_genetic_correlation;   ///< traits then factors
    Vector selection_response;            ///< p - 1, posterior mean
    std::vector<Interval> selection_response_hpd;
    double fitness_fraction = 0;
    Interval fitness_fraction_hpd{0, 0};
};

/// Posterior means and 95% HPD intervals from stored draws. When there are
/// fewer than 10 draws the HPD intervals collapse to the sample range.
PosteriorSummary summarize_draws(const PosteriorDirectory& post, std::optional<Index> fitness);

/// Writes G/R/P means, loadings, heritabilities with HPD, genetic
/// correlations, fitness outputs, and long-format plot tables.
void write_summary_dir(const std::filesystem::path& dir, const PosteriorSummary& summary,
                       const PosteriorDirectory& post);

/// Reads the matrices written by write_summary_dir back in.
PosteriorSummary read_summary_dir(const std::filesystem::path& dir);

/// Simulation outputs: Y.csv, X.csv, Z.csv, A.csv and truth/.
void write_simulation_dir(const std::filesystem::path& dir, const GroundTruth& truth,
                          const PhenotypeData* masked = nullptr);

struct TruthDirectory {
    ScenarioSpec spec;
    Matrix Lambda;
    Vector h2;
    SymmetricMatrix G, R, P;
    std::vector<Index> sire;
};
TruthDirectory read_truth_dir(const std::filesystem::path& dir);

}  // namespace gfactor
