#pragma once

#include <string>
#include <vector>

#include "gfactor/model.hpp"
#include "gfactor/rng.hpp"

namespace gfactor {

enum class ResidualType { SparseFactor, Factor, Wishart };

std::string to_string(ResidualType t);

/// A simulated paternal half-sib world.
struct ScenarioSpec {
    std::string id = "custom";
    Index p = 100;
    Index n_sires = 100;
    Index n_offspring = 10;
    std::vector<double> factor_h2;       ///< one entry per factor
    ResidualType residual = ResidualType::SparseFactor;
    Index support_min = 3;               ///< nonzero loadings per sparse factor
    Index support_max = 25;
    double idiosyncratic_variance = 0.2; ///< Psi_a = Psi_e = this * I
    std::uint64_t seed = 1;

    Index n_factors() const { return static_cast<Index>(factor_h2.size()); }
    Index n() const { return n_sires * n_offspring; }
    /// Factors with positive heritability.
    Index n_genetic_factors() const;
    /// Subspace dimensions used when scoring G and P.
    Index krzanowski_k_G() const;
    Index krzanowski_k_P() const;
    void validate() const;
};

/// Scenario a..j. Throws ConfigError for any other id.
ScenarioSpec build_scenario(const std::string& id);

/// Above this many individuals the dense A is not stored in a GroundTruth.
inline constexpr Index kDenseKinshipLimit = 10000;

struct GroundTruth {
    ScenarioSpec spec;
    Matrix Lambda;            ///< p x k
    Vector h2;                ///< k
    Vector psi_a;             ///< p
    Vector psi_e;             ///< p (zero for the Wishart residual type)
    SymmetricMatrix G, R, P;
    Matrix Y;                 ///< n x p, complete
    Matrix X;                 ///< n x 1 intercept
    Matrix U;                 ///< n x p genetic values
    SymmetricMatrix A;        ///< empty when n exceeds kDenseKinshipLimit
    std::vector<Index> sire;  ///< family of each individual
};

/// Draw loadings, genetic and residual effects, and phenotypes (Z = I, B = 0).
GroundTruth simulate(const ScenarioSpec& spec, RngStream& rng);

/// Phenotype data from a truth with a uniformly random fraction of cells masked.
/// Throws ParameterError unless 0 <= fraction < 1.
PhenotypeData mask_entries(const GroundTruth& truth, double fraction, RngStream& rng);

}  // namespace gfactor
