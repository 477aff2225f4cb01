#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gfactor/sampler.hpp"

namespace gfactor {

struct ChainConfig {
    long total_iters = 12000;
    long burn_in = 10000;
    long thin = 2;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    long checkpoint_interval = 0;             ///< 0 disables checkpoints
    std::filesystem::path checkpoint_path;    ///< written every checkpoint_interval iterations

    /// Throws ConfigError unless burn_in < total_iters, thin >= 1 and at least one draw is kept.
    void validate() const;
    long draw_count() const { return (total_iters - burn_in) / thin; }
};

/// One stored post-burn-in draw. Lambda columns are sign-aligned so each
/// column's largest-magnitude loading is positive.
struct PosteriorDraw {
    long iteration = 0;
    Matrix Lambda;   ///< p x k
    Vector h2;       ///< k
    Vector psi_a;    ///< p, idiosyncratic genetic variances
    Vector sigma2;   ///< p, residual variances
    Matrix B;        ///< b x p
};

struct PosteriorSamples {
    std::vector<PosteriorDraw> draws;
    Matrix G_sum, R_sum, P_sum;  ///< running sums of reconstructed matrices
    Vector imputed_sum;
    std::uint64_t provenance_digest = 0;

    std::size_t size() const { return draws.size(); }
    SymmetricMatrix mean_G() const;
    SymmetricMatrix mean_R() const;
    SymmetricMatrix mean_P() const;
    Vector mean_imputed() const;
    /// Mean of the (aligned) loading matrices; draws share k after burn-in.
    Matrix mean_Lambda() const;
    Vector mean_factor_h2() const;

    /// Bitwise digest of every stored number.
    std::uint64_t content_digest() const;

    void record(const ChainState& s, long iteration);
};

/// Flip each column so its largest-magnitude entry is positive.
Matrix sign_align_columns(Matrix Lambda);

struct Checkpoint;

/// Drives one chain: sweeps, burn-in adaptation, thinning and checkpoints.
class ChainRunner {
public:
    ChainRunner(PhenotypeData data, std::shared_ptr<const KinshipBasis> basis,
                Hyperparameters hyper, ChainConfig config);
    /// Continue from a checkpoint written by a runner with the same inputs.
    ChainRunner(PhenotypeData data, std::shared_ptr<const KinshipBasis> basis,
                Hyperparameters hyper, ChainConfig config, const Checkpoint& from);

    /// Run iterations until `iteration` (exclusive) or the end of the chain.
    void run_until(long iteration);
    void run() { run_until(config_.total_iters); }

    long iteration() const { return next_iteration_; }
    bool finished() const { return next_iteration_ >= config_.total_iters; }
    const GibbsSampler& sampler() const { return sampler_; }
    const PosteriorSamples& samples() const { return samples_; }
    PosteriorSamples take_samples() { return std::move(samples_); }
    /// Stamped into the samples (and so into every checkpoint).
    void set_provenance_digest(std::uint64_t digest) { samples_.provenance_digest = digest; }

    Checkpoint checkpoint() const;

    /// Called after every iteration with (iteration, sampler).
    std::function<void(long, const GibbsSampler&)> on_iteration;

private:
    void iterate();

    ChainConfig config_;
    GibbsSampler sampler_;
    PosteriorSamples samples_;
    long next_iteration_ = 0;
};

/// Digest of data, kinship basis dimensions, hyperparameters and config.
std::uint64_t provenance_digest(const PhenotypeData& data, const Kinship& kinship,
                                const Hyperparameters& hyper, const ChainConfig& config);

/// Full pipeline for one chain.
PosteriorSamples run_chain(const PhenotypeData& data, const Kinship& kinship,
                           const Hyperparameters& hyper, const ChainConfig& config);

}  // namespace gfactor
