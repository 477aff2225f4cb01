#include "gfactor/chain.hpp"

#include <string>

#include "gfactor/checkpoint.hpp"
#include "gfactor/digest.hpp"
#include "gfactor/error.hpp"

namespace gfactor {

void ChainConfig::validate() const {
    if (total_iters <= 0) throw ConfigError("iterations must be positive");
    if (burn_in < 0 || burn_in >= total_iters) throw ConfigError("burn-in must be in [0, iterations)");
    if (thin < 1) throw ConfigError("thin must be at least 1");
    if (draw_count() < 1) throw ConfigError("no posterior draws would be kept");
    if (checkpoint_interval < 0) throw ConfigError("checkpoint interval must be non-negative");
    if (checkpoint_interval > 0 && checkpoint_path.empty())
        throw ConfigError("checkpoint interval set without a checkpoint path");
}

namespace {

SymmetricMatrix mean_of(const Matrix& sum, std::size_t count) {
    if (count == 0) throw InsufficientDataError("no posterior draws recorded");
    return SymmetricMatrix(sum / static_cast<double>(count));
}

bool all_finite(const ChainState& s) {
    return s.B.allFinite() && s.Lambda.allFinite() && s.F.allFinite() && s.Fa.allFinite() &&
           s.Delta.allFinite() && s.Phi.allFinite() && s.tau.allFinite() && s.psi_a_prec.allFinite() &&
           s.sigma2_prec.allFinite() && s.imputed.allFinite() && (s.tau.array() > 0).all() &&
           (s.psi_a_prec.array() > 0).all() && (s.sigma2_prec.array() > 0).all();
}

}  // namespace

SymmetricMatrix PosteriorSamples::mean_G() const { return mean_of(G_sum, size()); }
SymmetricMatrix PosteriorSamples::mean_R() const { return mean_of(R_sum, size()); }
SymmetricMatrix PosteriorSamples::mean_P() const { return mean_of(P_sum, size()); }

Vector PosteriorSamples::mean_imputed() const {
    if (draws.empty()) throw InsufficientDataError("no posterior draws recorded");
    return imputed_sum / static_cast<double>(size());
}

Matrix PosteriorSamples::mean_Lambda() const {
    if (draws.empty()) throw InsufficientDataError("no posterior draws recorded");
    Matrix acc = Matrix::Zero(draws.front().Lambda.rows(), draws.front().Lambda.cols());
    for (const auto& d : draws) {
        if (d.Lambda.cols() != acc.cols()) throw DataError("stored draws have differing factor counts");
        acc += d.Lambda;
    }
    return acc / static_cast<double>(size());
}

Vector PosteriorSamples::mean_factor_h2() const {
    if (draws.empty()) throw InsufficientDataError("no posterior draws recorded");
    Vector acc = Vector::Zero(draws.front().h2.size());
    for (const auto& d : draws) {
        if (d.h2.size() != acc.size()) throw DataError("stored draws have differing factor counts");
        acc += d.h2;
    }
    return acc / static_cast<double>(size());
}

std::uint64_t PosteriorSamples::content_digest() const {
    Fnv1a h;
    h.update(static_cast<std::int64_t>(draws.size()));
    for (const auto& d : draws) {
        h.update(static_cast<std::int64_t>(d.iteration));
        h.update(d.Lambda);
        h.update(d.h2);
        h.update(d.psi_a);
        h.update(d.sigma2);
        h.update(d.B);
    }
    h.update(G_sum);
    h.update(R_sum);
    h.update(P_sum);
    h.update(imputed_sum);
    return h.value();
}

void PosteriorSamples::record(const ChainState& s, long iteration) {
    PosteriorDraw d;
    d.iteration = iteration;
    d.Lambda = sign_align_columns(s.Lambda);
    d.h2 = s.h2();
    d.psi_a = s.psi_a_prec.cwiseInverse();
    d.sigma2 = s.sigma2_prec.cwiseInverse();
    d.B = s.B;
    const Index p = s.Lambda.rows();
    if (draws.empty()) {
        G_sum = Matrix::Zero(p, p);
        R_sum = Matrix::Zero(p, p);
        P_sum = Matrix::Zero(p, p);
        imputed_sum = Vector::Zero(s.imputed.size());
    }
    G_sum += reconstruct_G(s).matrix();
    R_sum += reconstruct_R(s).matrix();
    P_sum += reconstruct_P(s).matrix();
    imputed_sum += s.imputed;
    draws.push_back(std::move(d));
}

Matrix sign_align_columns(Matrix Lambda) {
    for (Index j = 0; j < Lambda.cols(); ++j) {
        if (Lambda.rows() == 0) break;
        Index arg = 0;
        Lambda.col(j).cwiseAbs().maxCoeff(&arg);
        if (Lambda(arg, j) < 0) Lambda.col(j) = -Lambda.col(j);
    }
    return Lambda;
}

namespace {

GibbsSampler make_sampler(PhenotypeData data, std::shared_ptr<const KinshipBasis> basis, const Hyperparameters& hyper,
                          RngStream rng) {
    const Index p = data.p();
    return GibbsSampler(std::move(data), std::move(basis), hyper.for_traits(p), std::move(rng));
}

const ChainConfig& validated(const ChainConfig& config) {
    config.validate();
    return config;
}

}  // namespace

ChainRunner::ChainRunner(PhenotypeData data, std::shared_ptr<const KinshipBasis> basis, Hyperparameters hyper,
                         ChainConfig config)
    : config_(validated(config)),
      sampler_(make_sampler(std::move(data), std::move(basis), hyper, RngStream(config_.seed, config_.stream))) {
    sampler_.initialize();
}

ChainRunner::ChainRunner(PhenotypeData data, std::shared_ptr<const KinshipBasis> basis, Hyperparameters hyper,
                         ChainConfig config, const Checkpoint& from)
    : config_(validated(config)),
      sampler_(make_sampler(std::move(data), std::move(basis), hyper, RngStream(from.rng_seed, from.rng_stream))) {
    if (from.rng_seed != config_.seed || from.rng_stream != config_.stream)
        throw DataError("checkpoint was written with a different seed or stream");
    if (from.next_iteration < 0 || from.next_iteration > config_.total_iters)
        throw DataError("checkpoint iteration is outside this chain");
    sampler_.rng().restore(from.rng_state);
    sampler_.set_state(from.state);
    if (from.working_Y.rows() != sampler_.working_Y().rows() || from.working_Y.cols() != sampler_.working_Y().cols() ||
        !(from.working_Y.array() == sampler_.working_Y().array()).all())
        throw DataError("checkpoint does not match the phenotype data");
    samples_ = from.samples;
    next_iteration_ = from.next_iteration;
}

Checkpoint ChainRunner::checkpoint() const {
    Checkpoint cp;
    cp.next_iteration = next_iteration_;
    cp.state = sampler_.state();
    cp.rng_state = sampler_.rng().serialize();
    cp.rng_seed = sampler_.rng().seed();
    cp.rng_stream = sampler_.rng().stream_id();
    cp.working_Y = sampler_.working_Y();
    cp.samples = samples_;
    return cp;
}

void ChainRunner::iterate() {
    const long t = next_iteration_;
    sampler_.sweep();
    if (t < config_.burn_in) sampler_.adapt_truncation(t);
    if (!all_finite(sampler_.state()))
        throw NumericalError("non-finite chain state at iteration " + std::to_string(t));
    if (t >= config_.burn_in && (t - config_.burn_in + 1) % config_.thin == 0) samples_.record(sampler_.state(), t);
    ++next_iteration_;
    if (on_iteration) on_iteration(t, sampler_);
    if (config_.checkpoint_interval > 0 && next_iteration_ % config_.checkpoint_interval == 0)
        save_checkpoint(checkpoint(), config_.checkpoint_path);
}

void ChainRunner::run_until(long iteration) {
    const long stop = std::min(iteration, config_.total_iters);
    while (next_iteration_ < stop) iterate();
}

std::uint64_t provenance_digest(const PhenotypeData& data, const Kinship& kinship, const Hyperparameters& hyper,
                                const ChainConfig& config) {
    Fnv1a h;
    Matrix Y = data.Y;
    for (Index i = 0; i < Y.cols(); ++i)
        for (Index m = 0; m < Y.rows(); ++m)
            if (data.missing(m, i)) Y(m, i) = 0.0;
    h.update(Y);
    for (Index i = 0; i < data.missing.size(); ++i) h.update(static_cast<std::int64_t>(data.missing.data()[i]));
    h.update(data.X);
    for (Index l : data.level) h.update(static_cast<std::int64_t>(l));
    h.update(kinship.A().matrix());
    for (double v : {hyper.nu, hyper.a1, hyper.b1, hyper.a2, hyper.b2, hyper.a_g, hyper.b_g, hyper.a_r, hyper.b_r,
                     hyper.b_prec, hyper.adapt_alpha0, hyper.adapt_alpha1, hyper.adapt_epsilon})
        h.update(v);
    for (std::int64_t v : {std::int64_t{hyper.n_h}, std::int64_t{hyper.k_init}, std::int64_t{hyper.k_max},
                           std::int64_t{hyper.literal_phi_rate}})
        h.update(v);
    for (std::int64_t v : {std::int64_t{config.total_iters}, std::int64_t{config.burn_in}, std::int64_t{config.thin},
                           static_cast<std::int64_t>(config.seed), static_cast<std::int64_t>(config.stream)})
        h.update(v);
    return h.value();
}

PosteriorSamples run_chain(const PhenotypeData& data, const Kinship& kinship, const Hyperparameters& hyper,
                           const ChainConfig& config) {
    auto basis = std::make_shared<const KinshipBasis>(kinship, data.level, data.n());
    ChainRunner runner(data, basis, hyper, config);
    runner.run();
    PosteriorSamples out = runner.take_samples();
    out.provenance_digest = provenance_digest(data, kinship, hyper, config);
    return out;
}

}  // namespace gfactor
