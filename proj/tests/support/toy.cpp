#include "toy.hpp"

#include <algorithm>
#include <cmath>

#include "gfactor/distributions.hpp"
#include "gfactor/pedigree.hpp"

namespace gfactor::testing {

Toy make_toy(const ToyShape& shape, std::uint64_t seed) {
    RngStream rng(seed, 99);
    Toy toy;
    const Index families = shape.n_sires * shape.n_offspring;
    Index offset = 0;
    if (shape.include_sires) {
        toy.kinship = a_matrix_from_pedigree(halfsib_pedigree(shape.n_sires, shape.n_offspring));
        offset = shape.n_sires;
    } else {
        toy.kinship = halfsib_A(shape.n_sires, shape.n_offspring);
    }
    const Index n = families * shape.records;
    PhenotypeData& d = toy.data;
    d.Y.resize(n, shape.p);
    for (Index i = 0; i < d.Y.size(); ++i) d.Y.data()[i] = rng.normal();
    d.missing = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, shape.p, false);
    if (shape.missing_fraction > 0.0)
        for (Index i = 0; i < d.missing.size(); ++i) d.missing.data()[i] = rng.uniform() < shape.missing_fraction;
    // Keep at least two observed values per trait.
    for (Index i = 0; i < shape.p; ++i) d.missing(0, i) = d.missing(1, i) = false;
    d.X.resize(n, shape.covariates);
    d.X.col(0).setOnes();
    for (Index c = 1; c < shape.covariates; ++c)
        for (Index m = 0; m < n; ++m) d.X(m, c) = rng.normal();
    d.levels = toy.kinship.order();
    d.level.resize(static_cast<std::size_t>(n));
    for (Index m = 0; m < n; ++m) d.level[static_cast<std::size_t>(m)] = offset + m % families;
    for (Index i = 0; i < shape.p; ++i) d.trait_names.push_back("t" + std::to_string(i + 1));
    for (Index m = 0; m < n; ++m) d.individual_ids.push_back("i" + std::to_string(m + 1));

    toy.hyper = Hyperparameters{}.for_traits(shape.p);
    toy.hyper.n_h = 20;
    return toy;
}

ChainState random_state(const GibbsSampler& sampler, Index k, RngStream& rng) {
    const auto& d = sampler.data();
    ChainState s = sample_prior_state(d.n(), d.p(), d.b(), sampler.basis(), sampler.hyper(), k, rng);
    for (Index i = 0; i < s.B.size(); ++i) s.B.data()[i] = rng.normal();
    // Heritabilities strictly inside the grid so every dense oracle is defined.
    for (Index j = 0; j < k; ++j)
        s.h2_index(j) = std::min(s.h2_grid - 1, 1 + static_cast<int>(rng.uniform() * (s.h2_grid - 1)));
    s.Fa = standard_normal_matrix(s.Fa.rows(), k, rng) * 0.5;
    s.F = standard_normal_matrix(s.F.rows(), k, rng);
    for (Index i = 0; i < d.p(); ++i) {
        s.sigma2_prec(i) = 0.5 + 1.5 * rng.uniform();
        s.psi_a_prec(i) = 0.5 + 1.5 * rng.uniform();
    }
    for (Index i = 0; i < s.Lambda.size(); ++i) s.Lambda.data()[i] = rng.normal();
    for (Index i = 0; i < s.delta_shrink.size(); ++i) s.delta_shrink(i) = 0.5 + rng.uniform();
    s.refresh_tau();
    return s;
}

Matrix natural_delta(const GibbsSampler& s) { return s.basis().Q() * s.state().Delta; }
Matrix natural_fa(const GibbsSampler& s) { return s.basis().Q() * s.state().Fa; }

double relative_error(const Matrix& a, const Matrix& b) {
    const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

SampleStats sample_stats(const std::vector<double>& xs) {
    SampleStats st;
    const auto n = static_cast<double>(xs.size());
    for (double x : xs) st.mean += x;
    st.mean /= n;
    for (double x : xs) st.variance += (x - st.mean) * (x - st.mean);
    st.variance /= n - 1;
    st.se_mean = std::sqrt(st.variance / n);
    return st;
}

double batch_means_se(const std::vector<double>& xs, std::size_t batches) {
    const std::size_t size = xs.size() / batches;
    std::vector<double> means;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0;
        for (std::size_t i = 0; i < size; ++i) s += xs[b * size + i];
        means.push_back(s / static_cast<double>(size));
    }
    return sample_stats(means).se_mean;
}

}  // namespace gfactor::testing
