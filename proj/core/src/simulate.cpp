#include "gfactor/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gfactor/distributions.hpp"
#include "gfactor/error.hpp"
#include "gfactor/pedigree.hpp"

namespace gfactor {

std::string to_string(ResidualType t) {
    switch (t) {
        case ResidualType::SparseFactor: return "sparse-factor";
        case ResidualType::Factor: return "factor";
        case ResidualType::Wishart: return "wishart";
    }
    return "unknown";
}

Index ScenarioSpec::n_genetic_factors() const {
    return static_cast<Index>(std::count_if(factor_h2.begin(), factor_h2.end(), [](double h) { return h > 0.0; }));
}

Index ScenarioSpec::krzanowski_k_G() const { return n_factors(); }

Index ScenarioSpec::krzanowski_k_P() const { return residual == ResidualType::Wishart ? 19 : n_factors(); }

void ScenarioSpec::validate() const {
    if (p < 1) throw ConfigError("scenario needs at least one trait");
    if (n_sires < 1 || n_offspring < 1) throw ConfigError("scenario needs at least one sire and one offspring");
    for (double h : factor_h2)
        if (!(h >= 0.0 && h <= 1.0)) throw ConfigError("factor heritabilities must lie in [0, 1]");
    if (support_min < 1 || support_max < support_min || support_max > p)
        throw ConfigError("loading support range must satisfy 1 <= min <= max <= p");
    if (!(idiosyncratic_variance >= 0.0)) throw ConfigError("idiosyncratic variance must be non-negative");
}

ScenarioSpec build_scenario(const std::string& id) {
    ScenarioSpec s;
    s.id = id;
    auto split = [](Index genetic, double h2, Index residual) {
        std::vector<double> v(static_cast<std::size_t>(genetic), h2);
        v.insert(v.end(), static_cast<std::size_t>(residual), 0.0);
        return v;
    };
    const std::vector<double> graded = {0.9, 0.7, 0.5, 0.3, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0};
    if (id == "a") {
        s.factor_h2 = split(5, 0.5, 5);
    } else if (id == "b") {
        s.factor_h2 = split(15, 0.5, 10);
    } else if (id == "c") {
        s.factor_h2 = split(30, 0.5, 20);
    } else if (id == "d") {
        s.factor_h2 = split(5, 0.5, 5);
        s.residual = ResidualType::Factor;
    } else if (id == "e") {
        s.factor_h2 = split(5, 1.0, 0);
        s.residual = ResidualType::Wishart;
    } else if (id == "f") {
        s.p = 20;
        s.support_max = 5;
        s.factor_h2 = split(5, 0.5, 5);
    } else if (id == "g") {
        s.p = 1000;
        s.support_min = 30;
        s.support_max = 250;
        s.factor_h2 = split(5, 0.5, 5);
    } else if (id == "h") {
        s.n_sires = 50;
        s.n_offspring = 5;
        s.factor_h2 = graded;
    } else if (id == "i") {
        s.factor_h2 = graded;
    } else if (id == "j") {
        s.n_sires = 500;
        s.factor_h2 = graded;
    } else {
        throw ConfigError("unknown scenario '" + id + "' (expected a..j)");
    }
    return s;
}

namespace {

Index uniform_index(Index count, RngStream& rng) {
    const auto v = static_cast<Index>(rng.uniform() * static_cast<double>(count));
    return std::min(v, count - 1);
}

// Half-sib genetic values with relationship 1 on the diagonal and 1/4 within
// a family: half the sire's breeding value plus an independent Mendelian part.
Vector halfsib_effects(Index n_sires, Index n_offspring, double variance, RngStream& rng) {
    Vector sire(n_sires);
    for (Index s = 0; s < n_sires; ++s) sire(s) = rng.normal();
    Vector u(n_sires * n_offspring);
    const double sd = std::sqrt(variance), mendelian = std::sqrt(0.75);
    for (Index s = 0; s < n_sires; ++s)
        for (Index o = 0; o < n_offspring; ++o) u(s * n_offspring + o) = sd * (0.5 * sire(s) + mendelian * rng.normal());
    return u;
}

}  // namespace

GroundTruth simulate(const ScenarioSpec& spec, RngStream& rng) {
    spec.validate();
    const Index p = spec.p, k = spec.n_factors(), n = spec.n();
    GroundTruth t;
    t.spec = spec;
    t.h2 = Eigen::Map<const Vector>(spec.factor_h2.data(), k);

    t.Lambda = Matrix::Zero(p, k);
    std::vector<Index> traits(static_cast<std::size_t>(p));
    for (Index j = 0; j < k; ++j) {
        if (spec.residual == ResidualType::Factor && t.h2(j) == 0.0) {
            for (Index i = 0; i < p; ++i) t.Lambda(i, j) = rng.normal();
            continue;
        }
        const Index size = spec.support_min + uniform_index(spec.support_max - spec.support_min + 1, rng);
        std::iota(traits.begin(), traits.end(), Index{0});
        for (Index c = 0; c < size; ++c) {
            const Index pick = c + uniform_index(p - c, rng);
            std::swap(traits[static_cast<std::size_t>(c)], traits[static_cast<std::size_t>(pick)]);
        }
        for (Index c = 0; c < size; ++c) t.Lambda(traits[static_cast<std::size_t>(c)], j) = rng.normal();
    }

    const bool wishart = spec.residual == ResidualType::Wishart;
    t.psi_a = Vector::Constant(p, spec.idiosyncratic_variance);
    t.psi_e = wishart ? Vector::Zero(p) : Vector::Constant(p, spec.idiosyncratic_variance);

    Matrix g = t.Lambda * t.h2.asDiagonal() * t.Lambda.transpose();
    g.diagonal() += t.psi_a;
    t.G = SymmetricMatrix(std::move(g));
    if (wishart) {
        const double dof = static_cast<double>(p + 1);
        t.R = sample_wishart(dof, SymmetricMatrix(Matrix::Identity(p, p) / static_cast<double>(p)), rng);
    } else {
        const Vector e = Vector::Ones(k) - t.h2;
        Matrix r = t.Lambda * e.asDiagonal() * t.Lambda.transpose();
        r.diagonal() += t.psi_e;
        t.R = SymmetricMatrix(std::move(r));
    }
    t.P = t.G + t.R;

    t.sire.resize(static_cast<std::size_t>(n));
    for (Index m = 0; m < n; ++m) t.sire[static_cast<std::size_t>(m)] = m / spec.n_offspring;
    if (n <= kDenseKinshipLimit) t.A = halfsib_relationship(spec.n_sires, spec.n_offspring);

    Matrix Fa(n, k), Fe(n, k);
    for (Index j = 0; j < k; ++j) Fa.col(j) = halfsib_effects(spec.n_sires, spec.n_offspring, t.h2(j), rng);
    for (Index j = 0; j < k; ++j) {
        const double sd = std::sqrt(1.0 - t.h2(j));
        for (Index m = 0; m < n; ++m) Fe(m, j) = sd * rng.normal();
    }
    Matrix Delta(n, p);
    for (Index i = 0; i < p; ++i) Delta.col(i) = halfsib_effects(spec.n_sires, spec.n_offspring, t.psi_a(i), rng);
    t.U = Fa * t.Lambda.transpose() + Delta;

    Matrix E(n, p);
    if (wishart) {
        const Matrix L = jittered_cholesky(t.R.matrix());
        E = standard_normal_matrix(n, p, rng) * L.transpose();
    } else {
        E = Fe * t.Lambda.transpose();
        for (Index i = 0; i < p; ++i) {
            const double sd = std::sqrt(t.psi_e(i));
            for (Index m = 0; m < n; ++m) E(m, i) += sd * rng.normal();
        }
    }
    t.Y = t.U + E;
    t.X = Matrix::Ones(n, 1);
    return t;
}

PhenotypeData mask_entries(const GroundTruth& truth, double fraction, RngStream& rng) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw ParameterError("mask fraction must lie in [0, 1)");
    PhenotypeData d = PhenotypeData::with_identity_incidence(truth.Y);
    for (Index i = 0; i < d.p(); ++i)
        for (Index m = 0; m < d.n(); ++m)
            if (fraction > 0.0 && rng.uniform() < fraction) d.missing(m, i) = true;
    const Index n_off = truth.spec.n_offspring;
    d.individual_ids.resize(static_cast<std::size_t>(d.n()));
    for (Index i = 0; i < d.p(); ++i) d.trait_names.push_back("t" + std::to_string(i + 1));
    for (Index m = 0; m < d.n(); ++m)
        d.individual_ids[static_cast<std::size_t>(m)] =
            "s" + std::to_string(m / n_off + 1) + "_o" + std::to_string(m % n_off + 1);
    return d;
}

}  // namespace gfactor
