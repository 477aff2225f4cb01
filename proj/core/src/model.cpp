#include "gfactor/model.hpp"

#include <cmath>
#include <string>

#include "gfactor/error.hpp"

namespace gfactor {

Matrix PhenotypeData::incidence() const {
    Matrix Z = Matrix::Zero(n(), levels);
    for (Index m = 0; m < n(); ++m) Z(m, level[static_cast<std::size_t>(m)]) = 1.0;
    return Z;
}

void PhenotypeData::set_incidence(const Matrix& Z) {
    if (Z.rows() != n()) throw DataError("incidence matrix has " + std::to_string(Z.rows()) +
                                         " rows, expected " + std::to_string(n()));
    levels = Z.cols();
    level.assign(static_cast<std::size_t>(Z.rows()), 0);
    for (Index m = 0; m < Z.rows(); ++m) {
        Index ones = 0;
        for (Index c = 0; c < Z.cols(); ++c) {
            const double z = Z(m, c);
            if (z == 1.0) {
                level[static_cast<std::size_t>(m)] = c;
                ++ones;
            } else if (z != 0.0) {
                throw DataError("incidence row " + std::to_string(m + 1) + " has a non 0/1 entry");
            }
        }
        if (ones != 1)
            throw DataError("incidence row " + std::to_string(m + 1) + " must contain exactly one 1");
    }
}

void PhenotypeData::validate() const {
    if (n() < 1 || p() < 1) throw DataError("phenotype matrix must have at least one row and column");
    if (X.rows() != n())
        throw DataError("design matrix has " + std::to_string(X.rows()) + " rows, expected " +
                        std::to_string(n()));
    if (!X.allFinite()) throw DataError("design matrix contains non-finite values");
    if (missing.rows() != n() || missing.cols() != p())
        throw DataError("missing mask does not match the phenotype matrix");
    if (static_cast<Index>(level.size()) != n())
        throw DataError("incidence does not cover every individual");
    if (levels < 1) throw DataError("at least one genetic level is required");
    for (Index m = 0; m < n(); ++m) {
        const Index l = level[static_cast<std::size_t>(m)];
        if (l < 0 || l >= levels) throw DataError("genetic level out of range for row " + std::to_string(m + 1));
        for (Index i = 0; i < p(); ++i)
            if (!missing(m, i) && !std::isfinite(Y(m, i)))
                throw DataError("non-finite phenotype at row " + std::to_string(m + 1) + ", trait " +
                                std::to_string(i + 1));
    }
    if (!trait_names.empty() && static_cast<Index>(trait_names.size()) != p())
        throw DataError("trait name count does not match the phenotype matrix");
}

PhenotypeData PhenotypeData::with_identity_incidence(Matrix Y) {
    PhenotypeData d;
    const Index n = Y.rows();
    d.missing = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, Y.cols(), false);
    d.Y = std::move(Y);
    d.X = Matrix::Ones(n, 1);
    d.levels = n;
    d.level.resize(static_cast<std::size_t>(n));
    for (Index m = 0; m < n; ++m) d.level[static_cast<std::size_t>(m)] = m;
    return d;
}

Kinship::Kinship(SymmetricMatrix A, std::vector<std::string> ids)
    : A_(std::move(A)), ids_(std::move(ids)) {
    if (!ids_.empty() && static_cast<Index>(ids_.size()) != A_.order())
        throw DataError("kinship id count does not match the matrix order");
    chol_ = jittered_cholesky(A_.matrix());
    const Matrix identity = Matrix::Identity(order(), order());
    const Matrix linv = chol_.triangularView<Eigen::Lower>().solve(identity);
    inverse_ = SymmetricMatrix(Matrix(linv.transpose() * linv)).matrix();
}

Hyperparameters Hyperparameters::for_traits(Index p) const {
    Hyperparameters h = *this;
    h.k_max = static_cast<int>(std::min<Index>(h.k_max, p));
    h.k_init = static_cast<int>(std::min<Index>(h.k_init, h.k_max));
    return h;
}

void Hyperparameters::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(nu, "nu");
    positive(a1, "a1");
    positive(b1, "b1");
    positive(a2, "a2");
    positive(b2, "b2");
    positive(a_g, "a_g");
    positive(b_g, "b_g");
    positive(a_r, "a_r");
    positive(b_r, "b_r");
    positive(b_prec, "b_prec");
    positive(adapt_epsilon, "adapt_epsilon");
    if (!(a2 > b2)) throw ConfigError("a2 must exceed b2 so column precisions increase");
    if (n_h < 2) throw ConfigError("n_h must be at least 2");
    if (k_init < 1 || k_max < 1) throw ConfigError("k_init and k_max must be at least 1");
    if (k_init > k_max) throw ConfigError("k_init must not exceed k_max");
    if (!std::isfinite(adapt_alpha0) || !std::isfinite(adapt_alpha1))
        throw ConfigError("adaptation constants must be finite");
}

Vector ChainState::h2() const {
    return h2_index.cast<double>() / static_cast<double>(h2_grid);
}

void ChainState::refresh_tau() {
    tau.resize(delta_shrink.size());
    double acc = 1.0;
    for (Index j = 0; j < delta_shrink.size(); ++j) {
        acc *= delta_shrink(j);
        tau(j) = acc;
    }
}

Vector heritability_grid(int n_h) {
    Vector g(n_h);
    for (int l = 0; l < n_h; ++l) g(l) = static_cast<double>(l) / static_cast<double>(n_h);
    return g;
}

Vector heritability_log_prior(int n_h) {
    Vector lp = Vector::Constant(n_h, std::log(1.0 / (2.0 * (n_h - 1))));
    lp(0) = std::log(0.5);
    return lp;
}

namespace {

SymmetricMatrix weighted_outer(const Matrix& Lambda, const Vector& w, const Vector& diag) {
    Matrix m = Lambda * w.asDiagonal() * Lambda.transpose();
    m.diagonal() += diag;
    return SymmetricMatrix(std::move(m));
}

}  // namespace

SymmetricMatrix reconstruct_G(const ChainState& s) {
    return weighted_outer(s.Lambda, s.h2(), s.psi_a_prec.cwiseInverse());
}

SymmetricMatrix reconstruct_R(const ChainState& s) {
    const Vector e = Vector::Ones(s.k_star()) - s.h2();
    return weighted_outer(s.Lambda, e, s.sigma2_prec.cwiseInverse());
}

SymmetricMatrix reconstruct_P(const ChainState& s) {
    Matrix m = s.Lambda * s.Lambda.transpose();
    m.diagonal() += s.psi_a_prec.cwiseInverse() + s.sigma2_prec.cwiseInverse();
    return SymmetricMatrix(std::move(m));
}

Vector trait_heritabilities(const SymmetricMatrix& G, const SymmetricMatrix& P) {
    if (G.order() != P.order()) throw ParameterError("G and P must have the same order");
    Vector h(G.order());
    for (Index i = 0; i < G.order(); ++i) {
        if (!(P(i, i) > 0.0))
            throw DegenerateTraitError("trait " + std::to_string(i + 1) + " has zero phenotypic variance",
                                       static_cast<std::size_t>(i));
        h(i) = G(i, i) / P(i, i);
    }
    return h;
}

Vector selection_response(const ChainState& s, Index fitness) {
    const Index p = s.Lambda.rows();
    if (fitness < 0 || fitness >= p) throw ParameterError("fitness trait index out of range");
    const Vector h2 = s.h2();
    const Vector fit_row = s.Lambda.row(fitness).transpose().cwiseProduct(h2);
    const Vector all = s.Lambda * fit_row;
    Vector out(p - 1);
    for (Index i = 0, o = 0; i < p; ++i)
        if (i != fitness) out(o++) = all(i);
    return out;
}

double fitness_variance_fraction(const ChainState& s, Index fitness) {
    if (fitness < 0 || fitness >= s.Lambda.rows()) throw ParameterError("fitness trait index out of range");
    const double psi = 1.0 / s.psi_a_prec(fitness);
    const double factor_part = s.Lambda.row(fitness).cwiseProduct(s.Lambda.row(fitness)).dot(s.h2().transpose());
    const double g = factor_part + psi;
    if (!(g > 0.0))
        throw DegenerateTraitError("fitness trait has zero genetic variance", static_cast<std::size_t>(fitness));
    return 1.0 - psi / g;
}

}  // namespace gfactor
