#include "gfactor/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gfactor/distributions.hpp"
#include "gfactor/error.hpp"

namespace gfactor {

namespace {

Vector standard_normal_vector(Index size, RngStream& rng) {
    Vector z(size);
    for (Index i = 0; i < size; ++i) z(i) = rng.normal();
    return z;
}

Matrix select_columns(const Matrix& m, const std::vector<Index>& keep) {
    Matrix out(m.rows(), static_cast<Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) out.col(static_cast<Index>(c)) = m.col(keep[c]);
    return out;
}

template <typename V>
V select_entries(const V& v, const std::vector<Index>& keep) {
    V out(static_cast<Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) out(static_cast<Index>(c)) = v(keep[c]);
    return out;
}

int sample_h2_prior(int n_h, RngStream& rng) {
    const Vector lp = heritability_log_prior(n_h);
    return static_cast<int>(sample_categorical_log(std::span<const double>(lp.data(), lp.size()), rng));
}

}  // namespace

ChainState sample_prior_state(Index n, Index p, Index b, const KinshipBasis& basis,
                              const Hyperparameters& hyper, Index k, RngStream& rng) {
    const Index r = basis.r();
    ChainState s;
    s.h2_grid = hyper.n_h;

    s.B.resize(b, p);
    const double b_sd = 1.0 / std::sqrt(hyper.b_prec);
    for (Index i = 0; i < s.B.size(); ++i) s.B.data()[i] = b_sd * rng.normal();

    s.delta_shrink.resize(k);
    for (Index j = 0; j < k; ++j)
        s.delta_shrink(j) = j == 0 ? sample_gamma(hyper.a1, hyper.b1, rng) : sample_gamma(hyper.a2, hyper.b2, rng);
    s.refresh_tau();

    s.Phi.resize(p, k);
    s.Lambda.resize(p, k);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < p; ++i) {
            s.Phi(i, j) = sample_gamma(hyper.nu / 2.0, hyper.nu / 2.0, rng);
            s.Lambda(i, j) = rng.normal() / std::sqrt(s.Phi(i, j) * s.tau(j));
        }

    s.h2_index.resize(k);
    for (Index j = 0; j < k; ++j) s.h2_index(j) = sample_h2_prior(hyper.n_h, rng);
    const Vector h2 = s.h2();

    s.Fa.resize(r, k);
    for (Index j = 0; j < k; ++j) {
        const double sd = std::sqrt(h2(j));
        for (Index m = 0; m < r; ++m) s.Fa(m, j) = sd * rng.normal();
    }
    s.F = basis.G() * s.Fa;
    for (Index j = 0; j < k; ++j) {
        const double sd = std::sqrt(1.0 - h2(j));
        for (Index m = 0; m < n; ++m) s.F(m, j) += sd * rng.normal();
    }

    s.psi_a_prec.resize(p);
    s.sigma2_prec.resize(p);
    for (Index i = 0; i < p; ++i) s.psi_a_prec(i) = sample_gamma(hyper.a_g, hyper.b_g, rng);
    for (Index i = 0; i < p; ++i) s.sigma2_prec(i) = sample_gamma(hyper.a_r, hyper.b_r, rng);

    s.Delta.resize(r, p);
    for (Index i = 0; i < p; ++i) {
        const double sd = 1.0 / std::sqrt(s.psi_a_prec(i));
        for (Index m = 0; m < r; ++m) s.Delta(m, i) = sd * rng.normal();
    }
    return s;
}

Matrix simulate_observations(const ChainState& s, const Matrix& X, const KinshipBasis& basis,
                             RngStream& rng) {
    Matrix Y = X * s.B + s.F * s.Lambda.transpose() + basis.G() * s.Delta;
    for (Index i = 0; i < Y.cols(); ++i) {
        const double sd = 1.0 / std::sqrt(s.sigma2_prec(i));
        for (Index m = 0; m < Y.rows(); ++m) Y(m, i) += sd * rng.normal();
    }
    return Y;
}

GibbsSampler::GibbsSampler(PhenotypeData data, const Kinship& kinship, Hyperparameters hyper, RngStream rng)
    : GibbsSampler(data, std::make_shared<const KinshipBasis>(kinship, data.level, data.n()), hyper,
                   std::move(rng)) {}

GibbsSampler::GibbsSampler(PhenotypeData data, std::shared_ptr<const KinshipBasis> basis,
                           Hyperparameters hyper, RngStream rng)
    : data_(std::move(data)), basis_(std::move(basis)), hyper_(hyper), rng_(std::move(rng)) {
    data_.validate();
    hyper_.validate();
    if (!basis_ || basis_->n() != data_.n() || basis_->r() != data_.levels)
        throw DataError("kinship basis does not match the phenotype data");

    const Index n = data_.n(), p = data_.p();
    for (Index i = 0; i < p; ++i)
        for (Index m = 0; m < n; ++m)
            if (data_.missing(m, i)) missing_cells_.emplace_back(m, i);

    Yw_ = data_.Y;
    trait_sd_.resize(p);
    for (Index i = 0; i < p; ++i) {
        double sum = 0.0, sq = 0.0;
        Index count = 0;
        for (Index m = 0; m < n; ++m) {
            if (data_.missing(m, i)) continue;
            sum += data_.Y(m, i);
            ++count;
        }
        if (count == 0) throw DataError("trait " + std::to_string(i + 1) + " has no observed values");
        const double mean = sum / static_cast<double>(count);
        for (Index m = 0; m < n; ++m) {
            if (data_.missing(m, i)) {
                Yw_(m, i) = mean;
            } else {
                sq += (data_.Y(m, i) - mean) * (data_.Y(m, i) - mean);
            }
        }
        trait_sd_(i) = count > 1 ? std::sqrt(sq / static_cast<double>(count - 1)) : 0.0;
    }

    XtX_ = data_.X.transpose() * data_.X;
    GtX_ = basis_->G().transpose() * data_.X;

    // Heritability grid tables: per grid point, covariance eigenvalues
    // 1 - h + h d_m on the range of Z A Z' and 1 - h on its complement.
    const Vector grid = heritability_grid(hyper_.n_h);
    const auto& range = basis_->range();
    const Index rank = basis_->rank();
    grid_inverse_variance_.resize(rank, hyper_.n_h);
    grid_log_det_.resize(hyper_.n_h);
    for (int l = 0; l < hyper_.n_h; ++l) {
        const double h = grid(l);
        double log_det = static_cast<double>(n - rank) * std::log(1.0 - h);
        for (Index c = 0; c < rank; ++c) {
            const double v = 1.0 - h + h * basis_->d()(range[static_cast<std::size_t>(c)]);
            grid_inverse_variance_(c, l) = 1.0 / v;
            log_det += std::log(v);
        }
        grid_log_det_(l) = log_det;
    }

    refresh_data_caches();
}

void GibbsSampler::refresh_data_caches() {
    GtY_ = basis_->G().transpose() * Yw_;
    XtY_ = data_.X.transpose() * Yw_;
}

void GibbsSampler::refresh_factor_cache() { GtF_ = basis_->G().transpose() * state_.F; }

void GibbsSampler::set_observations(const Matrix& Y) {
    if (Y.rows() != data_.n() || Y.cols() != data_.p()) throw DataError("observation matrix shape mismatch");
    Yw_ = Y;
    data_.Y = Y;
    for (std::size_t c = 0; c < missing_cells_.size(); ++c)
        state_.imputed(static_cast<Index>(c)) = Y(missing_cells_[c].first, missing_cells_[c].second);
    refresh_data_caches();
}

void GibbsSampler::set_state(ChainState s) {
    const Index n = data_.n(), p = data_.p(), b = data_.b(), r = data_.levels;
    const Index k = s.Lambda.cols();
    auto require = [](bool ok, const char* what) {
        if (!ok) throw DataError(std::string("chain state has inconsistent ") + what);
    };
    require(s.B.rows() == b && s.B.cols() == p, "B");
    require(s.Lambda.rows() == p && k >= 1, "Lambda");
    require(s.F.rows() == n && s.F.cols() == k, "F");
    require(s.Fa.rows() == r && s.Fa.cols() == k, "Fa");
    require(s.h2_index.size() == k && s.h2_grid == hyper_.n_h, "h2");
    require(s.Delta.rows() == r && s.Delta.cols() == p, "Delta");
    require(s.Phi.rows() == p && s.Phi.cols() == k, "Phi");
    require(s.delta_shrink.size() == k, "delta_shrink");
    require(s.psi_a_prec.size() == p && s.sigma2_prec.size() == p, "precisions");
    for (Index j = 0; j < k; ++j)
        require(s.h2_index(j) >= 0 && s.h2_index(j) < hyper_.n_h, "h2 grid index");

    const auto missing = static_cast<Index>(missing_cells_.size());
    if (s.imputed.size() != missing) {
        require(s.imputed.size() == 0, "imputed values");
        s.imputed.resize(missing);
        for (Index c = 0; c < missing; ++c) {
            const auto [m, i] = missing_cells_[static_cast<std::size_t>(c)];
            s.imputed(c) = Yw_(m, i);
        }
    }
    for (Index c = 0; c < missing; ++c) {
        const auto [m, i] = missing_cells_[static_cast<std::size_t>(c)];
        Yw_(m, i) = s.imputed(c);
    }
    s.refresh_tau();
    state_ = std::move(s);
    refresh_data_caches();
    refresh_factor_cache();
}

void GibbsSampler::initialize() {
    const Index p = data_.p();
    const Index k = std::clamp<Index>(hyper_.k_init, 1, std::max(1, hyper_.k_max));
    ChainState s = sample_prior_state(data_.n(), p, data_.b(), *basis_, hyper_, k, rng_);
    s.B.setZero();
    s.Delta.setZero();
    for (Index i = 0; i < p; ++i) {
        const double var = trait_sd_(i) > 0 ? trait_sd_(i) * trait_sd_(i) : 1.0;
        s.sigma2_prec(i) = 1.0 / var;
        s.psi_a_prec(i) = 1.0 / var;
    }
    s.imputed.resize(0);
    set_state(std::move(s));
}

void GibbsSampler::step_impute_missing() {
    if (missing_cells_.empty()) return;
    const Matrix& G = basis_->G();
    for (std::size_t c = 0; c < missing_cells_.size(); ++c) {
        const auto [m, i] = missing_cells_[c];
        const double mean = data_.X.row(m).dot(state_.B.col(i)) + state_.F.row(m).dot(state_.Lambda.row(i)) +
                            G.row(m).dot(state_.Delta.col(i).transpose());
        const double v = mean + rng_.normal() / std::sqrt(state_.sigma2_prec(i));
        Yw_(m, i) = v;
        state_.imputed(static_cast<Index>(c)) = v;
    }
    refresh_data_caches();
}

// Regression of trait i on M = [X F] with Delta integrated out: the
// observation covariance psi Z A Z' + sigma^2 I is diagonal in the basis, and
// its inverse is s I - G Diag(e) G' with e_m = s^2 psi / (1 + psi s d_m).
Matrix GibbsSampler::regression_design_precision(Index trait, const Matrix& MtM, const Matrix& GtM) const {
    const double s = state_.sigma2_prec(trait);
    const double psi = 1.0 / state_.psi_a_prec(trait);
    const Vector e_sqrt = ((s * s * psi) / (1.0 + psi * s * basis_->d().array())).sqrt().matrix();
    const Matrix T = e_sqrt.asDiagonal() * GtM;
    Matrix P = s * MtM;
    P.noalias() -= T.transpose() * T;
    const Index b = data_.b();
    P.diagonal().head(b).array() += hyper_.b_prec;
    P.diagonal().tail(state_.k_star()) += (state_.Phi.row(trait).transpose().array() * state_.tau.array()).matrix();
    return P;
}

namespace {

struct RegressionDesign {
    Matrix MtM, GtM, MtY;
};

RegressionDesign make_design(const Matrix& X, const Matrix& F, const Matrix& XtX, const Matrix& GtX,
                             const Matrix& GtF, const Matrix& XtY, const Matrix& Yw) {
    const Index b = X.cols(), k = F.cols();
    RegressionDesign d;
    d.MtM.resize(b + k, b + k);
    d.MtM.topLeftCorner(b, b) = XtX;
    d.MtM.topRightCorner(b, k) = X.transpose() * F;
    d.MtM.bottomLeftCorner(k, b) = d.MtM.topRightCorner(b, k).transpose();
    d.MtM.bottomRightCorner(k, k) = F.transpose() * F;
    d.GtM.resize(GtX.rows(), b + k);
    d.GtM << GtX, GtF;
    d.MtY.resize(b + k, Yw.cols());
    d.MtY.topRows(b) = XtY;
    d.MtY.bottomRows(k) = F.transpose() * Yw;
    return d;
}

}  // namespace

void GibbsSampler::step_joint_regression() {
    const Index p = data_.p(), b = data_.b(), k = state_.k_star();
    const Vector& d = basis_->d();
    const RegressionDesign design = make_design(data_.X, state_.F, XtX_, GtX_, GtF_, XtY_, Yw_);

    for (Index i = 0; i < p; ++i) {
        const double s = state_.sigma2_prec(i);
        const double psi = 1.0 / state_.psi_a_prec(i);
        const Matrix P = regression_design_precision(i, design.MtM, design.GtM);
        const Vector e = (s * s * psi) / (1.0 + psi * s * d.array());
        const Vector rhs = s * design.MtY.col(i) - design.GtM.transpose() * e.cwiseProduct(GtY_.col(i));

        Matrix L;
        try {
            L = jittered_cholesky(P);
        } catch (const NumericalError&) {
            throw NumericalError("joint regression precision is singular for trait " + std::to_string(i + 1));
        }
        const auto lower = L.triangularView<Eigen::Lower>();
        const auto upper = L.transpose().triangularView<Eigen::Upper>();
        Vector theta = upper.solve(lower.solve(rhs));
        theta += upper.solve(standard_normal_vector(b + k, rng_));
        state_.B.col(i) = theta.head(b);
        state_.Lambda.row(i) = theta.tail(k).transpose();

        const Vector resid = GtY_.col(i) - design.GtM * theta;
        const Vector prec = (1.0 / psi) + s * d.array();
        const Vector z = standard_normal_vector(d.size(), rng_);
        state_.Delta.col(i) = (s * resid.array() / prec.array() + z.array() / prec.array().sqrt()).matrix();
    }
}

Vector GibbsSampler::joint_regression_mean(Index trait) const {
    const Index b = data_.b(), k = state_.k_star(), r = basis_->r();
    const Vector& d = basis_->d();
    const RegressionDesign design = make_design(data_.X, state_.F, XtX_, GtX_, GtF_, XtY_, Yw_);
    const double s = state_.sigma2_prec(trait);
    const double psi = 1.0 / state_.psi_a_prec(trait);
    const Matrix P = regression_design_precision(trait, design.MtM, design.GtM);
    const Vector e = (s * s * psi) / (1.0 + psi * s * d.array());
    const Vector rhs = s * design.MtY.col(trait) - design.GtM.transpose() * e.cwiseProduct(GtY_.col(trait));
    const Vector theta = P.ldlt().solve(rhs);
    const Vector resid = GtY_.col(trait) - design.GtM * theta;
    const Vector coords = (s * resid.array() / ((1.0 / psi) + s * d.array())).matrix();

    Vector out(b + r + k);
    out.head(b) = theta.head(b);
    out.segment(b, r) = basis_->Q() * coords;
    out.tail(k) = theta.tail(k);
    return out;
}

Matrix GibbsSampler::factor_score_precision() const {
    const Vector one_minus = Vector::Ones(state_.k_star()) - state_.h2();
    Matrix C = state_.Lambda.transpose() * state_.sigma2_prec.asDiagonal() * state_.Lambda;
    C.diagonal() += one_minus.cwiseInverse();
    return C;
}

Matrix GibbsSampler::factor_score_mean() const {
    const Vector inv_one_minus = (Vector::Ones(state_.k_star()) - state_.h2()).cwiseInverse();
    const Matrix SL = state_.sigma2_prec.asDiagonal() * state_.Lambda;
    const Matrix inner = state_.Fa * inv_one_minus.asDiagonal() - state_.Delta * SL;
    Matrix rhs = Yw_ * SL;
    rhs.noalias() -= data_.X * (state_.B * SL);
    rhs.noalias() += basis_->G() * inner;
    const Matrix C = factor_score_precision();
    return C.llt().solve(rhs.transpose()).transpose();
}

void GibbsSampler::step_factor_scores() {
    const Index n = data_.n(), k = state_.k_star();
    const Matrix C = factor_score_precision();
    Matrix L;
    try {
        L = jittered_cholesky(C);
    } catch (const NumericalError&) {
        throw NumericalError("factor-score precision is not positive definite");
    }
    const Matrix mean = factor_score_mean();
    const Matrix z = standard_normal_matrix(k, n, rng_);
    state_.F = mean + L.triangularView<Eigen::Lower>().transpose().solve(z).transpose();
    refresh_factor_cache();
}

Vector GibbsSampler::heritability_log_weights(Index factor) const {
    const auto& range = basis_->range();
    const Index rank = basis_->rank();
    const Vector& d = basis_->d();
    Vector range_ss(rank);
    for (Index c = 0; c < rank; ++c) {
        const Index m = range[static_cast<std::size_t>(c)];
        const double g = GtF_(m, factor);
        range_ss(c) = g * g / d(m);
    }
    const double null_ss = std::max(0.0, state_.F.col(factor).squaredNorm() - range_ss.sum());
    const Vector grid = heritability_grid(hyper_.n_h);
    Vector lw = heritability_log_prior(hyper_.n_h);
    const Vector quad = grid_inverse_variance_.transpose() * range_ss;
    for (int l = 0; l < hyper_.n_h; ++l)
        lw(l) -= 0.5 * (grid_log_det_(l) + quad(l) + null_ss / (1.0 - grid(l)));
    const double max_lw = lw.maxCoeff();
    const double log_norm = max_lw + std::log((lw.array() - max_lw).exp().sum());
    return lw.array() - log_norm;
}

void GibbsSampler::step_heritabilities() {
    for (Index j = 0; j < state_.k_star(); ++j) {
        const Vector lw = heritability_log_weights(j);
        state_.h2_index(j) =
            static_cast<int>(sample_categorical_log(std::span<const double>(lw.data(), lw.size()), rng_));
    }
}

Vector GibbsSampler::genetic_factor_mean(Index factor) const {
    const double h = state_.h2()(factor);
    if (state_.h2_index(factor) == 0) return Vector::Zero(basis_->r());
    const Vector prec = (1.0 / h) + basis_->d().array() / (1.0 - h);
    const Vector coords = (GtF_.col(factor).array() / (1.0 - h) / prec.array()).matrix();
    return basis_->Q() * coords;
}

void GibbsSampler::step_genetic_factor_effects() {
    const Vector h2 = state_.h2();
    const Vector& d = basis_->d();
    for (Index j = 0; j < state_.k_star(); ++j) {
        if (state_.h2_index(j) == 0) {
            state_.Fa.col(j).setZero();
            continue;
        }
        const double h = h2(j);
        const Vector prec = (1.0 / h) + d.array() / (1.0 - h);
        const Vector z = standard_normal_vector(d.size(), rng_);
        state_.Fa.col(j) =
            (GtF_.col(j).array() / (1.0 - h) / prec.array() + z.array() / prec.array().sqrt()).matrix();
    }
}

void GibbsSampler::step_loading_precisions() {
    const double shape = 0.5 * (hyper_.nu + 1.0);
    for (Index j = 0; j < state_.k_star(); ++j) {
        const double tau = hyper_.literal_phi_rate ? 1.0 : state_.tau(j);
        for (Index i = 0; i < data_.p(); ++i) {
            const double l = state_.Lambda(i, j);
            state_.Phi(i, j) = sample_gamma(shape, 0.5 * (hyper_.nu + tau * l * l), rng_);
        }
    }
}

void GibbsSampler::step_shrinkage() {
    const Index k = state_.k_star();
    const auto p = static_cast<double>(data_.p());
    const Vector col_ss = (state_.Phi.array() * state_.Lambda.array().square()).colwise().sum().transpose();
    for (Index h = 0; h < k; ++h) {
        // tau_l with delta_h left out, for l >= h.
        double prefix = 1.0;
        for (Index t = 0; t < h; ++t) prefix *= state_.delta_shrink(t);
        double acc = 0.0;
        double tau_excl = prefix;
        for (Index l = h; l < k; ++l) {
            if (l > h) tau_excl *= state_.delta_shrink(l);
            acc += tau_excl * col_ss(l);
        }
        const double count = p * static_cast<double>(k - h);
        const double shape = (h == 0 ? hyper_.a1 : hyper_.a2) + 0.5 * count;
        const double rate = (h == 0 ? hyper_.b1 : hyper_.b2) + 0.5 * acc;
        state_.delta_shrink(h) = sample_gamma(shape, rate, rng_);
    }
    state_.refresh_tau();
}

void GibbsSampler::step_idiosyncratic_genetic() {
    const double shape = hyper_.a_g + 0.5 * static_cast<double>(basis_->r());
    for (Index i = 0; i < data_.p(); ++i)
        state_.psi_a_prec(i) = sample_gamma(shape, hyper_.b_g + 0.5 * state_.Delta.col(i).squaredNorm(), rng_);
}

namespace {

// ||y - M theta - G eta||^2 expanded so the n x r product G * Delta is never formed.
Vector residual_sums(const Matrix& Yw, const Matrix& X, const ChainState& s, const Matrix& GtY,
                     const Matrix& GtX, const Matrix& GtF, const Vector& d) {
    Matrix E = Yw;
    E.noalias() -= X * s.B;
    E.noalias() -= s.F * s.Lambda.transpose();
    Matrix GtE = GtY;
    GtE.noalias() -= GtX * s.B;
    GtE.noalias() -= GtF * s.Lambda.transpose();
    Vector ss(Yw.cols());
    for (Index i = 0; i < Yw.cols(); ++i) {
        const double v = E.col(i).squaredNorm() - 2.0 * s.Delta.col(i).dot(GtE.col(i)) +
                         (d.array() * s.Delta.col(i).array().square()).sum();
        ss(i) = std::max(0.0, v);
    }
    return ss;
}

}  // namespace

double GibbsSampler::residual_sum_of_squares(Index trait) const {
    return residual_sums(Yw_, data_.X, state_, GtY_, GtX_, GtF_, basis_->d())(trait);
}

void GibbsSampler::step_residual_precisions() {
    const Vector ss = residual_sums(Yw_, data_.X, state_, GtY_, GtX_, GtF_, basis_->d());
    const double shape = hyper_.a_r + 0.5 * static_cast<double>(data_.n());
    for (Index i = 0; i < data_.p(); ++i)
        state_.sigma2_prec(i) = sample_gamma(shape, hyper_.b_r + 0.5 * ss(i), rng_);
}

void GibbsSampler::sweep() {
    if (state_.Lambda.cols() == 0) throw ParameterError("sweep before initialize() or set_state()");
    step_impute_missing();
    step_joint_regression();
    step_factor_scores();
    step_heritabilities();
    step_genetic_factor_effects();
    step_loading_precisions();
    step_shrinkage();
    step_idiosyncratic_genetic();
    step_residual_precisions();
}

int GibbsSampler::adapt_truncation(long iteration) {
    const double prob = std::exp(hyper_.adapt_alpha0 + hyper_.adapt_alpha1 * static_cast<double>(iteration));
    if (rng_.uniform() > prob) return 0;
    return resize_columns();
}

int GibbsSampler::resize_columns() {
    const Index k = state_.k_star(), p = data_.p();
    std::vector<Index> keep;
    for (Index j = 0; j < k; ++j) {
        bool negligible = true;
        for (Index i = 0; i < p && negligible; ++i)
            negligible = std::abs(state_.Lambda(i, j)) < hyper_.adapt_epsilon * trait_sd_(i);
        if (!negligible) keep.push_back(j);
    }
    if (static_cast<Index>(keep.size()) == k) {
        if (k >= hyper_.k_max) return 0;
        append_prior_column();
        return 1;
    }
    if (keep.empty()) keep.push_back(0);
    remove_columns(keep);
    return static_cast<int>(static_cast<Index>(keep.size()) - k);
}

void GibbsSampler::remove_columns(const std::vector<Index>& keep) {
    state_.Lambda = select_columns(state_.Lambda, keep);
    state_.F = select_columns(state_.F, keep);
    state_.Fa = select_columns(state_.Fa, keep);
    state_.Phi = select_columns(state_.Phi, keep);
    state_.h2_index = select_entries(state_.h2_index, keep);
    state_.delta_shrink = select_entries(state_.delta_shrink, keep);
    state_.refresh_tau();
    GtF_ = select_columns(GtF_, keep);
}

void GibbsSampler::append_prior_column() {
    const Index k = state_.k_star(), p = data_.p(), n = data_.n(), r = basis_->r();
    const double delta = k == 0 ? sample_gamma(hyper_.a1, hyper_.b1, rng_) : sample_gamma(hyper_.a2, hyper_.b2, rng_);
    state_.delta_shrink.conservativeResize(k + 1);
    state_.delta_shrink(k) = delta;
    state_.refresh_tau();
    const double tau = state_.tau(k);

    state_.Phi.conservativeResize(p, k + 1);
    state_.Lambda.conservativeResize(p, k + 1);
    for (Index i = 0; i < p; ++i) {
        state_.Phi(i, k) = sample_gamma(hyper_.nu / 2.0, hyper_.nu / 2.0, rng_);
        state_.Lambda(i, k) = rng_.normal() / std::sqrt(state_.Phi(i, k) * tau);
    }

    state_.h2_index.conservativeResize(k + 1);
    state_.h2_index(k) = sample_h2_prior(hyper_.n_h, rng_);
    const double h = static_cast<double>(state_.h2_index(k)) / static_cast<double>(hyper_.n_h);

    state_.Fa.conservativeResize(r, k + 1);
    for (Index m = 0; m < r; ++m) state_.Fa(m, k) = std::sqrt(h) * rng_.normal();
    Vector f = basis_->G() * state_.Fa.col(k);
    for (Index m = 0; m < n; ++m) f(m) += std::sqrt(1.0 - h) * rng_.normal();
    state_.F.conservativeResize(n, k + 1);
    state_.F.col(k) = f;
    GtF_.conservativeResize(r, k + 1);
    GtF_.col(k) = basis_->G().transpose() * f;
}

}  // namespace gfactor
