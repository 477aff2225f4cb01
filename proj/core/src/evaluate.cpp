#include "gfactor/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gfactor/csv.hpp"
#include "gfactor/error.hpp"

namespace gfactor {

SymmetricMatrix moments_G(const Matrix& Y, const std::vector<Index>& sire) {
    const Index n = Y.rows(), p = Y.cols();
    if (static_cast<Index>(sire.size()) != n) throw DataError("sire labels do not match the phenotype rows");
    Index families = 0;
    for (Index s : sire) {
        if (s < 0) throw DataError("negative sire label");
        families = std::max(families, s + 1);
    }
    std::vector<Index> counts(static_cast<std::size_t>(families), 0);
    for (Index s : sire) ++counts[static_cast<std::size_t>(s)];
    const Index n_off = families > 0 ? counts.front() : 0;
    for (Index c : counts)
        if (c != n_off) throw DataError("unsupported design: families are unbalanced");
    if (families < 2 || n_off < 2) throw DataError("unsupported design: need two families of two or more");

    Matrix family_mean = Matrix::Zero(families, p);
    for (Index m = 0; m < n; ++m) family_mean.row(sire[static_cast<std::size_t>(m)]) += Y.row(m);
    family_mean /= static_cast<double>(n_off);
    const Vector grand = family_mean.colwise().mean().transpose();

    const Matrix between_dev = family_mean.rowwise() - grand.transpose();
    Matrix within_dev = Y;
    for (Index m = 0; m < n; ++m) within_dev.row(m) -= family_mean.row(sire[static_cast<std::size_t>(m)]);

    const Matrix ms_between = static_cast<double>(n_off) * between_dev.transpose() * between_dev /
                              static_cast<double>(families - 1);
    const Matrix ms_within =
        within_dev.transpose() * within_dev / static_cast<double>(families * (n_off - 1));
    return SymmetricMatrix(Matrix(4.0 * (ms_between - ms_within) / static_cast<double>(n_off)));
}

double frobenius_error(const Matrix& estimate, const Matrix& truth) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
        throw ParameterError("frobenius_error: shape mismatch");
    return (estimate - truth).norm();
}

namespace {

Matrix top_eigenvectors(const SymmetricMatrix& m, Index k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");
    // Eigen sorts ascending; take the last k, largest first.
    return es.eigenvectors().rightCols(k).rowwise().reverse();
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

double krzanowski(const SymmetricMatrix& estimate, const SymmetricMatrix& truth, Index k) {
    if (estimate.order() != truth.order()) throw ParameterError("krzanowski: order mismatch");
    if (k < 1 || k > truth.order()) throw ParameterError("krzanowski: k must lie in [1, p]");
    const Matrix E = top_eigenvectors(estimate, k);
    const Matrix T = top_eigenvectors(truth, k);
    // Sum of eigenvalues of E'T T'E is its trace, the squared norm of E'T.
    return (E.transpose() * T).squaredNorm();
}

std::vector<FactorMatch> match_factors(const Matrix& true_Lambda, const Matrix& est_Lambda) {
    if (true_Lambda.rows() != est_Lambda.rows()) throw ParameterError("match_factors: trait count mismatch");
    struct Candidate {
        double angle;
        Index t, e;
    };
    std::vector<Candidate> candidates;
    for (Index t = 0; t < true_Lambda.cols(); ++t) {
        const double nt = true_Lambda.col(t).norm();
        if (nt == 0.0) continue;
        for (Index e = 0; e < est_Lambda.cols(); ++e) {
            const double ne = est_Lambda.col(e).norm();
            if (ne == 0.0) continue;
            const double c = std::min(1.0, std::abs(true_Lambda.col(t).dot(est_Lambda.col(e))) / (nt * ne));
            candidates.push_back({std::acos(c) * 180.0 / std::numbers::pi, t, e});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.angle != b.angle) return a.angle < b.angle;
        if (a.e != b.e) return a.e < b.e;
        return a.t < b.t;
    });
    std::vector<bool> true_used(static_cast<std::size_t>(true_Lambda.cols()), false);
    std::vector<bool> est_used(static_cast<std::size_t>(est_Lambda.cols()), false);
    std::vector<FactorMatch> out;
    for (const auto& c : candidates) {
        if (true_used[static_cast<std::size_t>(c.t)] || est_used[static_cast<std::size_t>(c.e)]) continue;
        true_used[static_cast<std::size_t>(c.t)] = est_used[static_cast<std::size_t>(c.e)] = true;
        out.push_back({c.t, c.e, c.angle});
    }
    std::sort(out.begin(), out.end(), [](const FactorMatch& a, const FactorMatch& b) { return a.true_index < b.true_index; });
    return out;
}

Index count_large_factors(const Matrix& est_Lambda, double P_trace, double threshold) {
    if (!(P_trace > 0.0)) throw ParameterError("count_large_factors: trace(P) must be positive");
    Index count = 0;
    for (Index j = 0; j < est_Lambda.cols(); ++j)
        if (est_Lambda.col(j).squaredNorm() / P_trace > threshold) ++count;
    return count;
}

std::vector<Index> traits_explained(const Matrix& Lambda, const SymmetricMatrix& P, double fraction) {
    if (P.order() != Lambda.rows()) throw ParameterError("loadings and P disagree on the trait count");
    std::vector<Index> counts(static_cast<std::size_t>(Lambda.cols()), 0);
    for (Index j = 0; j < Lambda.cols(); ++j)
        for (Index i = 0; i < Lambda.rows(); ++i)
            if (P(i, i) > 0.0 && Lambda(i, j) * Lambda(i, j) > fraction * P(i, i)) ++counts[static_cast<std::size_t>(j)];
    return counts;
}

std::vector<Index> large_factor_set(const Matrix& Lambda, const SymmetricMatrix& P) {
    const auto counts = traits_explained(Lambda, P);
    std::vector<Index> out;
    for (std::size_t j = 0; j < counts.size(); ++j)
        if (counts[j] >= 2) out.push_back(static_cast<Index>(j));
    return out;
}

double h2_rmse(const Vector& estimate, const Vector& truth) {
    if (estimate.size() != truth.size() || truth.size() == 0) throw ParameterError("h2_rmse: size mismatch");
    return std::sqrt((estimate - truth).squaredNorm() / static_cast<double>(truth.size()));
}

EvalReport evaluate(const EvalInputs& in) {
    EvalReport r;
    r.replicate = in.replicate;
    const Vector grand = in.Y.colwise().mean().transpose();
    const Matrix centered = in.Y.rowwise() - grand.transpose();
    r.frobenius_moments = frobenius_error(moments_G(centered, in.sire).matrix(), in.G_true.matrix());
    r.frobenius_posterior = frobenius_error(in.G_hat.matrix(), in.G_true.matrix());
    r.k_G = in.k_G;
    r.krzanowski_G = krzanowski(in.G_hat, in.G_true, in.k_G);
    r.k_G_genetic = in.k_G_genetic;
    if (in.k_G_genetic > 0) r.krzanowski_G_genetic = krzanowski(in.G_hat, in.G_true, in.k_G_genetic);
    r.k_P = in.k_P;
    r.krzanowski_P = krzanowski(in.P_hat, in.P_true, in.k_P);
    r.n_large_factors = count_large_factors(in.Lambda_hat, in.P_hat.matrix().trace());
    r.h2_rmse = h2_rmse(trait_heritabilities(in.G_hat, in.P_hat), trait_heritabilities(in.G_true, in.P_true));
    r.factor_match = match_factors(in.Lambda_true, in.Lambda_hat);
    std::vector<double> angles;
    for (const auto& m : r.factor_match) {
        angles.push_back(m.angle_degrees);
        r.matched_h2.push_back(m.estimated_index < in.factor_h2_hat.size() ? in.factor_h2_hat(m.estimated_index)
                                                                           : std::numeric_limits<double>::quiet_NaN());
    }
    r.median_angle = median(angles);
    return r;
}

std::string eval_csv_header() {
    return "replicate,frobenius_moments,frobenius_posterior,krzanowski_G,k_G,krzanowski_G_genetic,k_G_genetic,"
           "krzanowski_P,k_P,n_large_factors,h2_rmse,median_angle";
}

std::string eval_csv_row(const EvalReport& r) {
    std::ostringstream os;
    os << r.replicate << ',' << format_double(r.frobenius_moments) << ',' << format_double(r.frobenius_posterior) << ','
       << format_double(r.krzanowski_G) << ',' << r.k_G << ',' << format_double(r.krzanowski_G_genetic) << ','
       << r.k_G_genetic << ',' << format_double(r.krzanowski_P) << ',' << r.k_P << ',' << r.n_large_factors << ','
       << format_double(r.h2_rmse) << ',' << format_double(r.median_angle);
    return os.str();
}

EvalReport parse_eval_csv_row(const std::string& line) {
    const auto f = split_csv_line(line);
    if (f.size() != 12) throw DataError("evaluation row has " + std::to_string(f.size()) + " fields, expected 12");
    auto integer = [](const std::string& s) {
        const double v = parse_double(s, "evaluation row");
        if (v != std::floor(v)) throw DataError("evaluation row: expected an integer, got '" + s + "'");
        return static_cast<Index>(v);
    };
    EvalReport r;
    r.replicate = f[0];
    r.frobenius_moments = parse_double(f[1], "frobenius_moments");
    r.frobenius_posterior = parse_double(f[2], "frobenius_posterior");
    r.krzanowski_G = parse_double(f[3], "krzanowski_G");
    r.k_G = integer(f[4]);
    r.krzanowski_G_genetic = parse_double(f[5], "krzanowski_G_genetic");
    r.k_G_genetic = integer(f[6]);
    r.krzanowski_P = parse_double(f[7], "krzanowski_P");
    r.k_P = integer(f[8]);
    r.n_large_factors = integer(f[9]);
    r.h2_rmse = parse_double(f[10], "h2_rmse");
    r.median_angle = parse_double(f[11], "median_angle");
    return r;
}

}  // namespace gfactor
