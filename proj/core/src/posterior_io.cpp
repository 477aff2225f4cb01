#include "gfactor/posterior_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gfactor/config.hpp"
#include "gfactor/csv.hpp"
#include "gfactor/error.hpp"
#include "gfactor/pedigree.hpp"

namespace gfactor {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> numbered(const std::string& prefix, Index count) {
    std::vector<std::string> out;
    for (Index j = 0; j < count; ++j) out.push_back(prefix + std::to_string(j + 1));
    return out;
}

std::string lambda_file(std::size_t draw) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "lambda_%04zu.csv", draw + 1);
    return buf;
}

Matrix rows_of(const std::vector<PosteriorDraw>& draws, const Vector PosteriorDraw::*field) {
    const Index width = (draws.front().*field).size();
    Matrix m(static_cast<Index>(draws.size()), width);
    for (std::size_t d = 0; d < draws.size(); ++d) {
        if ((draws[d].*field).size() != width) throw DataError("stored draws have differing dimensions");
        m.row(static_cast<Index>(d)) = (draws[d].*field).transpose();
    }
    return m;
}

Interval interval_of(const std::vector<double>& xs) {
    if (xs.size() >= 10) return hpd_interval(std::span<const double>(xs.data(), xs.size()), 0.95);
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    return {*lo, *hi};
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

Matrix genetic_cov(const PosteriorDraw& d) {
    Matrix g = d.Lambda * d.h2.asDiagonal() * d.Lambda.transpose();
    g.diagonal() += d.psi_a;
    return g;
}

Matrix residual_cov(const PosteriorDraw& d) {
    const Vector e = Vector::Ones(d.h2.size()) - d.h2;
    Matrix r = d.Lambda * e.asDiagonal() * d.Lambda.transpose();
    r.diagonal() += d.sigma2;
    return r;
}

void write_interval_table(const fs::path& path, const std::vector<std::string>& ids, const Vector& mean,
                          const std::vector<Interval>& hpd) {
    Matrix m(mean.size(), 3);
    for (Index i = 0; i < mean.size(); ++i) m.row(i) << mean(i), hpd[static_cast<std::size_t>(i)].lower, hpd[static_cast<std::size_t>(i)].upper;
    write_csv(path, {"mean", "hpd_lower", "hpd_upper"}, m, ids);
}

void read_interval_table(const fs::path& path, Vector& mean, std::vector<Interval>& hpd) {
    const CsvTable t = read_csv(path);
    if (t.values.cols() != 3) throw DataError(path.string() + ": expected mean,hpd_lower,hpd_upper");
    mean = t.values.col(0);
    hpd.clear();
    for (Index i = 0; i < t.values.rows(); ++i) hpd.push_back({t.values(i, 1), t.values(i, 2)});
}

}  // namespace

void write_posterior_dir(const fs::path& dir, const PosteriorSamples& samples,
                         const std::vector<std::string>& trait_names,
                         const std::vector<std::pair<Index, Index>>& missing_cells, const std::string& provenance) {
    if (samples.draws.empty()) throw InsufficientDataError("no posterior draws to write");
    fs::create_directories(dir);
    const auto& draws = samples.draws;
    const Index k = draws.front().Lambda.cols();
    std::vector<std::string> iterations;
    for (const auto& d : draws) iterations.push_back(std::to_string(d.iteration));

    for (std::size_t d = 0; d < draws.size(); ++d)
        write_csv(dir / lambda_file(d), numbered("f", draws[d].Lambda.cols()), draws[d].Lambda, trait_names);
    write_csv(dir / "h2.csv", numbered("f", k), rows_of(draws, &PosteriorDraw::h2), iterations);
    write_csv(dir / "psi.csv", trait_names, rows_of(draws, &PosteriorDraw::psi_a), iterations);
    write_csv(dir / "sigma2.csv", trait_names, rows_of(draws, &PosteriorDraw::sigma2), iterations);

    const Index b = draws.front().B.rows();
    Matrix B(static_cast<Index>(draws.size()) * b, draws.front().B.cols());
    std::vector<std::string> b_ids;
    for (std::size_t d = 0; d < draws.size(); ++d) {
        B.middleRows(static_cast<Index>(d) * b, b) = draws[d].B;
        for (Index r = 0; r < b; ++r) b_ids.push_back(iterations[d] + ":x" + std::to_string(r + 1));
    }
    write_csv(dir / "B.csv", trait_names, B, b_ids);

    if (!missing_cells.empty()) {
        const Vector mean = samples.mean_imputed();
        std::ostringstream os;
        os << "row,trait,posterior_mean\n";
        for (std::size_t c = 0; c < missing_cells.size(); ++c) {
            const auto [m, i] = missing_cells[c];
            os << m + 1 << ',' << trait_names[static_cast<std::size_t>(i)] << ',' << format_double(mean(static_cast<Index>(c)))
               << '\n';
        }
        write_text_file(dir / "imputed.csv", os.str());
    }
    write_text_file(dir / "provenance.txt", provenance);
}

PosteriorDirectory read_posterior_dir(const fs::path& dir) {
    if (!fs::exists(dir / "h2.csv")) throw DataError("empty posterior directory: " + dir.string());
    const CsvTable h2 = read_csv(dir / "h2.csv");
    const CsvTable psi = read_csv(dir / "psi.csv");
    const CsvTable sigma2 = read_csv(dir / "sigma2.csv");
    const CsvTable B = read_csv(dir / "B.csv");
    const Index n_draws = h2.values.rows();
    if (n_draws == 0) throw DataError("empty posterior directory: " + dir.string());
    if (psi.values.rows() != n_draws || sigma2.values.rows() != n_draws || B.values.rows() % n_draws != 0)
        throw DataError(dir.string() + ": posterior files disagree on the number of draws");
    const Index b = B.values.rows() / n_draws;
    PosteriorDirectory out;
    out.trait_names = psi.columns;
    for (Index d = 0; d < n_draws; ++d) {
        PosteriorDraw draw;
        draw.iteration = static_cast<long>(parse_double(h2.row_ids[static_cast<std::size_t>(d)], "h2.csv iteration"));
        const CsvTable lam = read_csv(dir / lambda_file(static_cast<std::size_t>(d)));
        draw.Lambda = lam.values;
        draw.h2 = h2.values.row(d).transpose();
        draw.psi_a = psi.values.row(d).transpose();
        draw.sigma2 = sigma2.values.row(d).transpose();
        draw.B = B.values.middleRows(d * b, b);
        if (draw.Lambda.cols() != draw.h2.size() || draw.Lambda.rows() != draw.psi_a.size())
            throw DataError(dir.string() + ": loading file for draw " + std::to_string(d + 1) + " has the wrong shape");
        out.draws.push_back(std::move(draw));
    }
    return out;
}

PosteriorSummary summarize_draws(const PosteriorDirectory& post, std::optional<Index> fitness) {
    if (post.draws.empty()) throw InsufficientDataError("empty posterior directory");
    const auto& draws = post.draws;
    const Index p = draws.front().Lambda.rows(), k = draws.front().Lambda.cols();
    const auto n = static_cast<double>(draws.size());
    if (fitness && (*fitness < 0 || *fitness >= p)) throw ConfigError("fitness column out of range");

    PosteriorSummary s;
    s.trait_names = post.trait_names;
    s.draws = draws.size();
    Matrix G = Matrix::Zero(p, p), R = Matrix::Zero(p, p), L = Matrix::Zero(p, k);
    std::vector<std::vector<double>> factor_h2(static_cast<std::size_t>(k)), trait_h2(static_cast<std::size_t>(p));
    std::vector<std::vector<double>> response(static_cast<std::size_t>(std::max<Index>(p - 1, 0)));
    std::vector<std::vector<double>> factor_corr(static_cast<std::size_t>(k));
    std::vector<double> fraction;
    for (const auto& d : draws) {
        if (d.Lambda.cols() != k) throw DataError("stored draws have differing factor counts");
        const Matrix g = genetic_cov(d);
        const Matrix r = residual_cov(d);
        G += g;
        R += r;
        L += d.Lambda;
        for (Index j = 0; j < k; ++j) factor_h2[static_cast<std::size_t>(j)].push_back(d.h2(j));
        for (Index i = 0; i < p; ++i) {
            const double total = g(i, i) + r(i, i);
            if (!(total > 0.0)) throw DegenerateTraitError("trait has zero phenotypic variance", static_cast<std::size_t>(i));
            trait_h2[static_cast<std::size_t>(i)].push_back(g(i, i) / total);
        }
        if (fitness) {
            const Index f = *fitness;
            const Vector fit_row = d.Lambda.row(f).transpose().cwiseProduct(d.h2);
            const Vector all = d.Lambda * fit_row;
            for (Index i = 0, o = 0; i < p; ++i)
                if (i != f) response[static_cast<std::size_t>(o++)].push_back(all(i));
            fraction.push_back(1.0 - d.psi_a(f) / g(f, f));
            for (Index j = 0; j < k; ++j)
                factor_corr[static_cast<std::size_t>(j)].push_back(d.Lambda(f, j) * std::sqrt(d.h2(j)) / std::sqrt(g(f, f)));
        }
    }
    s.G = SymmetricMatrix(Matrix(G / n));
    s.R = SymmetricMatrix(Matrix(R / n));
    s.P = s.G + s.R;
    s.Lambda = L / n;
    s.large_factors = large_factor_set(s.Lambda, s.P);
    s.factor_h2.resize(k);
    for (Index j = 0; j < k; ++j) {
        s.factor_h2(j) = mean_of(factor_h2[static_cast<std::size_t>(j)]);
        s.factor_h2_hpd.push_back(interval_of(factor_h2[static_cast<std::size_t>(j)]));
    }
    s.trait_h2.resize(p);
    for (Index i = 0; i < p; ++i) {
        s.trait_h2(i) = mean_of(trait_h2[static_cast<std::size_t>(i)]);
        s.trait_h2_hpd.push_back(interval_of(trait_h2[static_cast<std::size_t>(i)]));
    }
    const Vector sd = s.G.matrix().diagonal().cwiseMax(0.0).cwiseSqrt();
    s.genetic_correlation = s.G.matrix().array() / (sd * sd.transpose()).array();
    if (fitness) {
        const Index f = *fitness;
        s.fitness = f;
        s.fitness_genetic_correlation.resize(p + k);
        s.fitness_genetic_correlation.head(p) = s.genetic_correlation.col(f);
        for (Index j = 0; j < k; ++j) s.fitness_genetic_correlation(p + j) = mean_of(factor_corr[static_cast<std::size_t>(j)]);
        s.selection_response.resize(p - 1);
        for (Index i = 0; i < p - 1; ++i) {
            s.selection_response(i) = mean_of(response[static_cast<std::size_t>(i)]);
            s.selection_response_hpd.push_back(interval_of(response[static_cast<std::size_t>(i)]));
        }
        s.fitness_fraction = mean_of(fraction);
        s.fitness_fraction_hpd = interval_of(fraction);
    }
    return s;
}

void write_summary_dir(const fs::path& dir, const PosteriorSummary& s, const PosteriorDirectory& post) {
    fs::create_directories(dir);
    const auto& traits = s.trait_names;
    const Index k = s.Lambda.cols();
    const auto factors = numbered("f", k);
    write_csv(dir / "G.csv", traits, s.G.matrix(), traits);
    write_csv(dir / "R.csv", traits, s.R.matrix(), traits);
    write_csv(dir / "P.csv", traits, s.P.matrix(), traits);
    write_csv(dir / "Lambda.csv", factors, s.Lambda, traits);
    write_csv(dir / "genetic_correlation.csv", traits, s.genetic_correlation, traits);
    write_interval_table(dir / "factor_h2.csv", factors, s.factor_h2, s.factor_h2_hpd);
    write_interval_table(dir / "trait_h2.csv", traits, s.trait_h2, s.trait_h2_hpd);

    const auto explained = traits_explained(s.Lambda, s.P);
    std::ostringstream large;
    large << "factor,traits_over_1pct,large\n";
    for (Index j = 0; j < k; ++j) {
        const Index c = explained[static_cast<std::size_t>(j)];
        large << "f" << j + 1 << ',' << c << ',' << (c >= 2 ? 1 : 0) << '\n';
    }
    write_text_file(dir / "large_factors.csv", large.str());

    if (s.fitness) {
        const Index f = *s.fitness;
        std::vector<std::string> ids = traits;
        ids.insert(ids.end(), factors.begin(), factors.end());
        write_csv(dir / "fitness_genetic_correlation.csv", {"genetic_correlation"}, s.fitness_genetic_correlation, ids);
        std::vector<std::string> others;
        for (Index i = 0; i < static_cast<Index>(traits.size()); ++i)
            if (i != f) others.push_back(traits[static_cast<std::size_t>(i)]);
        write_interval_table(dir / "selection_response.csv", others, s.selection_response, s.selection_response_hpd);
        write_interval_table(dir / "fitness_fraction.csv", {traits[static_cast<std::size_t>(f)]},
                             Vector::Constant(1, s.fitness_fraction), {s.fitness_fraction_hpd});
    }

    // Long-format tables, one row per plotted point.
    std::ostringstream h2_long;
    h2_long << "iteration,factor,h2\n";
    for (const auto& d : post.draws)
        for (Index j = 0; j < d.h2.size(); ++j) h2_long << d.iteration << ",f" << j + 1 << ',' << format_double(d.h2(j)) << '\n';
    write_text_file(dir / "plot_factor_h2_draws.csv", h2_long.str());

    std::ostringstream loadings;
    loadings << "trait,factor,loading\n";
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < s.Lambda.rows(); ++i)
            loadings << traits[static_cast<std::size_t>(i)] << ",f" << j + 1 << ',' << format_double(s.Lambda(i, j)) << '\n';
    write_text_file(dir / "plot_loadings.csv", loadings.str());

    std::ostringstream trait_long;
    trait_long << "trait,mean,hpd_lower,hpd_upper\n";
    for (Index i = 0; i < s.trait_h2.size(); ++i)
        trait_long << traits[static_cast<std::size_t>(i)] << ',' << format_double(s.trait_h2(i)) << ','
                   << format_double(s.trait_h2_hpd[static_cast<std::size_t>(i)].lower) << ','
                   << format_double(s.trait_h2_hpd[static_cast<std::size_t>(i)].upper) << '\n';
    write_text_file(dir / "plot_trait_h2.csv", trait_long.str());
    write_text_file(dir / "draws.txt", std::to_string(s.draws) + "\n");
}

PosteriorSummary read_summary_dir(const fs::path& dir) {
    if (!fs::exists(dir / "G.csv")) throw DataError("no summary in " + dir.string());
    PosteriorSummary s;
    const CsvTable G = read_csv(dir / "G.csv");
    s.trait_names = G.columns;
    s.G = SymmetricMatrix(G.values);
    s.R = SymmetricMatrix(read_csv(dir / "R.csv").values);
    s.P = SymmetricMatrix(read_csv(dir / "P.csv").values);
    s.Lambda = read_csv(dir / "Lambda.csv").values;
    s.genetic_correlation = read_csv(dir / "genetic_correlation.csv").values;
    read_interval_table(dir / "factor_h2.csv", s.factor_h2, s.factor_h2_hpd);
    read_interval_table(dir / "trait_h2.csv", s.trait_h2, s.trait_h2_hpd);
    s.large_factors = large_factor_set(s.Lambda, s.P);
    if (fs::exists(dir / "draws.txt"))
        s.draws = static_cast<std::size_t>(parse_double(read_text_file(dir / "draws.txt"), "draws.txt"));
    return s;
}

void write_simulation_dir(const fs::path& dir, const GroundTruth& truth, const PhenotypeData* masked) {
    fs::create_directories(dir / "truth");
    const ScenarioSpec& spec = truth.spec;
    const Index n = truth.Y.rows(), p = truth.Y.cols();
    std::vector<std::string> ids, traits = numbered("t", p);
    for (Index m = 0; m < n; ++m)
        ids.push_back("s" + std::to_string(m / spec.n_offspring + 1) + "_o" + std::to_string(m % spec.n_offspring + 1));

    Matrix Y = truth.Y;
    if (masked) {
        for (Index i = 0; i < p; ++i)
            for (Index m = 0; m < n; ++m)
                if (masked->missing(m, i)) Y(m, i) = std::numeric_limits<double>::quiet_NaN();
    }
    write_csv(dir / "Y.csv", traits, Y, ids);
    write_csv(dir / "X.csv", {"intercept"}, truth.X, ids);
    write_csv(dir / "Z.csv", ids, Matrix::Identity(n, n), ids);
    if (truth.A.order() == n) {
        write_csv(dir / "A.csv", ids, truth.A.matrix(), ids);
    } else {
        write_csv(dir / "A.csv", ids, halfsib_relationship(spec.n_sires, spec.n_offspring).matrix(), ids);
    }

    const fs::path t = dir / "truth";
    const auto factors = numbered("f", truth.Lambda.cols());
    write_csv(t / "Lambda.csv", factors, truth.Lambda, traits);
    write_csv(t / "h2.csv", {"h2"}, truth.h2, factors);
    write_csv(t / "G.csv", traits, truth.G.matrix(), traits);
    write_csv(t / "R.csv", traits, truth.R.matrix(), traits);
    write_csv(t / "P.csv", traits, truth.P.matrix(), traits);
    Matrix psi(p, 2);
    psi << truth.psi_a, truth.psi_e;
    write_csv(t / "psi.csv", {"psi_a", "psi_e"}, psi, traits);
    Matrix sire(n, 1);
    for (Index m = 0; m < n; ++m) sire(m, 0) = static_cast<double>(truth.sire[static_cast<std::size_t>(m)] + 1);
    write_csv(t / "sire.csv", {"sire"}, sire, ids);
    if (masked) write_csv(t / "Y_complete.csv", traits, truth.Y, ids);

    std::ostringstream os;
    os << "id=" << spec.id << "\np=" << spec.p << "\nn_sires=" << spec.n_sires << "\nn_offspring=" << spec.n_offspring
       << "\nresidual=" << to_string(spec.residual) << "\nsupport_min=" << spec.support_min
       << "\nsupport_max=" << spec.support_max << "\nidiosyncratic_variance=" << format_double(spec.idiosyncratic_variance)
       << "\nseed=" << spec.seed << "\nfactor_h2=";
    for (std::size_t j = 0; j < spec.factor_h2.size(); ++j) os << (j ? " " : "") << format_double(spec.factor_h2[j]);
    os << '\n';
    write_text_file(t / "spec.txt", os.str());
}

TruthDirectory read_truth_dir(const fs::path& dir) {
    const fs::path t = fs::exists(dir / "truth") ? dir / "truth" : dir;
    if (!fs::exists(t / "spec.txt")) throw DataError("missing truth directory under " + dir.string());
    TruthDirectory out;
    const auto kv = parse_key_values(read_text_file(t / "spec.txt"));
    auto get = [&](const char* key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw DataError(t.string() + "/spec.txt: missing '" + key + "'");
        return it->second;
    };
    out.spec.id = get("id");
    out.spec.p = static_cast<Index>(parse_double(get("p"), "spec p"));
    out.spec.n_sires = static_cast<Index>(parse_double(get("n_sires"), "spec n_sires"));
    out.spec.n_offspring = static_cast<Index>(parse_double(get("n_offspring"), "spec n_offspring"));
    const std::string residual = get("residual");
    if (residual == "sparse-factor") out.spec.residual = ResidualType::SparseFactor;
    else if (residual == "factor") out.spec.residual = ResidualType::Factor;
    else if (residual == "wishart") out.spec.residual = ResidualType::Wishart;
    else throw DataError("unknown residual type '" + residual + "'");
    out.spec.support_min = static_cast<Index>(parse_double(get("support_min"), "spec support_min"));
    out.spec.support_max = static_cast<Index>(parse_double(get("support_max"), "spec support_max"));
    out.spec.idiosyncratic_variance = parse_double(get("idiosyncratic_variance"), "spec idiosyncratic_variance");
    out.spec.seed = static_cast<std::uint64_t>(parse_double(get("seed"), "spec seed"));
    std::istringstream hs(get("factor_h2"));
    for (std::string tok; hs >> tok;) out.spec.factor_h2.push_back(parse_double(tok, "spec factor_h2"));

    out.Lambda = read_csv(t / "Lambda.csv").values;
    out.h2 = read_csv(t / "h2.csv").values.col(0);
    out.G = SymmetricMatrix(read_csv(t / "G.csv").values);
    out.R = SymmetricMatrix(read_csv(t / "R.csv").values);
    out.P = SymmetricMatrix(read_csv(t / "P.csv").values);
    const CsvTable sire = read_csv(t / "sire.csv");
    for (Index m = 0; m < sire.values.rows(); ++m) out.sire.push_back(static_cast<Index>(sire.values(m, 0)) - 1);
    return out;
}

}  // namespace gfactor
