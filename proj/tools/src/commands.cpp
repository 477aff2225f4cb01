#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "gfactor/checkpoint.hpp"
#include "gfactor/csv.hpp"
#include "gfactor/error.hpp"
#include "gfactor/kinship_basis.hpp"
#include "gfactor/pedigree.hpp"
#include "gfactor/posterior_io.hpp"
#include "gfactor_cli/cli.hpp"

namespace gfactor::cli {

namespace fs = std::filesystem;

void simulate_command(const SimulateOptions& opt) {
    ScenarioSpec spec = build_scenario(opt.scenario);
    spec.seed = opt.seed;
    RngStream rng(opt.seed, 0);
    const GroundTruth truth = simulate(spec, rng);
    if (opt.mask_fraction > 0.0) {
        const PhenotypeData masked = mask_entries(truth, opt.mask_fraction, rng);
        write_simulation_dir(opt.out, truth, &masked);
    } else {
        write_simulation_dir(opt.out, truth);
    }
}

namespace {

void require_same_ids(const std::vector<std::string>& expected, const std::vector<std::string>& got,
                      const fs::path& file) {
    if (got.size() != expected.size())
        throw DataError(file.string() + ": has " + std::to_string(got.size()) + " rows, phenotypes have " +
                        std::to_string(expected.size()));
    for (std::size_t i = 0; i < got.size(); ++i)
        if (got[i] != expected[i])
            throw DataError(file.string() + ":" + std::to_string(i + 2) + ": id '" + got[i] + "' does not match phenotype id '" +
                            expected[i] + "'");
}

Kinship load_kinship(const RunConfig& cfg) {
    if (!cfg.pedigree.empty()) return a_matrix_from_pedigree(read_pedigree_csv(cfg.pedigree));
    const CsvTable t = read_csv(cfg.kinship);
    const Index r = t.values.rows();
    if (t.values.cols() != r) throw DataError(cfg.kinship.string() + ": kinship matrix is not square");
    if (t.columns != t.row_ids) throw DataError(cfg.kinship.string() + ": column ids must match row ids");
    const double scale = std::max(1.0, t.values.cwiseAbs().maxCoeff());
    if ((t.values - t.values.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw DataError(cfg.kinship.string() + ": kinship matrix is not symmetric");
    return Kinship(SymmetricMatrix(t.values), t.row_ids);
}

std::vector<std::pair<Index, Index>> missing_cells_of(const PhenotypeData& d) {
    std::vector<std::pair<Index, Index>> cells;
    for (Index i = 0; i < d.p(); ++i)
        for (Index m = 0; m < d.n(); ++m)
            if (d.missing(m, i)) cells.emplace_back(m, i);
    return cells;
}

std::string hex(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

FitInputs load_fit_inputs(const RunConfig& cfg) {
    FitInputs in;
    PhenotypeData& d = in.data;
    const CsvTable y = read_csv(cfg.phenotypes, {.id_column = true, .allow_na = true});
    if (y.values.rows() == 0) throw DataError(cfg.phenotypes.string() + ": no individuals");
    d.Y = y.values;
    d.missing = y.missing;
    for (Index i = 0; i < d.Y.size(); ++i)
        if (d.missing.data()[i]) d.Y.data()[i] = 0.0;
    d.trait_names = y.columns;
    d.individual_ids = y.row_ids;
    const Index n = d.n();

    if (!cfg.design.empty()) {
        const CsvTable x = read_csv(cfg.design);
        require_same_ids(d.individual_ids, x.row_ids, cfg.design);
        d.X = x.values;
    } else {
        d.X = Matrix::Ones(n, 1);
    }

    in.kinship = load_kinship(cfg);
    const auto& ids = in.kinship.ids();
    std::unordered_map<std::string, Index> level_of;
    for (std::size_t l = 0; l < ids.size(); ++l) level_of.emplace(ids[l], static_cast<Index>(l));
    d.levels = in.kinship.order();

    if (!cfg.incidence.empty()) {
        const CsvTable z = read_csv(cfg.incidence);
        require_same_ids(d.individual_ids, z.row_ids, cfg.incidence);
        Matrix Z = Matrix::Zero(n, d.levels);
        for (std::size_t c = 0; c < z.columns.size(); ++c) {
            const auto it = level_of.find(z.columns[c]);
            if (it == level_of.end())
                throw DataError(cfg.incidence.string() + ":1: column '" + z.columns[c] + "' is not a kinship id");
            Z.col(it->second) = z.values.col(static_cast<Index>(c));
        }
        d.set_incidence(Z);
    } else {
        d.level.resize(static_cast<std::size_t>(n));
        for (Index m = 0; m < n; ++m) {
            const auto it = level_of.find(d.individual_ids[static_cast<std::size_t>(m)]);
            if (it == level_of.end())
                throw DataError(cfg.phenotypes.string() + ":" + std::to_string(m + 2) + ": individual '" +
                                d.individual_ids[static_cast<std::size_t>(m)] + "' is not in the kinship or pedigree");
            d.level[static_cast<std::size_t>(m)] = it->second;
        }
    }
    d.validate();
    return in;
}

void fit_command(const FitOptions& opt, std::ostream& log) {
    const RunConfig& cfg = opt.config;
    cfg.validate();
    const FitInputs in = load_fit_inputs(cfg);
    if (!cfg.fitness_col.empty() &&
        std::find(in.data.trait_names.begin(), in.data.trait_names.end(), cfg.fitness_col) == in.data.trait_names.end())
        throw ConfigError("fitness column '" + cfg.fitness_col + "' is not a phenotype column");

    const auto basis = std::make_shared<const KinshipBasis>(in.kinship, in.data.level, in.data.n());
    const auto missing = missing_cells_of(in.data);
    RunConfig recorded = cfg;
    recorded.out.clear();
    const std::string settings = to_key_values(recorded);

    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(cfg.chains));
    std::mutex log_mutex;
    auto run_one = [&](int c) {
        try {
            const fs::path dir = cfg.out / ("chain_" + std::to_string(c + 1));
            fs::create_directories(dir);
            ChainConfig cc = cfg.chain;
            cc.stream = static_cast<std::uint64_t>(c);
            cc.checkpoint_path = dir / "checkpoint.bin";
            const std::uint64_t digest = provenance_digest(in.data, in.kinship, cfg.hyper, cc);

            std::optional<ChainRunner> runner;
            if (opt.resume && fs::exists(cc.checkpoint_path)) {
                const Checkpoint cp = load_checkpoint(cc.checkpoint_path);
                if (cp.samples.provenance_digest != digest)
                    throw DataError(cc.checkpoint_path.string() + ": checkpoint was written for different inputs or settings");
                runner.emplace(in.data, basis, cfg.hyper, cc, cp);
            } else {
                runner.emplace(in.data, basis, cfg.hyper, cc);
                runner->set_provenance_digest(digest);
            }
            runner->run();
            const PosteriorSamples samples = runner->take_samples();
            const std::string provenance =
                "digest=" + hex(digest) + "\nchain=" + std::to_string(c + 1) + "\nstream=" + std::to_string(cc.stream) + "\n" + settings;
            write_posterior_dir(dir, samples, in.data.trait_names, missing, provenance);
            std::lock_guard<std::mutex> lock(log_mutex);
            log << "chain " << c + 1 << ": " << samples.size() << " draws, k = " << samples.draws.back().Lambda.cols()
                << ", written to " << dir.string() << '\n';
        } catch (...) {
            failures[static_cast<std::size_t>(c)] = std::current_exception();
        }
    };

    if (cfg.chains == 1) {
        run_one(0);
    } else {
        std::vector<std::thread> threads;
        for (int c = 0; c < cfg.chains; ++c) threads.emplace_back(run_one, c);
        for (auto& t : threads) t.join();
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
}

void summarize_command(const SummarizeOptions& opt) {
    std::vector<std::pair<fs::path, fs::path>> jobs;
    if (fs::exists(opt.posterior / "h2.csv")) {
        jobs.emplace_back(opt.posterior, opt.out);
    } else {
        for (int c = 1; fs::exists(opt.posterior / ("chain_" + std::to_string(c))); ++c)
            jobs.emplace_back(opt.posterior / ("chain_" + std::to_string(c)), opt.out / ("chain_" + std::to_string(c)));
    }
    if (jobs.empty()) throw DataError("empty posterior directory: " + opt.posterior.string());
    for (const auto& [src, dst] : jobs) {
        const PosteriorDirectory post = read_posterior_dir(src);
        std::optional<Index> fitness;
        if (!opt.fitness_col.empty()) {
            const auto it = std::find(post.trait_names.begin(), post.trait_names.end(), opt.fitness_col);
            if (it == post.trait_names.end()) throw ConfigError("fitness column '" + opt.fitness_col + "' is not a trait");
            fitness = static_cast<Index>(it - post.trait_names.begin());
        }
        write_summary_dir(dst, summarize_draws(post, fitness), post);
    }
}

std::vector<Index> matched_truth_factors(const ScenarioSpec& spec) {
    std::vector<Index> cols;
    for (Index j = 0; j < spec.n_factors(); ++j)
        if (spec.residual == ResidualType::SparseFactor || spec.factor_h2[static_cast<std::size_t>(j)] > 0.0) cols.push_back(j);
    return cols;
}

std::vector<EvalReport> evaluate_command(const EvaluateOptions& opt) {
    if (opt.truth.size() != opt.summary.size())
        throw ConfigError("--truth and --summary must be given the same number of times");
    std::vector<EvalReport> reports;
    std::ostringstream matches;
    matches << "replicate,true_factor,estimated_factor,angle_degrees,true_h2,estimated_h2\n";
    for (std::size_t r = 0; r < opt.truth.size(); ++r) {
        const TruthDirectory truth = read_truth_dir(opt.truth[r]);
        const fs::path complete = opt.truth[r] / "truth" / "Y_complete.csv";
        const CsvTable y = read_csv(fs::exists(complete) ? complete : opt.truth[r] / "Y.csv");
        const PosteriorSummary s = read_summary_dir(opt.summary[r]);
        const auto cols = matched_truth_factors(truth.spec);

        EvalInputs in;
        in.replicate = opt.truth[r].filename().string();
        if (in.replicate.empty()) in.replicate = opt.truth[r].parent_path().filename().string();
        in.G_true = truth.G;
        in.P_true = truth.P;
        in.Lambda_true.resize(truth.Lambda.rows(), static_cast<Index>(cols.size()));
        in.factor_h2_true.resize(static_cast<Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) {
            in.Lambda_true.col(static_cast<Index>(c)) = truth.Lambda.col(cols[c]);
            in.factor_h2_true(static_cast<Index>(c)) = truth.h2(cols[c]);
        }
        in.G_hat = s.G;
        in.P_hat = s.P;
        in.Lambda_hat = s.Lambda;
        in.factor_h2_hat = s.factor_h2;
        in.Y = y.values;
        in.sire = truth.sire;
        in.k_G = truth.spec.krzanowski_k_G();
        in.k_G_genetic = truth.spec.n_genetic_factors();
        in.k_P = truth.spec.krzanowski_k_P();
        EvalReport rep = evaluate(in);
        for (std::size_t m = 0; m < rep.factor_match.size(); ++m) {
            const auto& fm = rep.factor_match[m];
            matches << rep.replicate << ",f" << cols[static_cast<std::size_t>(fm.true_index)] + 1 << ",f"
                    << fm.estimated_index + 1 << ',' << format_double(fm.angle_degrees) << ','
                    << format_double(in.factor_h2_true(fm.true_index)) << ',' << format_double(rep.matched_h2[m]) << '\n';
        }
        reports.push_back(std::move(rep));
    }

    std::ostringstream csv;
    csv << eval_csv_header() << '\n';
    for (const auto& r : reports) csv << eval_csv_row(r) << '\n';
    write_text_file(opt.out / "eval.csv", csv.str());
    write_text_file(opt.out / "factor_matches.csv", matches.str());

    nlohmann::ordered_json summary;
    summary["replicates"] = reports.size();
    auto stat = [&](const char* name, auto getter) {
        std::vector<double> v;
        for (const auto& r : reports) v.push_back(static_cast<double>(getter(r)));
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        const double med = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
        summary["metrics"][name] = {{"median", med}, {"min", v.front()}, {"max", v.back()}};
    };
    stat("frobenius_moments", [](const EvalReport& r) { return r.frobenius_moments; });
    stat("frobenius_posterior", [](const EvalReport& r) { return r.frobenius_posterior; });
    stat("krzanowski_G", [](const EvalReport& r) { return r.krzanowski_G; });
    stat("krzanowski_G_genetic", [](const EvalReport& r) { return r.krzanowski_G_genetic; });
    stat("krzanowski_P", [](const EvalReport& r) { return r.krzanowski_P; });
    stat("n_large_factors", [](const EvalReport& r) { return r.n_large_factors; });
    stat("h2_rmse", [](const EvalReport& r) { return r.h2_rmse; });
    stat("median_angle", [](const EvalReport& r) { return r.median_angle; });
    write_text_file(opt.out / "eval_summary.json", summary.dump(2) + "\n");
    return reports;
}

}  // namespace gfactor::cli
