#include <algorithm>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "gfactor/csv.hpp"
#include "gfactor/error.hpp"
#include "gfactor_cli/cli.hpp"

namespace gfactor::cli {

namespace {

struct FitFlags {
    std::optional<std::string> config, phenotypes, design, incidence, kinship, pedigree, out, fitness_col;
    std::optional<long> iters, burnin, thin, checkpoint_interval;
    std::optional<std::uint64_t> seed;
    std::optional<int> chains;
    bool resume = false;
};

RunConfig resolve_fit_config(const FitFlags& f) {
    RunConfig cfg;
    cfg.chain.checkpoint_interval = 1000;
    if (f.config) apply_key_values(parse_key_values(read_text_file(*f.config)), cfg);
    if (f.phenotypes) cfg.phenotypes = *f.phenotypes;
    if (f.design) cfg.design = *f.design;
    if (f.incidence) cfg.incidence = *f.incidence;
    if (f.kinship) cfg.kinship = *f.kinship;
    if (f.pedigree) cfg.pedigree = *f.pedigree;
    if (f.out) cfg.out = *f.out;
    if (f.fitness_col) cfg.fitness_col = *f.fitness_col;
    if (f.iters) cfg.chain.total_iters = *f.iters;
    if (f.burnin) cfg.chain.burn_in = *f.burnin;
    if (f.thin) cfg.chain.thin = *f.thin;
    if (f.checkpoint_interval) cfg.chain.checkpoint_interval = *f.checkpoint_interval;
    if (f.seed) cfg.chain.seed = *f.seed;
    if (f.chains) cfg.chains = *f.chains;
    if (cfg.out.empty()) throw ConfigError("--out is required");
    cfg.validate();
    return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian genetic sparse factor model for G-matrix estimation", "gfactor"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate a half-sib scenario (a..j) with its truth");
    simulate->add_option("--scenario", sim.scenario, "Scenario id a..j")->required();
    simulate->add_option("--seed", sim.seed, "Random seed");
    simulate->add_option("--out", sim.out, "Output directory")->required();
    simulate->add_option("--mask-fraction", sim.mask_fraction, "Fraction of Y cells written as NA");

    FitFlags fit;
    auto* fitc = app.add_subcommand("fit", "Run the Gibbs sampler");
    fitc->add_option("--config", fit.config, "key = value settings file (flags override it)");
    fitc->add_option("--phenotypes", fit.phenotypes, "Y.csv: id column then traits; NA marks missing");
    fitc->add_option("--design", fit.design, "X.csv: id column then covariates (default intercept)");
    fitc->add_option("--incidence", fit.incidence, "Z.csv: id column then one column per kinship level");
    fitc->add_option("--kinship", fit.kinship, "A.csv: id column then one column per level");
    fitc->add_option("--pedigree", fit.pedigree, "pedigree.csv with columns id,sire,dam");
    fitc->add_option("--out", fit.out, "Output directory");
    fitc->add_option("--iters", fit.iters, "Total iterations");
    fitc->add_option("--burnin", fit.burnin, "Burn-in iterations");
    fitc->add_option("--thin", fit.thin, "Thinning interval");
    fitc->add_option("--chains", fit.chains, "Parallel chains");
    fitc->add_option("--seed", fit.seed, "Random seed");
    fitc->add_option("--checkpoint-interval", fit.checkpoint_interval, "Iterations between checkpoints (0 disables)");
    fitc->add_option("--fitness-col", fit.fitness_col, "Trait recorded as fitness in the provenance");
    fitc->add_flag("--resume", fit.resume, "Continue each chain from its checkpoint");

    SummarizeOptions sum;
    auto* summarize = app.add_subcommand("summarize", "Posterior means, HPD intervals and plot tables");
    summarize->add_option("--posterior", sum.posterior, "A chain directory written by fit")->required();
    summarize->add_option("--out", sum.out, "Output directory")->required();
    summarize->add_option("--fitness-col", sum.fitness_col, "Trait treated as fitness");

    EvaluateOptions ev;
    auto* evaluate = app.add_subcommand("evaluate", "Accuracy statistics against a simulation truth");
    evaluate->add_option("--truth", ev.truth, "Simulation directory (repeatable)")->required();
    evaluate->add_option("--summary", ev.summary, "Summary directory, paired with --truth")->required();
    evaluate->add_option("--out", ev.out, "Output directory")->required();

    try {
        std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "gfactor: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (simulate->parsed()) {
            simulate_command(sim);
        } else if (fitc->parsed()) {
            fit_command({resolve_fit_config(fit), fit.resume}, out);
        } else if (summarize->parsed()) {
            summarize_command(sum);
        } else if (evaluate->parsed()) {
            const auto reports = evaluate_command(ev);
            out << eval_csv_header() << '\n';
            for (const auto& r : reports) out << eval_csv_row(r) << '\n';
        }
    } catch (const ConfigError& e) {
        err << "gfactor: configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ParameterError& e) {
        err << "gfactor: configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalError& e) {
        err << "gfactor: numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const Error& e) {
        err << "gfactor: data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "gfactor: data error: " << e.what() << '\n';
        return kDataError;
    }
    return kOk;
}

}  // namespace gfactor::cli
