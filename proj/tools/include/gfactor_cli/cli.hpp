#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gfactor/config.hpp"
#include "gfactor/evaluate.hpp"
#include "gfactor/model.hpp"
#include "gfactor/simulate.hpp"

namespace gfactor::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kDataError = 3,
    kNumericalError = 4,
};

/// Parses `args` (program name first) and runs one subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SimulateOptions {
    std::string scenario;
    std::uint64_t seed = 1;
    std::filesystem::path out;
    double mask_fraction = 0.0;
};
void simulate_command(const SimulateOptions& opt);

/// Phenotypes, design, incidence and kinship as `fit` assembles them.
struct FitInputs {
    PhenotypeData data;
    Kinship kinship;
};
FitInputs load_fit_inputs(const RunConfig& cfg);

struct FitOptions {
    RunConfig config;
    bool resume = false;
};
/// Runs every chain (concurrently) and writes chain_<c>/ under config.out.
void fit_command(const FitOptions& opt, std::ostream& log);

struct SummarizeOptions {
    std::filesystem::path posterior;
    std::filesystem::path out;
    std::string fitness_col;
};
void summarize_command(const SummarizeOptions& opt);

struct EvaluateOptions {
    std::vector<std::filesystem::path> truth;
    std::vector<std::filesystem::path> summary;
    std::filesystem::path out;
};
std::vector<EvalReport> evaluate_command(const EvaluateOptions& opt);

/// Loading-matrix columns used for factor matching: the heritable factors
/// when the residual is not sparse-factor, otherwise every simulated factor.
std::vector<Index> matched_truth_factors(const ScenarioSpec& spec);

}  // namespace gfactor::cli
