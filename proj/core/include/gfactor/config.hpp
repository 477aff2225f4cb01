#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "gfactor/chain.hpp"
#include "gfactor/model.hpp"

namespace gfactor {

/// Everything `fit` needs.
struct RunConfig {
    Hyperparameters hyper;
    ChainConfig chain;
    std::filesystem::path phenotypes;
    std::filesystem::path design;     ///< optional; intercept only when empty
    std::filesystem::path incidence;  ///< optional; ids matched to kinship levels when empty
    std::filesystem::path kinship;
    std::filesystem::path pedigree;
    std::filesystem::path out;
    int chains = 1;
    std::string fitness_col;

    /// Exactly one of kinship / pedigree, a phenotype path, chains >= 1, and
    /// valid hyperparameters and chain settings. Throws ConfigError.
    void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError on syntax errors.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Applies known keys to `cfg`; throws ConfigError on unknown keys or bad values.
void apply_key_values(const std::map<std::string, std::string>& kv, RunConfig& cfg);

/// Canonical `key=value` listing of every setting, defaults included.
std::string to_key_values(const RunConfig& cfg);

}  // namespace gfactor
