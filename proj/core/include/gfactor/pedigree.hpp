#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gfactor/model.hpp"

namespace gfactor {

struct PedigreeRecord {
    std::string id;
    std::optional<std::string> sire;
    std::optional<std::string> dam;
};

/// Individuals with (possibly unknown) parents. Records may appear in any
/// order; parents must either be present in the pedigree or unknown.
class Pedigree {
public:
    Pedigree() = default;
    /// Throws DataError on duplicate ids or references to absent parents.
    explicit Pedigree(std::vector<PedigreeRecord> records);

    std::size_t size() const { return records_.size(); }
    const std::vector<PedigreeRecord>& records() const { return records_; }

    /// Indices ordered so parents precede offspring. Throws DataError naming
    /// an individual on a cycle.
    std::vector<std::size_t> topological_order() const;

    /// Index of `id`, or npos.
    std::size_t find(const std::string& id) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<PedigreeRecord> records_;
    std::vector<std::pair<std::string, std::size_t>> index_;  // sorted by id
};

/// CSV with header `id,sire,dam`; `0` or an empty field marks an unknown parent.
Pedigree read_pedigree_csv(const std::filesystem::path& path);

/// Tabular-method additive relationship matrix, rows in pedigree record order.
/// Unknown parents are unrelated, non-inbred founders.
SymmetricMatrix additive_relationship(const Pedigree& ped);

/// Same, wrapped as a factored Kinship with ids attached.
Kinship a_matrix_from_pedigree(const Pedigree& ped);

/// Block-diagonal A for a paternal half-sib design: n_sires families of
/// n_offspring each, 1 on the diagonal and 0.25 within a family.
Kinship halfsib_A(Index n_sires, Index n_offspring);
SymmetricMatrix halfsib_relationship(Index n_sires, Index n_offspring);

/// Explicit pedigree of the half-sib design: sires first (founders), then
/// offspring with a known sire and unknown dam.
Pedigree halfsib_pedigree(Index n_sires, Index n_offspring);

}  // namespace gfactor
