#include "gfactor/pedigree.hpp"

#include <algorithm>
#include <fstream>

#include "gfactor/csv.hpp"
#include "gfactor/error.hpp"

namespace gfactor {

Pedigree::Pedigree(std::vector<PedigreeRecord> records) : records_(std::move(records)) {
    index_.reserve(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) index_.emplace_back(records_[i].id, i);
    std::sort(index_.begin(), index_.end());
    for (std::size_t i = 1; i < index_.size(); ++i)
        if (index_[i].first == index_[i - 1].first)
            throw DataError("duplicate pedigree id '" + index_[i].first + "'");
    for (const auto& rec : records_) {
        for (const auto& parent : {rec.sire, rec.dam}) {
            if (parent && find(*parent) == npos)
                throw DataError("pedigree parent '" + *parent + "' of '" + rec.id + "' is not listed");
        }
    }
}

std::size_t Pedigree::find(const std::string& id) const {
    auto it = std::lower_bound(index_.begin(), index_.end(), id,
                               [](const auto& entry, const std::string& key) { return entry.first < key; });
    if (it == index_.end() || it->first != id) return npos;
    return it->second;
}

std::vector<std::size_t> Pedigree::topological_order() const {
    enum class Mark { None, Active, Done };
    std::vector<Mark> mark(records_.size(), Mark::None);
    std::vector<std::size_t> order;
    order.reserve(records_.size());

    // Iterative DFS; a node is emitted after both parents.
    for (std::size_t root = 0; root < records_.size(); ++root) {
        if (mark[root] != Mark::None) continue;
        std::vector<std::pair<std::size_t, int>> stack{{root, 0}};
        mark[root] = Mark::Active;
        while (!stack.empty()) {
            auto& [node, next_parent] = stack.back();
            if (next_parent < 2) {
                const auto& parent = next_parent == 0 ? records_[node].sire : records_[node].dam;
                ++next_parent;
                if (!parent) continue;
                const std::size_t pi = find(*parent);
                if (mark[pi] == Mark::Active)
                    throw DataError("pedigree cycle through '" + records_[pi].id + "'");
                if (mark[pi] == Mark::None) {
                    mark[pi] = Mark::Active;
                    stack.emplace_back(pi, 0);
                }
                continue;
            }
            mark[node] = Mark::Done;
            order.push_back(node);
            stack.pop_back();
        }
    }
    return order;
}

Pedigree read_pedigree_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open pedigree file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty pedigree file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    if (header.size() != 3 || header[0] != "id" || header[1] != "sire" || header[2] != "dam")
        throw DataError(path.string() + ":1: pedigree header must be id,sire,dam");
    std::vector<PedigreeRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() == 2) fields.emplace_back();
        if (fields.size() != 3 || fields[0].empty())
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected id,sire,dam");
        auto parent = [](const std::string& f) -> std::optional<std::string> {
            if (f.empty() || f == "0") return std::nullopt;
            return f;
        };
        records.push_back({fields[0], parent(fields[1]), parent(fields[2])});
    }
    return Pedigree(std::move(records));
}

SymmetricMatrix additive_relationship(const Pedigree& ped) {
    const auto order = ped.topological_order();
    const std::size_t n = order.size();
    // Work in topological positions, then permute back to record order.
    std::vector<std::size_t> pos(n);
    for (std::size_t k = 0; k < n; ++k) pos[order[k]] = k;
    std::vector<long> sire(n, -1), dam(n, -1);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& rec = ped.records()[order[k]];
        if (rec.sire) sire[k] = static_cast<long>(pos[ped.find(*rec.sire)]);
        if (rec.dam) dam[k] = static_cast<long>(pos[ped.find(*rec.dam)]);
    }

    Matrix a = Matrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Index ii = static_cast<Index>(i);
        const long s = sire[i], d = dam[i];
        for (std::size_t j = 0; j < i; ++j) {
            const Index jj = static_cast<Index>(j);
            double v = 0.0;
            if (s >= 0) v += 0.5 * a(jj, s);
            if (d >= 0) v += 0.5 * a(jj, d);
            a(ii, jj) = v;
            a(jj, ii) = v;
        }
        a(ii, ii) = (s >= 0 && d >= 0) ? 1.0 + 0.5 * a(s, d) : 1.0;
    }

    Matrix out(static_cast<Index>(n), static_cast<Index>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            out(static_cast<Index>(r), static_cast<Index>(c)) =
                a(static_cast<Index>(pos[r]), static_cast<Index>(pos[c]));
    return SymmetricMatrix(std::move(out));
}

Kinship a_matrix_from_pedigree(const Pedigree& ped) {
    std::vector<std::string> ids;
    ids.reserve(ped.size());
    for (const auto& rec : ped.records()) ids.push_back(rec.id);
    return Kinship(additive_relationship(ped), std::move(ids));
}

SymmetricMatrix halfsib_relationship(Index n_sires, Index n_offspring) {
    if (n_sires < 1 || n_offspring < 1) throw ParameterError("half-sib design needs at least one sire and offspring");
    const Index n = n_sires * n_offspring;
    Matrix a = Matrix::Zero(n, n);
    for (Index s = 0; s < n_sires; ++s) {
        a.block(s * n_offspring, s * n_offspring, n_offspring, n_offspring).setConstant(0.25);
    }
    a.diagonal().setOnes();
    return SymmetricMatrix(std::move(a));
}

Kinship halfsib_A(Index n_sires, Index n_offspring) {
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(n_sires * n_offspring));
    for (Index s = 0; s < n_sires; ++s)
        for (Index o = 0; o < n_offspring; ++o)
            ids.push_back("s" + std::to_string(s + 1) + "_o" + std::to_string(o + 1));
    return Kinship(halfsib_relationship(n_sires, n_offspring), std::move(ids));
}

Pedigree halfsib_pedigree(Index n_sires, Index n_offspring) {
    std::vector<PedigreeRecord> records;
    for (Index s = 0; s < n_sires; ++s) records.push_back({"sire" + std::to_string(s + 1), {}, {}});
    for (Index s = 0; s < n_sires; ++s)
        for (Index o = 0; o < n_offspring; ++o)
            records.push_back({"s" + std::to_string(s + 1) + "_o" + std::to_string(o + 1),
                               "sire" + std::to_string(s + 1), {}});
    return Pedigree(std::move(records));
}

}  // namespace gfactor
