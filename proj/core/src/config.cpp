#include "gfactor/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include "gfactor/csv.hpp"
#include "gfactor/error.hpp"

namespace gfactor {

void RunConfig::validate() const {
    if (phenotypes.empty()) throw ConfigError("a phenotype file is required");
    if (kinship.empty() == pedigree.empty()) throw ConfigError("supply exactly one of a kinship matrix or a pedigree");
    if (chains < 1) throw ConfigError("chains must be at least 1");
    hyper.validate();
    ChainConfig c = chain;
    if (c.checkpoint_path.empty()) c.checkpoint_path = "checkpoint.bin";
    c.validate();
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double to_real(const std::string& key, const std::string& v) {
    try {
        return parse_double(v, key);
    } catch (const DataError&) {
        throw ConfigError("setting '" + key + "' expects a number, got '" + v + "'");
    }
}

long to_integer(const std::string& key, const std::string& v) {
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("setting '" + key + "' expects an integer, got '" + v + "'");
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("setting '" + key + "' expects a non-negative integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("setting '" + key + "' expects true or false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto real = [&t](const char* key, double Hyperparameters::*field) {
            t[key] = [field](RunConfig& c, const std::string& k, const std::string& v) { c.hyper.*field = to_real(k, v); };
        };
        real("nu", &Hyperparameters::nu);
        real("a1", &Hyperparameters::a1);
        real("b1", &Hyperparameters::b1);
        real("a2", &Hyperparameters::a2);
        real("b2", &Hyperparameters::b2);
        real("a_g", &Hyperparameters::a_g);
        real("b_g", &Hyperparameters::b_g);
        real("a_r", &Hyperparameters::a_r);
        real("b_r", &Hyperparameters::b_r);
        real("b_prec", &Hyperparameters::b_prec);
        real("adapt_alpha0", &Hyperparameters::adapt_alpha0);
        real("adapt_alpha1", &Hyperparameters::adapt_alpha1);
        real("adapt_epsilon", &Hyperparameters::adapt_epsilon);
        t["n_h"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.hyper.n_h = static_cast<int>(to_integer(k, v)); };
        t["k_init"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.hyper.k_init = static_cast<int>(to_integer(k, v)); };
        t["k_max"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.hyper.k_max = static_cast<int>(to_integer(k, v)); };
        t["literal_phi_rate"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.hyper.literal_phi_rate = to_bool(k, v); };
        t["iters"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.chain.total_iters = to_integer(k, v); };
        t["burnin"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.chain.burn_in = to_integer(k, v); };
        t["thin"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.chain.thin = to_integer(k, v); };
        t["seed"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.chain.seed = to_unsigned(k, v); };
        t["checkpoint_interval"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.chain.checkpoint_interval = to_integer(k, v); };
        t["chains"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.chains = static_cast<int>(to_integer(k, v)); };
        t["phenotypes"] = [](RunConfig& c, const std::string&, const std::string& v) { c.phenotypes = v; };
        t["design"] = [](RunConfig& c, const std::string&, const std::string& v) { c.design = v; };
        t["incidence"] = [](RunConfig& c, const std::string&, const std::string& v) { c.incidence = v; };
        t["kinship"] = [](RunConfig& c, const std::string&, const std::string& v) { c.kinship = v; };
        t["pedigree"] = [](RunConfig& c, const std::string&, const std::string& v) { c.pedigree = v; };
        t["out"] = [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; };
        t["fitness_col"] = [](RunConfig& c, const std::string&, const std::string& v) { c.fitness_col = v; };
        return t;
    }();
    return table;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (kv.count(key)) throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

void apply_key_values(const std::map<std::string, std::string>& kv, RunConfig& cfg) {
    const auto& table = setters();
    for (const auto& [key, value] : kv) {
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError("unknown setting '" + key + "'");
        it->second(cfg, key, value);
    }
}

std::string to_key_values(const RunConfig& cfg) {
    const Hyperparameters& h = cfg.hyper;
    std::ostringstream os;
    auto real = [&os](const char* key, double v) { os << key << '=' << format_double(v) << '\n'; };
    real("nu", h.nu);
    real("a1", h.a1);
    real("b1", h.b1);
    real("a2", h.a2);
    real("b2", h.b2);
    os << "n_h=" << h.n_h << '\n';
    real("a_g", h.a_g);
    real("b_g", h.b_g);
    real("a_r", h.a_r);
    real("b_r", h.b_r);
    real("b_prec", h.b_prec);
    real("adapt_alpha0", h.adapt_alpha0);
    real("adapt_alpha1", h.adapt_alpha1);
    real("adapt_epsilon", h.adapt_epsilon);
    os << "k_init=" << h.k_init << '\n';
    os << "k_max=" << h.k_max << '\n';
    os << "literal_phi_rate=" << (h.literal_phi_rate ? "true" : "false") << '\n';
    os << "iters=" << cfg.chain.total_iters << '\n';
    os << "burnin=" << cfg.chain.burn_in << '\n';
    os << "thin=" << cfg.chain.thin << '\n';
    os << "seed=" << cfg.chain.seed << '\n';
    os << "checkpoint_interval=" << cfg.chain.checkpoint_interval << '\n';
    os << "chains=" << cfg.chains << '\n';
    os << "phenotypes=" << cfg.phenotypes.string() << '\n';
    os << "design=" << cfg.design.string() << '\n';
    os << "incidence=" << cfg.incidence.string() << '\n';
    os << "kinship=" << cfg.kinship.string() << '\n';
    os << "pedigree=" << cfg.pedigree.string() << '\n';
    os << "out=" << cfg.out.string() << '\n';
    os << "fitness_col=" << cfg.fitness_col << '\n';
    return os.str();
}

}  // namespace gfactor
