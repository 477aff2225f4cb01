#include <filesystem>
#include <set>

#include "doctest.h"
#include "gfactor/chain.hpp"
#include "gfactor/checkpoint.hpp"
#include "gfactor/error.hpp"
#include "oracles.hpp"
#include "toy.hpp"

using namespace gfactor;
using namespace gfactor::testing;

namespace {

Toy chain_toy(double missing = 0.1) {
    ToyShape shape;
    shape.n_sires = 3;
    shape.n_offspring = 4;
    shape.p = 4;
    shape.missing_fraction = missing;
    Toy toy = make_toy(shape, 77);
    toy.hyper.k_init = 3;
    return toy;
}

ChainConfig short_config(long iters, long burn, long thin, std::uint64_t seed = 5) {
    ChainConfig c;
    c.total_iters = iters;
    c.burn_in = burn;
    c.thin = thin;
    c.seed = seed;
    return c;
}

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("gfactor_chain_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("chain") {
    TEST_CASE("default run length keeps 1000 thinned draws") {
        const ChainConfig defaults;
        CHECK(defaults.total_iters == 12000);
        CHECK(defaults.burn_in == 10000);
        CHECK(defaults.thin == 2);
        CHECK(defaults.draw_count() == 1000);
        const Toy toy = chain_toy();
        const PosteriorSamples s = run_chain(toy.data, toy.kinship, toy.hyper, defaults);
        REQUIRE(s.size() == 1000);
        CHECK(s.draws.front().iteration == 10001);
        CHECK(s.draws.back().iteration == 11999);
        for (const auto& d : s.draws) REQUIRE(d.Lambda.cols() == s.draws.front().Lambda.cols());
    }

    TEST_CASE("configuration validation") {
        CHECK_THROWS_AS(short_config(10, 10, 1).validate(), ConfigError);
        CHECK_THROWS_AS(short_config(10, 5, 0).validate(), ConfigError);
        CHECK_THROWS_AS(short_config(10, 5, 6).validate(), ConfigError);
        ChainConfig c = short_config(10, 5, 1);
        c.checkpoint_interval = 2;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        CHECK(short_config(10, 5, 5).draw_count() == 1);
    }

    TEST_CASE("identical seeds give bit-identical samples; different seeds do not") {
        const Toy toy = chain_toy();
        const auto a = run_chain(toy.data, toy.kinship, toy.hyper, short_config(300, 100, 2));
        const auto b = run_chain(toy.data, toy.kinship, toy.hyper, short_config(300, 100, 2));
        const auto c = run_chain(toy.data, toy.kinship, toy.hyper, short_config(300, 100, 2, 6));
        CHECK(a.content_digest() == b.content_digest());
        CHECK(a.provenance_digest == b.provenance_digest);
        CHECK(a.content_digest() != c.content_digest());
        CHECK(a.provenance_digest != c.provenance_digest);
    }

    TEST_CASE("structural invariants hold at every stored draw") {
        const Toy toy = chain_toy();
        auto basis = std::make_shared<const KinshipBasis>(toy.kinship, toy.data.level, toy.data.n());
        ChainRunner runner(toy.data, basis, toy.hyper, short_config(1500, 500, 1));
        std::size_t checked = 0;
        bool ok = true;
        runner.on_iteration = [&](long t, const GibbsSampler& s) {
            const InvariantReport rep = check_invariants(s.state());
            if (t >= 500) ++checked;
            ok = ok && rep.ok() && s.state().imputed.allFinite();
        };
        runner.run();
        CHECK(ok);
        CHECK(checked == runner.samples().size());
        for (const auto& d : runner.samples().draws) {
            const Vector idx = d.h2 * toy.hyper.n_h;
            REQUIRE((idx.array() - idx.array().round()).abs().maxCoeff() < 1e-9);
        }
    }

    TEST_CASE("k stays fixed after burn-in and adaptation moves it during burn-in") {
        const Toy toy = chain_toy(0.0);
        auto basis = std::make_shared<const KinshipBasis>(toy.kinship, toy.data.level, toy.data.n());
        Hyperparameters hyper = toy.hyper;
        hyper.adapt_alpha1 = 0;
        ChainRunner runner(toy.data, basis, hyper, short_config(400, 200, 1));
        std::set<Index> burn_k, post_k;
        runner.on_iteration = [&](long t, const GibbsSampler& s) {
            (t < 200 ? burn_k : post_k).insert(s.state().k_star());
        };
        runner.run();
        CHECK(burn_k.size() > 1);
        CHECK(post_k.size() == 1);
    }

    TEST_CASE("stored loadings are sign aligned") {
        const Matrix L{{-3.0, 1.0}, {1.0, -0.5}};
        const Matrix A = sign_align_columns(L);
        CHECK(A.col(0) == -L.col(0));
        CHECK(A.col(1) == L.col(1));
    }

    TEST_CASE("resuming from a checkpoint is bit-exact") {
        const Toy toy = chain_toy();
        const auto dir = temp_dir("resume");
        ChainConfig config = short_config(400, 150, 2);
        const auto full = run_chain(toy.data, toy.kinship, toy.hyper, config);

        config.checkpoint_interval = 100;
        config.checkpoint_path = dir / "cp.bin";
        auto basis = std::make_shared<const KinshipBasis>(toy.kinship, toy.data.level, toy.data.n());
        {
            ChainRunner first(toy.data, basis, toy.hyper, config);
            first.run_until(250);
        }
        const Checkpoint cp = load_checkpoint(config.checkpoint_path);
        CHECK(cp.next_iteration == 200);
        ChainRunner resumed(toy.data, basis, toy.hyper, config, cp);
        resumed.run();
        CHECK(resumed.samples().content_digest() == full.content_digest());
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("a checkpoint from another seed or data set is refused") {
        const Toy toy = chain_toy();
        auto basis = std::make_shared<const KinshipBasis>(toy.kinship, toy.data.level, toy.data.n());
        ChainRunner runner(toy.data, basis, toy.hyper, short_config(50, 10, 1));
        runner.run_until(20);
        const Checkpoint cp = runner.checkpoint();
        CHECK_THROWS_AS(ChainRunner(toy.data, basis, toy.hyper, short_config(50, 10, 1, 9), cp), DataError);
        PhenotypeData other = toy.data;
        other.Y(0, 0) += 1.0;
        other.missing(0, 0) = false;
        CHECK_THROWS_AS(ChainRunner(other, basis, toy.hyper, short_config(50, 10, 1), cp), DataError);
        CHECK_THROWS_AS(ChainRunner(toy.data, basis, toy.hyper, short_config(15, 10, 1), cp), DataError);
    }

    TEST_CASE("provenance digest tracks data and settings but not masked values") {
        const Toy toy = chain_toy(0.2);
        const ChainConfig c = short_config(100, 50, 1);
        const auto base = provenance_digest(toy.data, toy.kinship, toy.hyper, c);
        PhenotypeData masked_change = toy.data;
        for (Index i = 0; i < masked_change.Y.size(); ++i)
            if (masked_change.missing.data()[i]) masked_change.Y.data()[i] = 123.0;
        CHECK(provenance_digest(masked_change, toy.kinship, toy.hyper, c) == base);
        PhenotypeData observed_change = toy.data;
        observed_change.Y(0, 0) += 1e-9;
        CHECK(provenance_digest(observed_change, toy.kinship, toy.hyper, c) != base);
        Hyperparameters h = toy.hyper;
        h.nu = 4;
        CHECK(provenance_digest(toy.data, toy.kinship, h, c) != base);
    }

    TEST_CASE("posterior means need draws") {
        const PosteriorSamples empty;
        CHECK_THROWS_AS(empty.mean_G(), InsufficientDataError);
        CHECK_THROWS_AS(empty.mean_Lambda(), InsufficientDataError);
    }
}
