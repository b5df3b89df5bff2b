#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "aml/serialize.hpp"
#include "oracles.hpp"

using namespace aml;

TEST_CASE("model json round-trip is bit-exact on upper sets") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 50; ++rep) {
        std::size_t nc = 1 + rng() % 70;  // cross the word boundary
        auto u = oracles::small_universe(nc);
        auto m = oracles::random_model(u, 30, rng);
        auto back = model_from_json(model_to_json(m));
        REQUIRE(back.size() == m.size());
        for (const auto& a : m.atoms()) REQUIRE(back.contains(a.upper));
        REQUIRE(back.universe()->names() == m.universe()->names());
    }
}

TEST_CASE("model json carries growth and birth statistics") {
    auto u = oracles::small_universe(4);
    AtomizedModel m(u);
    Atom a(4, {1, 3});
    a.growth = 7;
    a.birth = 42;
    m.add(a);
    auto j = model_to_json(m);
    CHECK(j["atoms"][0] == std::vector<std::uint32_t>{1, 3});
    CHECK(j["stats"][0][0] == 7);
    CHECK(j["stats"][0][1] == 42);
    auto back = model_from_json(j);
    CHECK(back.atom(0).growth == 7);
    CHECK(back.atom(0).birth == 42);
}

TEST_CASE("checkpoint round-trip") {
    auto u = oracles::small_universe(5);
    TrainState state;
    state.master = freest_empty_model(u);
    state.union_model = state.master;
    state.global_step = 123;
    state.batch_index = 9;
    TrainConfig cfg;
    cfg.simplification_threshold = 1.1;
    cfg.rng_seed = 777;

    auto dir = std::filesystem::temp_directory_path() / "aml_ckpt_test";
    std::filesystem::create_directories(dir);
    auto path = (dir / "ckpt.json").string();
    save_checkpoint(path, state, cfg);
    auto back = load_checkpoint(path);
    CHECK(back.state.global_step == 123);
    CHECK(back.state.batch_index == 9);
    CHECK(back.state.master.same_atoms(state.master));
    CHECK(back.state.union_model.same_atoms(state.union_model));
    CHECK(back.config.simplification_threshold == 1.1);
    CHECK(back.config.rng_seed == 777);
}

TEST_CASE("corrupt checkpoint raises a readable error") {
    auto dir = std::filesystem::temp_directory_path() / "aml_ckpt_test";
    std::filesystem::create_directories(dir);
    auto path = (dir / "bad.json").string();
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
    CHECK_THROWS_AS(load_checkpoint((dir / "missing.json").string()), std::runtime_error);
}

TEST_CASE("serialization is deterministic") {
    std::mt19937_64 rng(3);
    auto u = oracles::small_universe(9);
    auto m = oracles::random_model(u, 12, rng);
    CHECK(model_to_json(m).dump(2) == model_to_json(m).dump(2));
}

TEST_CASE("model json rejects out-of-range atoms") {
    json j;
    j["constants"] = {"a", "b"};
    j["atoms"] = {{0, 5}};
    j["stats"] = {{0, 0}};
    CHECK_THROWS_AS(model_from_json(j), std::runtime_error);
}
