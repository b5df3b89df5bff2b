#include <catch2/catch_amalgamated.hpp>

#include "aml/crossing.hpp"
#include "aml/sparse.hpp"
#include "oracles.hpp"

using namespace aml;

namespace {

AxiomSet to_axiom_set(std::size_t nc, const std::vector<Duple>& duples) {
    AxiomSet ax(nc);
    for (const auto& d : duples) ax.add(d);
    return ax;
}

std::vector<Bitset> constant_traces(const detail::Workspace& ws, std::size_t nc,
                                    std::size_t dual_size) {
    std::vector<Bitset> out(nc, Bitset::full(dual_size));
    for (std::uint32_t i = 0; i < ws.atoms.size(); ++i) {
        if (!ws.alive[i]) continue;
        ws.atoms[i].upper.for_each([&](std::size_t c) { out[c] &= ws.traces[i]; });
    }
    return out;
}

bool trace_constraints_hold(const detail::Workspace& ws, const AxiomSet& ax,
                            const Batch& batch, const Dual& dual) {
    std::vector<const Atom*> alive;
    std::vector<const Bitset*> traces;
    for (std::uint32_t i = 0; i < ws.atoms.size(); ++i)
        if (ws.alive[i]) {
            alive.push_back(&ws.atoms[i]);
            traces.push_back(&ws.traces[i]);
        }
    auto term_trace = [&](const Term& t) {
        Bitset tr = Bitset::full(dual.size());
        for (std::size_t i = 0; i < alive.size(); ++i)
            if (alive[i]->upper.intersects(t.constants())) tr &= *traces[i];
        return tr;
    };
    for (auto id : batch.duple_ids) {
        const auto& e = ax.entry(id);
        bool sub = term_trace(ax.term(e.right)).subset_of(term_trace(ax.term(e.left)));
        if (e.sign == Sign::Positive && !sub) return false;
        if (e.sign == Sign::Negative && sub) return false;
    }
    return true;
}

/// Upper set expressible as a union of freest-model atoms contained in it.
bool union_of_freest_atoms(const Bitset& upper, const AtomizedModel& freest) {
    Bitset cover(upper.size());
    for (const auto& a : freest.atoms())
        if (a.upper.subset_of(upper)) cover |= a.upper;
    return cover == upper;
}

} // namespace

TEST_CASE("trace constraints: satisfied model needs no additions") {
    std::mt19937_64 rng(101);
    // the freest empty model satisfies the constraints of any consistent set
    for (int rep = 0; rep < 80; ++rep) {
        std::size_t nc = 2 + rng() % 7;
        auto axioms = oracles::random_consistent_axioms(nc, 1 + rng() % 6, rng() % 5, rng);
        AxiomSet ax = to_axiom_set(nc, axioms);
        Batch batch = full_batch(ax);
        Dual dual = build_dual({}, ax, batch);
        detail::Workspace ws;
        ws.init(freest_empty_model(oracles::small_universe(nc)).atoms(), dual);
        auto lambda = enforce_trace_constraints(ws, ax, batch, dual, rng);
        CHECK(lambda.empty());
        CHECK(trace_constraints_hold(ws, ax, batch, dual));
    }
}

TEST_CASE("trace constraints: degenerate model gets singleton repairs") {
    // two constants, negative a ≰ b, model whose only atom cannot separate
    AxiomSet ax(2);
    ax.add_negative(Term(2, {0}), Term(2, {1}));
    Batch batch = full_batch(ax);
    Dual dual = build_dual({}, ax, batch);

    detail::Workspace ws;
    std::vector<Atom> degenerate{Atom(2, {0, 1})};
    ws.init(degenerate, dual);
    std::mt19937_64 rng(5);
    auto lambda = enforce_trace_constraints(ws, ax, batch, dual, rng);
    REQUIRE_FALSE(lambda.empty());
    for (const auto& a : lambda) CHECK(a.size() == 1);
    CHECK(trace_constraints_hold(ws, ax, batch, dual));
}

TEST_CASE("trace constraints: random models always repaired with singletons") {
    std::mt19937_64 rng(303);
    for (int rep = 0; rep < 150; ++rep) {
        std::size_t nc = 2 + rng() % 7;
        auto axioms = oracles::random_consistent_axioms(nc, 1 + rng() % 6, rng() % 5, rng);
        AxiomSet ax = to_axiom_set(nc, axioms);
        Batch batch = full_batch(ax);
        auto model = oracles::random_model(oracles::small_universe(nc), 10, rng);

        // union atoms must be consistent with the batch positives
        std::vector<Atom> pins;
        for (const auto& a : model.atoms()) {
            bool ok = true;
            for (const auto& d : axioms)
                if (d.sign == Sign::Positive && atom_discriminates(a, d.left, d.right))
                    ok = false;
            if (ok) pins.push_back(a);
        }
        Dual dual = build_dual(pins, ax, batch);
        detail::Workspace ws;
        ws.init(model.atoms(), dual);
        auto lambda = enforce_trace_constraints(ws, ax, batch, dual, rng);
        for (const auto& a : lambda) REQUIRE(a.size() == 1);
        REQUIRE(trace_constraints_hold(ws, ax, batch, dual));
    }
}

TEST_CASE("trace constraints: shared-constant fallback instance") {
    // M = {φ[a], φ[x,b]}, R+ = {a⊙x ≤ b⊙x}, R- = {a ≰ b}: the only fixing
    // constant for the positive constraint is x, shared by both sides
    AxiomSet ax(3);  // a=0, b=1, x=2
    ax.add_positive(Term(3, {0, 2}), Term(3, {1, 2}));
    ax.add_negative(Term(3, {0}), Term(3, {1}));
    Batch batch = full_batch(ax);
    Dual dual = build_dual({}, ax, batch);

    detail::Workspace ws;
    std::vector<Atom> model{Atom(3, {0}), Atom(3, {2, 1})};
    ws.init(model, dual);
    std::mt19937_64 rng(1);
    auto lambda = enforce_trace_constraints(ws, ax, batch, dual, rng);
    CHECK(trace_constraints_hold(ws, ax, batch, dual));
    bool has_x = false;
    for (const auto& a : lambda) has_x |= a.upper.test(2);
    CHECK(has_x);
}

TEST_CASE("sparse crossing satisfies the positives and keeps constant traces") {
    std::mt19937_64 rng(909);
    for (int rep = 0; rep < 120; ++rep) {
        std::size_t nc = 2 + rng() % 7;
        auto axioms = oracles::random_consistent_axioms(nc, 1 + rng() % 8, rng() % 6, rng);
        AxiomSet ax = to_axiom_set(nc, axioms);
        Batch batch = full_batch(ax);
        Dual dual = build_dual({}, ax, batch);

        detail::Workspace ws;
        ws.init(freest_empty_model(oracles::small_universe(nc)).atoms(), dual);
        enforce_trace_constraints(ws, ax, batch, dual, rng);
        auto before = constant_traces(ws, nc, dual.size());

        std::uint64_t step = 0;
        sparse_cross_batch(ws, ax, batch.positives(ax), dual, 1.5, rng, step);
        auto after = constant_traces(ws, nc, dual.size());
        for (std::size_t c = 0; c < nc; ++c) REQUIRE(before[c] == after[c]);

        auto master = ws.to_model(oracles::small_universe(nc));
        for (const auto& d : axioms) REQUIRE(satisfies(master, d));
        CHECK(step == batch.positives(ax).size());
    }
}

TEST_CASE("sparse crossing on a satisfied duple changes nothing") {
    AxiomSet ax(3);
    ax.add_positive(Term(3, {2}), Term(3, {2, 1}));  // c ≤ c⊙b holds everywhere
    Batch batch = full_batch(ax);
    Dual dual = build_dual({}, ax, batch);
    detail::Workspace ws;
    ws.init(freest_empty_model(oracles::small_universe(3)).atoms(), dual);
    std::mt19937_64 rng(2);
    std::uint64_t step = 0;
    sparse_cross_batch(ws, ax, batch.positives(ax), dual, 1.5, rng, step);
    CHECK(ws.live == 3);
}

TEST_CASE("sparse atoms are unions of full-crossing atoms") {
    std::mt19937_64 rng(414);
    for (int rep = 0; rep < 80; ++rep) {
        std::size_t nc = 2 + rng() % 7;
        auto axioms = oracles::random_consistent_axioms(nc, 1 + rng() % 8, rng() % 6, rng);
        AxiomSet ax = to_axiom_set(nc, axioms);
        std::vector<Duple> positives;
        for (const auto& d : axioms)
            if (d.sign == Sign::Positive) positives.push_back(d);

        TrainConfig cfg;
        cfg.full_batch = true;
        cfg.max_batches = 1;
        cfg.rng_seed = rng();
        auto state = train(oracles::small_universe(nc), ax, cfg);

        auto freest = freest_model(oracles::small_universe(nc), positives);
        for (const auto& a : state.master.atoms())
            REQUIRE(union_of_freest_atoms(a.upper, freest));
        for (const auto& d : axioms) REQUIRE(satisfies(state.master, d));
    }
}

TEST_CASE("replacement unions inherit growth counts") {
    AxiomSet ax(3);
    ax.add_positive(Term(3, {0}), Term(3, {1}));
    ax.add_negative(Term(3, {2}), Term(3, {0}));
    Batch batch = full_batch(ax);
    Dual dual = build_dual({}, ax, batch);
    detail::Workspace ws;
    ws.init(freest_empty_model(oracles::small_universe(3)).atoms(), dual);
    std::mt19937_64 rng(7);
    enforce_trace_constraints(ws, ax, batch, dual, rng);
    std::uint64_t step = 5;
    sparse_cross_batch(ws, ax, batch.positives(ax), dual, 1.5, rng, step);
    for (std::uint32_t i = 0; i < ws.atoms.size(); ++i) {
        if (!ws.alive[i]) continue;
        if (ws.atoms[i].size() > 1) {
            CHECK(ws.atoms[i].growth == 1);
            CHECK(ws.atoms[i].birth == 6);
        }
    }
}

TEST_CASE("simplification preserves constant traces and the size bound") {
    std::mt19937_64 rng(515);
    for (int rep = 0; rep < 100; ++rep) {
        std::size_t nc = 2 + rng() % 7;
        auto axioms = oracles::random_consistent_axioms(nc, 1 + rng() % 6, 1 + rng() % 5, rng);
        AxiomSet ax = to_axiom_set(nc, axioms);
        Batch batch = full_batch(ax);
        std::vector<Atom> pins;
        for (std::size_t i = 0, n = rng() % 4; i < n; ++i)
            pins.push_back(oracles::random_atom(nc, rng));
        // pinning atoms must pass the positives
        std::erase_if(pins, [&](const Atom& a) {
            for (const auto& d : axioms)
                if (d.sign == Sign::Positive && atom_discriminates(a, d.left, d.right))
                    return true;
            return false;
        });
        Dual dual = build_dual(pins, ax, batch);

        detail::Workspace ws;
        auto model = oracles::random_model(oracles::small_universe(nc), 25, rng);
        ws.init(model.atoms(), dual);
        auto before = constant_traces(ws, nc, dual.size());
        std::size_t live_before = ws.live;
        simplify_preserving_constant_traces(ws, dual, nc, rng);
        auto after = constant_traces(ws, nc, dual.size());
        for (std::size_t c = 0; c < nc; ++c) REQUIRE(before[c] == after[c]);
        CHECK(ws.live <= live_before);

        std::size_t bound = 0;
        for (const auto& da : dual.atoms())
            bound += da.kind == DualAtomKind::Indicator ? nc - da.constants.count()
                                                        : da.constants.count();
        CHECK(ws.live <= bound);
    }
}

TEST_CASE("zero-atom dual simplification keeps nothing (all traces empty)") {
    AxiomSet ax(3);
    Dual dual = build_dual({}, ax, full_batch(ax));
    REQUIRE(dual.size() == 0);
    detail::Workspace ws;
    ws.init(freest_empty_model(oracles::small_universe(3)).atoms(), dual);
    std::mt19937_64 rng(1);
    simplify_preserving_constant_traces(ws, dual, 3, rng);
    CHECK(ws.live == 0);
}

TEST_CASE("train: empty positives add no crossings") {
    AxiomSet ax(3);
    ax.add_negative(Term(3, {0}), Term(3, {1}));
    TrainConfig cfg;
    cfg.full_batch = true;
    cfg.max_batches = 3;
    auto state = train(oracles::small_universe(3), ax, cfg);
    CHECK(state.global_step == 0);
    // master = initial ∪ Λ; the freest initial already separates everything
    CHECK(state.master.size() == 3);
    for (const auto& a : state.master.atoms()) CHECK(a.size() == 1);
}

TEST_CASE("train: master satisfies every batch, union converges") {
    std::mt19937_64 rng(616);
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t nc = 2 + rng() % 7;
        auto axioms = oracles::random_consistent_axioms(nc, 1 + rng() % 8, rng() % 6, rng);
        AxiomSet ax = to_axiom_set(nc, axioms);
        TrainConfig cfg;
        cfg.full_batch = true;
        cfg.max_batches = 6;
        cfg.rng_seed = rng();
        std::size_t final_errors = 99;
        auto state = train(oracles::small_universe(nc), ax, cfg, std::nullopt,
                           [&](const BatchProgress& p) { final_errors = p.training_errors; });
        for (const auto& d : axioms) REQUIRE(satisfies(state.master, d));
        CHECK(final_errors == 0);
        CHECK(ax.count_unsatisfied(state.union_model) == 0);
    }
}

TEST_CASE("train: inconsistent axioms surface the batch index") {
    AxiomSet ax(2);
    ax.add_positive(Term(2, {0}), Term(2, {1}));
    ax.add_negative(Term(2, {0}), Term(2, {1}));
    TrainConfig cfg;
    cfg.full_batch = true;
    try {
        train(oracles::small_universe(2), ax, cfg);
        FAIL("expected InconsistencyError");
    } catch (const InconsistencyError& e) {
        CHECK(e.batch_index == 1);
        CHECK(e.duple.sign == Sign::Negative);
    }
}

TEST_CASE("train config validation") {
    TrainConfig cfg;
    cfg.simplification_threshold = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = TrainConfig{};
    cfg.dual_min_duple_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = TrainConfig{};
    cfg.subset_fraction = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("batch schedule ramps linearly to the target") {
    TrainConfig cfg;  // 500 examples up to 2/3 of the set at batch 500
    CHECK(cfg.batch_size(1, 60000) == 500);
    CHECK(cfg.batch_size(500, 60000) == 40000);
    CHECK(cfg.batch_size(700, 60000) == 40000);
    std::size_t mid = cfg.batch_size(250, 60000);
    CHECK(mid > 19000);
    CHECK(mid < 21000);
    // small sets: start is capped, target still reached
    CHECK(cfg.batch_size(1, 300) >= 200);
}

TEST_CASE("same seed gives identical training runs") {
    std::mt19937_64 rng(88);
    std::size_t nc = 6;
    auto axioms = oracles::random_consistent_axioms(nc, 6, 4, rng);
    AxiomSet ax = to_axiom_set(nc, axioms);
    TrainConfig cfg;
    cfg.full_batch = true;
    cfg.max_batches = 4;
    cfg.rng_seed = 1234;
    auto a = train(oracles::small_universe(nc), ax, cfg);
    auto b = train(oracles::small_universe(nc), ax, cfg);
    CHECK(a.master.same_atoms(b.master));
    CHECK(a.union_model.same_atoms(b.union_model));
    CHECK(a.global_step == b.global_step);
}
