#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "aml/evalstat.hpp"
#include "oracles.hpp"

using namespace aml;

TEST_CASE("count_misses matches the set difference") {
    auto u = oracles::small_universe(3);  // p=0, a=1, b=2
    AtomizedModel m(u);
    m.add(Atom(3, {0, 1}));  // [p,a]
    m.add(Atom(3, {0, 2}));  // [p,b]
    CHECK(count_misses(m, 0, Term(3, {1})) == 1);
    CHECK(count_misses(m, 0, Term(3, {1, 2})) == 0);
    CHECK(count_misses(m, 1, Term(3, {1})) == 0);  // label segment inside term segment

    // empty label segment
    AtomizedModel empty(u);
    empty.add(Atom(3, {1}));
    CHECK(count_misses(empty, 0, Term(3, {2})) == 0);
}

TEST_CASE("count_misses is zero exactly when the duple holds") {
    std::mt19937_64 rng(77);
    auto u = oracles::small_universe(6);
    for (int rep = 0; rep < 200; ++rep) {
        auto m = oracles::random_model(u, 15, rng);
        std::uint32_t label = static_cast<std::uint32_t>(rng() % 6);
        Term t = oracles::random_term(6, rng);
        bool holds = duple_holds(m, Term(6, {label}), t);
        CHECK((count_misses(m, label, t) == 0) == holds);
    }
}

TEST_CASE("fewest misses classification with deterministic ties") {
    auto u = oracles::small_universe(4);  // labels 0,1; features 2,3
    AtomizedModel m(u);
    m.add(Atom(4, {0, 2}));
    m.add(Atom(4, {0, 3}));
    m.add(Atom(4, {1, 3}));
    std::vector<std::uint32_t> labels{0, 1};

    // term {2}: label 0 misses 1 (atom [0,3]); label 1 misses 1 → tie → 0
    CHECK(classify_fewest_misses(m, labels, Term(4, {2})) == 0);
    // term {3}: label 0 misses 1, label 1 misses 0 → label 1
    CHECK(classify_fewest_misses(m, labels, Term(4, {3})) == 1);

    std::vector<std::uint32_t> single{1};
    CHECK(classify_fewest_misses(m, single, Term(4, {2})) == 0);

    CHECK_THROWS_AS(classify_fewest_misses(m, std::vector<std::uint32_t>{}, Term(4, {2})),
                    std::invalid_argument);
}

TEST_CASE("expected PFN of one atom") {
    // the worked point: g=10, h=5000, n=50000 → ≈ 0.0002
    double v = expected_pfn_atom(10, 5000, 50000);
    CHECK(v > 0.000195);
    CHECK(v < 0.000205);

    CHECK(expected_pfn_atom(0, 0, 0) == 0.5);

    // monotone: non-increasing in h and n, non-decreasing in g
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 300; ++rep) {
        std::uint64_t g = rng() % 50, h = rng() % 10000, n = rng() % 100000;
        CHECK(expected_pfn_atom(g, h + 1, n) <= expected_pfn_atom(g, h, n));
        CHECK(expected_pfn_atom(g, h, n + 1) <= expected_pfn_atom(g, h, n));
        CHECK(expected_pfn_atom(g + 1, h, n) >= expected_pfn_atom(g, h, n));
    }
}

TEST_CASE("expected PFN of a subset is the load") {
    CHECK(expected_pfn_subset({}, 100) == 0.0);

    std::vector<AtomStats> z(7, AtomStats{3, 50});
    double one = expected_pfn_subset(std::vector<AtomStats>{AtomStats{3, 50}}, 1000);
    CHECK(expected_pfn_subset(z, 1000) == Catch::Approx(7.0 * one));

    auto lt = load_and_transition(z, 1000);
    CHECK(lt.load == Catch::Approx(expected_pfn_subset(z, 1000)));
    CHECK(lt.transition == Catch::Approx(1.0 - std::exp(-lt.load)));
}

TEST_CASE("load and transition point") {
    CHECK(load_and_transition({}, 10).transition == 0.0);

    // single atom with a = 100: h+1 = 100 dominates (g+1)/(j+1) = 1/51
    std::vector<AtomStats> s{AtomStats{0, 99}};
    auto lt = load_and_transition(s, 50);
    CHECK(lt.load == Catch::Approx(0.01));
    CHECK(lt.transition == Catch::Approx(1.0 - std::exp(-0.01)));
    CHECK(lt.transition == Catch::Approx(0.00995).epsilon(0.001));

    // large load saturates toward 1
    std::vector<AtomStats> many(4000, AtomStats{5, 0});
    CHECK(load_and_transition(many, 10).transition > 0.999);
}

namespace {

/// The biased-coin game: tails probability starts at 0.5 and divides by
/// U(1,4) on every tail. Returns the final tail probability and the
/// estimator exponent statistics (g tails, h trailing heads).
struct CoinRun {
    double final_omega;
    std::uint64_t tails;
    std::uint64_t trailing_heads;
};

CoinRun run_coin_game(std::uint64_t tosses, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> divider(1.0, 4.0);
    double omega = 0.5;
    std::uint64_t tails = 0, last_tail = 0;
    for (std::uint64_t t = 1; t <= tosses; ++t) {
        if (unit(rng) < omega) {
            ++tails;
            last_tail = t;
            omega /= divider(rng);
        }
    }
    return {omega, tails, tosses - last_tail};
}

} // namespace

TEST_CASE("PFN estimator bounds the simulated coin distribution") {
    // The estimator exponent a = max(h+1, (j+1)/(g+1)) gives
    // P(ω ≥ δ) ≈ (1−δ)^a, which upper-bounds the empirical distribution of
    // the final coin across the transition region. Far below the transition
    // (δ ≤ 1e-5 here, where P → 1) the flat-prior branch undershoots by a
    // few percent; that is outside the estimator's stated validity region.
    const std::uint64_t tosses = 30000;
    const std::size_t trials = 10000;
    std::mt19937_64 rng(20240517);

    std::vector<CoinRun> runs;
    runs.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) runs.push_back(run_coin_game(tosses, rng));

    for (double delta : {3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
        double empirical = 0.0, estimator = 0.0;
        for (const auto& r : runs) {
            if (r.final_omega >= delta) empirical += 1.0;
            double a = std::max(static_cast<double>(r.trailing_heads) + 1.0,
                                (static_cast<double>(tosses) + 1.0) /
                                    (static_cast<double>(r.tails) + 1.0));
            estimator += std::pow(1.0 - delta, a);
        }
        empirical /= trials;
        estimator /= trials;
        double sigma = std::sqrt(empirical * (1.0 - empirical) / trials) + 1e-9;
        INFO("delta=" << delta << " empirical=" << empirical << " estimator=" << estimator);
        CHECK(empirical <= estimator + 3.0 * sigma);
    }
}

TEST_CASE("empirical PFP per atom and per subset") {
    auto u = oracles::small_universe(4);  // p=0, features 1..3
    AxiomSet ax(4);
    ax.add_negative(Term(4, {0}), Term(4, {1}));
    ax.add_negative(Term(4, {0}), Term(4, {2}));
    ax.add_negative(Term(4, {0}), Term(4, {1, 2}));
    auto negatives = ax.negative_ids();

    Atom discriminates_all(4, {0, 3});  // avoids every negative right side
    CHECK(empirical_pfp_atom(discriminates_all, ax, negatives) == 0.0);

    Atom discriminates_none(4, {0, 1, 2});
    CHECK(empirical_pfp_atom(discriminates_none, ax, negatives) == 1.0);

    Atom half(4, {0, 1});  // fails the two negatives whose term contains 1
    CHECK(empirical_pfp_atom(half, ax, negatives) == Catch::Approx(2.0 / 3.0));

    AtomizedModel m(u);
    m.add(half);
    m.add(Atom(4, {0, 2}));
    auto rates = empirical_pfp(m, ax, negatives);
    REQUIRE(rates.per_atom.size() == 2);
    CHECK(rates.joint == Catch::Approx(1.0 / 3.0));  // only {0} ≰ 1⊙2 undiscriminated
    CHECK(rates.independence_product ==
          Catch::Approx(rates.per_atom[0] * rates.per_atom[1]));

    CHECK_THROWS_AS(empirical_pfp(m, ax, {}), std::invalid_argument);
}

TEST_CASE("independent atoms: joint PFP matches the product") {
    // synthetic independence: negatives over two disjoint feature blocks;
    // atom A fails block-1 negatives at rate pa, atom B at rate pb,
    // independently by construction
    std::mt19937_64 rng(40);
    const std::size_t nc = 9;  // label 0; features 1..4 (A), 5..8 (B)
    AxiomSet ax(nc);
    for (int i = 0; i < 4000; ++i) {
        std::vector<std::uint32_t> cs;
        cs.push_back(1 + rng() % 4);
        cs.push_back(5 + rng() % 4);
        ax.add_negative(Term(nc, {0}), Term(nc, cs));
    }
    auto negatives = ax.negative_ids();

    AtomizedModel m(oracles::small_universe(nc));
    m.add(Atom(nc, {0, 1}));  // fails when the term contains feature 1: rate ≈ 1/4
    m.add(Atom(nc, {0, 5}));
    auto rates = empirical_pfp(m, ax, negatives);
    CHECK(rates.joint ==
          Catch::Approx(rates.independence_product).margin(0.03));
}

TEST_CASE("subset selection covers the negatives and keeps label atoms") {
    std::mt19937_64 rng(61);
    const std::size_t nc = 6;  // label 0, features 1..5
    auto u = oracles::small_universe(nc);
    AxiomSet ax(nc);
    for (std::uint32_t f = 1; f < 6; ++f)
        ax.add_negative(Term(nc, {0}), Term(nc, {f}));
    auto negatives = ax.negative_ids();

    AtomizedModel m(u);
    for (std::uint32_t f = 1; f < 6; ++f) {
        std::vector<std::uint32_t> others{0};
        for (std::uint32_t o = 1; o < 6; ++o)
            if (o != f) others.push_back(o);
        m.add(Atom(Term(nc, others).constants()));  // discriminates exactly negative f
    }
    m.add(Atom(nc, {1}));  // unlabeled atom, discriminates nothing with label

    std::vector<std::uint32_t> labels{0};
    auto s = select_atom_subset(m, ax, negatives, 1.0, labels, rng);
    CHECK(s.size() == 5);  // every cover atom kept, unlabeled atom dropped
    for (const auto& a : s.atoms()) CHECK(a.upper.test(0));

    // a model that misses one negative is rejected by name
    AtomizedModel bad(u);
    bad.add(Atom(nc, {0, 2, 3, 4, 5}));  // cannot discriminate features 2..5
    CHECK_THROWS_AS(select_atom_subset(bad, ax, negatives, 0.5, labels, rng),
                    std::invalid_argument);
}

TEST_CASE("every selection pass discriminates all negatives before filtering") {
    std::mt19937_64 rng(62);
    for (int rep = 0; rep < 50; ++rep) {
        std::size_t nc = 3 + rng() % 5;
        auto u = oracles::small_universe(nc);
        auto m = oracles::random_model(u, 20, rng);
        AxiomSet ax(nc);
        std::size_t added = 0, tries = 0;
        while (added < 4 && tries++ < 200) {
            Term l = oracles::random_term(nc, rng), r = oracles::random_term(nc, rng);
            bool disc = false;
            for (const auto& a : m.atoms())
                if (atom_discriminates(a, l, r)) disc = true;
            if (disc) {
                ax.add_negative(l, r);
                ++added;
            }
        }
        if (added == 0) continue;
        auto negatives = ax.negative_ids();
        std::vector<std::uint32_t> all_labels(nc);
        for (std::uint32_t c = 0; c < nc; ++c) all_labels[c] = c;
        auto s = select_atom_subset(m, ax, negatives, 0.5, all_labels, rng);
        for (auto id : negatives) {
            const auto& e = ax.entry(id);
            bool disc = false;
            for (const auto& a : s.atoms())
                if (atom_discriminates(a, ax.term(e.left), ax.term(e.right))) disc = true;
            REQUIRE(disc);
        }
    }
}

TEST_CASE("logistic gradient matches central differences") {
    std::mt19937_64 rng(81);
    std::uniform_real_distribution<double> weight(-0.5, 0.5);
    for (int rep = 0; rep < 20; ++rep) {
        std::size_t dim = 2 + rng() % 5, classes = 2 + rng() % 3, n = 3 + rng() % 6;
        std::vector<std::vector<double>> xs(n, std::vector<double>(dim));
        std::vector<std::uint32_t> ys(n);
        for (auto& x : xs)
            for (auto& v : x) v = (rng() % 2) ? 1.0 : -1.0;
        for (auto& y : ys) y = static_cast<std::uint32_t>(rng() % classes);

        LogisticHead head;
        head.dim = dim;
        head.classes = classes;
        head.weights.resize(classes * dim);
        for (auto& w : head.weights) w = weight(rng);

        auto grad = logistic_gradient(head, xs, ys);
        const double eps = 1e-6;
        for (std::size_t i = 0; i < head.weights.size(); ++i) {
            LogisticHead hp = head, hm = head;
            hp.weights[i] += eps;
            hm.weights[i] -= eps;
            double numeric = (logistic_loss(hp, xs, ys) - logistic_loss(hm, xs, ys)) / (2 * eps);
            double denom = std::max({std::abs(numeric), std::abs(grad[i]), 1e-8});
            REQUIRE(std::abs(numeric - grad[i]) / denom <= 1e-5);
        }
    }
}

TEST_CASE("logistic head learns a separable toy and zero epochs tie to class 0") {
    std::vector<std::vector<double>> xs;
    std::vector<std::uint32_t> ys;
    std::mt19937_64 rng(7);
    for (int i = 0; i < 40; ++i) {
        double flag = (i % 2 == 0) ? 1.0 : -1.0;
        xs.push_back({flag, -flag, (rng() % 2) ? 1.0 : -1.0});
        ys.push_back(i % 2 == 0 ? 0u : 1u);
    }
    auto head = train_logistic_head(xs, ys, 2, 300, 0.05);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (logistic_predict(head, xs[i]) == ys[i]) ++correct;
    CHECK(correct == xs.size());

    auto zero = train_logistic_head(xs, ys, 2, 0, 0.05);
    for (const auto& x : xs) CHECK(logistic_predict(zero, x) == 0);

    CHECK_THROWS_AS(logistic_predict(head, std::vector<double>{1.0}),
                    std::invalid_argument);
}

TEST_CASE("atom activations are ±1 by lower-segment membership") {
    auto u = oracles::small_universe(3);
    AtomizedModel m(u);
    m.add(Atom(3, {0}));
    m.add(Atom(3, {1, 2}));
    auto act = atom_activations(m, Term(3, {0, 1}));
    REQUIRE(act.size() == 2);
    CHECK(act[0] == 1.0);
    CHECK(act[1] == 1.0);
    auto act2 = atom_activations(m, Term(3, {2}));
    CHECK(act2[0] == -1.0);
    CHECK(act2[1] == 1.0);
}

TEST_CASE("stats derive h lazily from birth") {
    Atom a(3, {0});
    a.growth = 4;
    a.birth = 10;
    auto s = stats_of(a, 35);
    CHECK(s.growth == 4);
    CHECK(s.success_tail == 25);
}
