#ifndef AML_SPARSE_HPP
#define AML_SPARSE_HPP

#include <cassert>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "aml/axioms.hpp"
#include "aml/core.hpp"
#include "aml/dual.hpp"
#include "aml/trace.hpp"

namespace aml {

struct TrainConfig {
    double simplification_threshold = 1.5;  // gamma: master growth factor per batch
    double dual_min_duple_fraction = 0.1;   // kappa: duple-origin share kept in the dual
    double subset_fraction = 0.1;           // delta: union share kept by subset selection
    std::size_t batch_start = 500;          // examples in the first batch
    std::size_t batch_ramp = 500;           // batches to reach the full batch size
    double batch_final_fraction = 2.0 / 3.0;
    bool full_batch = false;                // every batch carries the whole axiom set
    std::size_t max_batches = 500;
    bool stop_on_zero_training_error = true;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (simplification_threshold <= 1.0)
            throw std::invalid_argument("simplification threshold must be > 1");
        if (dual_min_duple_fraction < 0.0 || dual_min_duple_fraction > 1.0)
            throw std::invalid_argument("dual fraction must be in [0,1]");
        if (subset_fraction <= 0.0 || subset_fraction > 1.0)
            throw std::invalid_argument("subset fraction must be in (0,1]");
    }

    std::size_t batch_size(std::size_t batch_index, std::size_t num_groups) const {
        std::size_t target = std::max<std::size_t>(
            1, static_cast<std::size_t>(batch_final_fraction * num_groups + 0.5));
        std::size_t start = std::min(batch_start, std::max<std::size_t>(1, num_groups));
        if (start >= target || batch_ramp <= 1) return std::max(start, target);
        if (batch_index >= batch_ramp) return target;
        double f = static_cast<double>(batch_index - 1) / static_cast<double>(batch_ramp - 1);
        return start + static_cast<std::size_t>(f * (target - start) + 0.5);
    }
};

struct TrainState {
    AtomizedModel master;
    AtomizedModel union_model;
    std::uint64_t global_step = 0;  // positive-duple crossings performed
    std::size_t batch_index = 0;
};

struct BatchProgress {
    std::size_t batch_index;
    std::size_t batch_duples;
    std::size_t master_size;
    std::size_t union_size;
    std::size_t training_errors;
    std::size_t dual_size;
    std::size_t lambda_size;
    double union_load;  // Σ min(1/(h+1), (g+1)/(j+1)) over the union atoms
};

namespace detail {

/// Master model under construction: atoms with their traces for the current
/// dual, a liveness mask, and a dedup index over the live atoms.
struct Workspace {
    std::vector<Atom> atoms;
    std::vector<Bitset> traces;
    std::vector<bool> alive;
    std::unordered_map<Bitset, std::uint32_t, BitsetHash> index;
    std::size_t live = 0;

    void init(const std::vector<Atom>& init_atoms, const Dual& dual) {
        atoms = init_atoms;
        traces.clear();
        traces.reserve(atoms.size());
        for (const auto& a : atoms) traces.push_back(trace_of_atom(a, dual));
        alive.assign(atoms.size(), true);
        index.clear();
        for (std::uint32_t i = 0; i < atoms.size(); ++i) index.emplace(atoms[i].upper, i);
        live = atoms.size();
    }

    /// Adds an atom (dedup against live atoms). Returns its arena id.
    std::uint32_t add(Atom a, Bitset trace) {
        auto it = index.find(a.upper);
        if (it != index.end()) return it->second;
        atoms.push_back(std::move(a));
        traces.push_back(std::move(trace));
        alive.push_back(true);
        ++live;
        std::uint32_t id = static_cast<std::uint32_t>(atoms.size() - 1);
        index.emplace(atoms[id].upper, id);
        return id;
    }

    void kill(std::uint32_t id) {
        if (!alive[id]) return;
        alive[id] = false;
        --live;
        index.erase(atoms[id].upper);
    }

    AtomizedModel to_model(UniversePtr universe) const {
        AtomizedModel m(std::move(universe));
        for (std::uint32_t i = 0; i < atoms.size(); ++i)
            if (alive[i]) m.add(atoms[i]);
        return m;
    }
};

inline std::size_t random_set_bit(const Bitset& b, std::mt19937_64& rng) {
    std::size_t n = b.count();
    assert(n > 0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t k = pick(rng);
    std::size_t seen = 0, found = b.size();
    b.for_each([&](std::size_t i) {
        if (seen++ == k) found = i;
    });
    return found;
}

} // namespace detail

/// Enforce the trace constraints of the batch on the workspace model by
/// adding single-constant atoms until Tr(r_R) ⊆ Tr(r_L) for every positive
/// and Tr(r_R) ⊄ Tr(r_L) for every negative. Passes repeat until a full
/// pass adds nothing. Returns the added atoms.
inline std::vector<Atom> enforce_trace_constraints(detail::Workspace& ws,
                                                   const AxiomSet& axioms,
                                                   const Batch& batch, const Dual& dual,
                                                   std::mt19937_64& rng,
                                                   std::uint64_t birth_step = 0) {
    const std::size_t nc = axioms.num_constants();

    // Traces of the single-constant terms, kept current as atoms arrive.
    std::vector<Bitset> const_trace(nc, Bitset::full(dual.size()));
    for (std::uint32_t i = 0; i < ws.atoms.size(); ++i) {
        if (!ws.alive[i]) continue;
        ws.atoms[i].upper.for_each([&](std::size_t c) { const_trace[c] &= ws.traces[i]; });
    }

    // Traces of the terms mentioned in the batch.
    std::vector<std::uint32_t> term_ids;
    {
        std::vector<bool> seen(axioms.num_terms(), false);
        for (auto id : batch.duple_ids) {
            const auto& e = axioms.entry(id);
            for (auto t : {e.left, e.right})
                if (!seen[t]) {
                    seen[t] = true;
                    term_ids.push_back(t);
                }
        }
    }
    std::unordered_map<std::uint32_t, Bitset> term_trace;
    for (auto t : term_ids) {
        Bitset tr = Bitset::full(dual.size());
        axioms.term(t).constants().for_each([&](std::size_t c) { tr &= const_trace[c]; });
        term_trace.emplace(t, std::move(tr));
    }

    std::vector<Atom> lambda;
    auto add_singleton = [&](std::uint32_t c) {
        Bitset upper(nc);
        upper.set(c);
        Atom phi(upper, 0, birth_step);
        Bitset tr = dual.constant_segment(c);
        ws.add(phi, tr);
        lambda.push_back(std::move(phi));
        const_trace[c] &= dual.constant_segment(c);
        for (auto t : term_ids)
            if (axioms.term(t).constants().test(c))
                term_trace.at(t) &= dual.constant_segment(c);
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto id : batch.duple_ids) {
            const auto& e = axioms.entry(id);
            const Bitset& right_tr = term_trace.at(e.right);
            const Bitset& left_tr = term_trace.at(e.left);
            if (e.sign == Sign::Negative) {
                if (!right_tr.subset_of(left_tr)) continue;
                // candidates: constants of r_L not in r_R; one of them always
                // re-separates the traces when the dual is consistent
                Bitset cs = axioms.term(e.left).constants();
                cs.subtract(axioms.term(e.right).constants());
                auto order = cs.indices();
                std::shuffle(order.begin(), order.end(), rng);
                bool fixed = false;
                for (auto c : order) {
                    Bitset shrunk = left_tr & dual.constant_segment(c);
                    Bitset leftover = right_tr;
                    leftover.subtract(shrunk);
                    if (leftover.any()) {
                        add_singleton(c);
                        changed = true;
                        fixed = true;
                        break;
                    }
                }
                if (!fixed)
                    throw std::logic_error("negative trace constraint not fixable; "
                                           "dual inconsistent with batch");
            } else {
                if (right_tr.subset_of(left_tr)) continue;
                Bitset deficit = right_tr;
                deficit.subtract(left_tr);
                // constants of r_R outside r_L first; shared ones as fallback
                Bitset outside = axioms.term(e.right).constants();
                outside.subtract(axioms.term(e.left).constants());
                auto order = outside.indices();
                std::shuffle(order.begin(), order.end(), rng);
                {
                    Bitset shared = axioms.term(e.right).constants();
                    shared &= axioms.term(e.left).constants();
                    auto extra = shared.indices();
                    std::shuffle(extra.begin(), extra.end(), rng);
                    order.insert(order.end(), extra.begin(), extra.end());
                }
                for (auto c : order) {
                    if (deficit.none()) break;
                    Bitset cut = deficit & dual.constant_segment(c);
                    if (cut != deficit) {
                        deficit = std::move(cut);
                        add_singleton(c);
                        changed = true;
                    }
                }
                if (deficit.any())
                    throw std::logic_error("positive trace constraint not fixable; "
                                           "union atoms inconsistent with batch positives");
            }
        }
    }
    return lambda;
}

/// Constant-trace-preserving simplification: keeps a subset of the live
/// atoms whose per-constant traces are unchanged, preferring atoms already
/// selected for another constant.
inline void simplify_preserving_constant_traces(detail::Workspace& ws, const Dual& dual,
                                                std::size_t num_constants,
                                                std::mt19937_64& rng) {
    const std::size_t v = dual.size();

    std::vector<std::vector<std::uint32_t>> missing_at(v);
    for (std::uint32_t i = 0; i < ws.atoms.size(); ++i) {
        if (!ws.alive[i]) continue;
        Bitset gap = Bitset::full(v);
        gap.subtract(ws.traces[i]);
        gap.for_each([&](std::size_t k) { missing_at[k].push_back(i); });
    }

    std::vector<Bitset> const_trace(num_constants, Bitset::full(v));
    for (std::uint32_t i = 0; i < ws.atoms.size(); ++i) {
        if (!ws.alive[i]) continue;
        ws.atoms[i].upper.for_each([&](std::size_t c) { const_trace[c] &= ws.traces[i]; });
    }

    std::vector<bool> selected(ws.atoms.size(), false);
    for (std::size_t c = 0; c < num_constants; ++c) {
        Bitset uncovered = Bitset::full(v);
        uncovered.subtract(const_trace[c]);
        while (uncovered.any()) {
            std::size_t k = detail::random_set_bit(uncovered, rng);
            std::vector<std::uint32_t> fresh, kept;
            for (auto i : missing_at[k]) {
                if (!ws.atoms[i].upper.test(c)) continue;
                (selected[i] ? kept : fresh).push_back(i);
            }
            std::uint32_t pick;
            if (!kept.empty()) {
                std::uniform_int_distribution<std::size_t> d(0, kept.size() - 1);
                pick = kept[d(rng)];
            } else {
                assert(!fresh.empty());
                std::uniform_int_distribution<std::size_t> d(0, fresh.size() - 1);
                pick = fresh[d(rng)];
                selected[pick] = true;
            }
            uncovered &= ws.traces[pick];
        }
    }

    for (std::uint32_t i = 0; i < ws.atoms.size(); ++i)
        if (ws.alive[i] && !selected[i]) ws.kill(i);

    // size bound from the dual: an indicator entry can demand |C| - |ind|
    // atoms, a pinning entry |U^c(psi)| of them
    std::size_t bound = 0;
    for (const auto& da : dual.atoms())
        bound += da.kind == DualAtomKind::Indicator ? num_constants - da.constants.count()
                                                    : da.constants.count();
    assert(ws.live <= bound);
    (void)bound;
}

/// Trace-invariant sparse crossing of the batch positives (in order) over
/// the workspace. Each discriminant atom is replaced by unions with atoms
/// below the right-hand term until the replacement set pins down its trace.
/// Runs the constant-trace simplification whenever the model grows past
/// threshold × (size at batch start).
inline void sparse_cross_batch(detail::Workspace& ws, const AxiomSet& axioms,
                               const std::vector<std::uint32_t>& positive_ids,
                               const Dual& dual, double growth_threshold,
                               std::mt19937_64& rng, std::uint64_t& global_step) {
    const std::size_t v = dual.size();
    const std::size_t batch_start_size = std::max<std::size_t>(1, ws.live);

    for (auto duple_id : positive_ids) {
        ++global_step;
        const auto& e = axioms.entry(duple_id);
        const Bitset& left = axioms.term(e.left).constants();
        const Bitset& right = axioms.term(e.right).constants();

        std::vector<std::uint32_t> dis, rhs;
        for (std::uint32_t i = 0; i < ws.atoms.size(); ++i) {
            if (!ws.alive[i]) continue;
            if (ws.atoms[i].upper.intersects(right)) rhs.push_back(i);
            else if (ws.atoms[i].upper.intersects(left)) dis.push_back(i);
        }
        if (dis.empty()) continue;

        // per dual index, the rhs atoms whose trace misses it
        std::vector<std::vector<std::uint32_t>> partners(v);
        for (auto r : rhs) {
            Bitset gap = Bitset::full(v);
            gap.subtract(ws.traces[r]);
            gap.for_each([&](std::size_t k) { partners[k].push_back(r); });
        }

        for (auto d : dis) ws.kill(d);

        for (auto d : dis) {
            Bitset deficit = Bitset::full(v);
            deficit.subtract(ws.traces[d]);
            while (deficit.any()) {
                std::size_t k = detail::random_set_bit(deficit, rng);
                assert(!partners[k].empty() && "positive trace constraint violated");
                std::uniform_int_distribution<std::size_t> pickp(0, partners[k].size() - 1);
                std::uint32_t r = partners[k][pickp(rng)];
                deficit &= ws.traces[r];
                Atom widened = atom_union(ws.atoms[d], ws.atoms[r], global_step);
                Bitset tr = ws.traces[d] | ws.traces[r];
                ws.add(std::move(widened), std::move(tr));
            }
        }

        if (ws.live > static_cast<std::size_t>(growth_threshold * batch_start_size))
            simplify_preserving_constant_traces(ws, dual, axioms.num_constants(), rng);
    }
}

/// One full training batch against explicit axioms; exposed separately so
/// the Hamiltonian solver can interleave batches with model interpretation.
inline BatchProgress train_one_batch(TrainState& state, const AxiomSet& axioms,
                                     const Batch& batch, const TrainConfig& config,
                                     std::mt19937_64& rng) {
    state.batch_index += 1;

    // trim the union model to atoms consistent with the batch positives
    std::vector<std::uint32_t> pos_ids = batch.positives(axioms);
    std::vector<std::uint32_t> keep;
    for (std::uint32_t i = 0; i < state.union_model.size(); ++i) {
        const Atom& a = state.union_model.atom(i);
        bool ok = true;
        for (auto id : pos_ids) {
            const auto& e = axioms.entry(id);
            if (atom_discriminates(a, axioms.term(e.left), axioms.term(e.right))) {
                ok = false;
                break;
            }
        }
        if (ok) keep.push_back(i);
    }
    AtomizedModel trimmed = state.union_model.restricted_to(keep);

    Dual dual = [&] {
        try {
            return build_dual(trimmed.atoms(), axioms, batch, state.batch_index);
        } catch (InconsistencyError& err) {
            err.batch_index = state.batch_index;
            throw;
        }
    }();
    dual = reduce_dual(dual, axioms, batch, config.dual_min_duple_fraction, rng);

    detail::Workspace ws;
    ws.init(state.master.atoms(), dual);
    auto lambda = enforce_trace_constraints(ws, axioms, batch, dual, rng, state.global_step);
    sparse_cross_batch(ws, axioms, pos_ids, dual, config.simplification_threshold, rng,
                       state.global_step);

    state.master = ws.to_model(state.master.universe());
    AtomizedModel merged(state.union_model.universe());
    for (const auto& a : trimmed.atoms()) merged.add(a);
    for (const auto& a : state.master.atoms()) merged.add(a);
    state.union_model = std::move(merged);

    double load = 0.0;
    for (const auto& a : state.union_model.atoms()) {
        std::uint64_t tail = state.global_step >= a.birth ? state.global_step - a.birth : 0;
        load += std::min(1.0 / (static_cast<double>(tail) + 1.0),
                         (static_cast<double>(a.growth) + 1.0) /
                             (static_cast<double>(state.global_step) + 1.0));
    }
    return BatchProgress{state.batch_index, batch.duple_ids.size(), state.master.size(),
                         state.union_model.size(), 0,  dual.size(),
                         lambda.size(),        load};
}

using ProgressCallback = std::function<void(const BatchProgress&)>;

/// Batch training loop: per batch, trim the union model, build and reduce
/// the dual, enforce trace constraints, sparse-cross the positives, and fold
/// the master back into the union model. Stops at max_batches or when the
/// union model makes no training errors.
inline TrainState train(UniversePtr universe, const AxiomSet& axioms,
                        const TrainConfig& config,
                        std::optional<AtomizedModel> initial = std::nullopt,
                        const ProgressCallback& progress = nullptr) {
    config.validate();
    TrainState state;
    state.master = initial ? std::move(*initial) : freest_empty_model(universe);
    state.union_model = state.master;

    std::mt19937_64 rng(config.rng_seed);
    auto groups = axioms.groups_by_right_term();

    for (std::size_t i = 1; i <= config.max_batches; ++i) {
        Batch batch = config.full_batch
                          ? full_batch(axioms)
                          : sample_batch(groups, config.batch_size(i, groups.size()), rng);
        BatchProgress prog = train_one_batch(state, axioms, batch, config, rng);
        prog.training_errors = axioms.count_unsatisfied(state.union_model);
        if (progress) progress(prog);
        if (config.stop_on_zero_training_error && prog.training_errors == 0) break;
    }
    return state;
}

} // namespace aml

#endif
