#ifndef AML_CROSSING_HPP
#define AML_CROSSING_HPP

#include <cstdint>
#include <ostream>
#include <vector>

#include "aml/core.hpp"

namespace aml {

/// Full Crossing of a positive duple: replaces every atom of the
/// discriminant D by its unions with every atom below the right-hand term.
/// Returns (M \ D) ∪ (D ▽ R); M unchanged when the duple already holds.
inline AtomizedModel full_cross(const AtomizedModel& model, const Term& left,
                                const Term& right, std::uint64_t step = 0) {
    auto dis = discriminant_indices(model, left, right);
    if (dis.empty()) return model;

    std::vector<std::uint32_t> rhs = lower_segment_indices(model, right);
    std::vector<bool> in_dis(model.size(), false);
    for (auto i : dis) in_dis[i] = true;

    AtomizedModel out(model.universe());
    for (std::uint32_t i = 0; i < model.size(); ++i)
        if (!in_dis[i]) out.add(model.atom(i));
    for (auto d : dis)
        for (auto r : rhs)
            out.add(atom_union(model.atom(d), model.atom(r), step));
    return out;
}

inline AtomizedModel full_cross(const AtomizedModel& model, const Duple& d,
                                std::uint64_t step = 0) {
    return full_cross(model, d.left, d.right, step);
}

struct FreestModelOptions {
    bool remove_redundant_each_step = true;  // matches the reported atom counts
    std::ostream* trace_csv = nullptr;       // step,duple,|D|,|R|,model,nonredundant
};

namespace detail {

/// Per-constant index over a working atom set: bucket[c] lists the atom ids
/// whose upper segment contains c, in ascending size order. Dead ids stay in
/// the buckets and are skipped.
struct CoverIndex {
    std::vector<std::vector<std::uint32_t>> buckets;

    void rebuild(const std::vector<Atom>& atoms, const std::vector<bool>& alive,
                 std::size_t num_constants) {
        buckets.assign(num_constants, {});
        std::vector<std::uint32_t> order;
        order.reserve(atoms.size());
        for (std::uint32_t i = 0; i < atoms.size(); ++i)
            if (alive[i]) order.push_back(i);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return atoms[a].size() < atoms[b].size();
        });
        for (auto i : order)
            atoms[i].upper.for_each([&](std::size_t c) { buckets[c].push_back(i); });
    }

    void add(const std::vector<Atom>& atoms, std::uint32_t id) {
        atoms[id].upper.for_each([&](std::size_t c) { buckets[c].push_back(id); });
    }

    /// Per-constant cover test: every constant of `upper` (outside `seed`)
    /// is in some alive atom strictly inside `upper`. `self` is skipped.
    bool covered(const Bitset& upper, const Bitset* seed, const std::vector<Atom>& atoms,
                 const std::vector<bool>& alive, std::uint32_t self) const {
        Bitset need = upper;
        if (seed) need.subtract(*seed);
        bool ok = true;
        need.for_each([&](std::size_t c) {
            if (!ok) return;
            for (auto id : buckets[c]) {
                if (id == self || !alive[id]) continue;
                if (atoms[id].upper.proper_subset_of(upper)) return;
            }
            ok = false;
        });
        return ok;
    }
};

/// Step of the freest-model loop keeping the working model non-redundant.
/// Unions whose partner plus current singleton atoms already cover them are
/// dropped without being materialized; survivors are rechecked only when a
/// kept fresh atom sits strictly inside them.
inline void cross_nonredundant_inplace(std::vector<Atom>& atoms, const Term& left,
                                       const Term& right, std::uint64_t step,
                                       std::size_t* dis_count = nullptr,
                                       std::size_t* rhs_count = nullptr) {
    const std::size_t num_constants = left.width();
    std::vector<std::uint32_t> dis, rhs;
    Bitset singleton_mask(num_constants);
    for (std::uint32_t i = 0; i < atoms.size(); ++i) {
        bool under_right = atoms[i].upper.intersects(right.constants());
        bool in_dis = !under_right && atoms[i].upper.intersects(left.constants());
        if (under_right) rhs.push_back(i);
        else if (in_dis) dis.push_back(i);
        if (!in_dis && atoms[i].size() == 1) singleton_mask |= atoms[i].upper;
    }
    if (dis_count) *dis_count = dis.size();
    if (rhs_count) *rhs_count = rhs.size();
    if (dis.empty()) return;

    std::vector<bool> alive(atoms.size(), true);
    for (auto d : dis) alive[d] = false;

    // candidate unions that singleton-plus-partner coverage cannot discard
    struct FreshAtom {
        Bitset upper;
        std::uint32_t partner;  // rhs atom inside the union
        std::uint32_t source;   // discriminant atom it replaces
    };
    std::vector<FreshAtom> fresh;
    {
        std::unordered_map<Bitset, bool, BitsetHash> seen;
        const std::size_t words = (num_constants + 63) / 64;
        Bitset scratch(num_constants);
        for (auto d : dis) {
            const std::uint64_t* dw = atoms[d].upper.data();
            for (auto r : rhs) {
                const std::uint64_t* rw = atoms[r].upper.data();
                const std::uint64_t* sm = singleton_mask.data();
                bool empty_diff = true, covered = true;
                for (std::size_t w = 0; w < words; ++w) {
                    std::uint64_t diff = dw[w] & ~rw[w];
                    if (diff) empty_diff = false;
                    if (diff & ~sm[w]) {
                        covered = false;
                        break;
                    }
                }
                if (empty_diff || covered) continue;  // duplicate or redundant
                scratch.assign_or(atoms[d].upper, atoms[r].upper);
                if (seen.emplace(scratch, true).second)
                    fresh.push_back({scratch, r, d});
            }
        }
    }

    CoverIndex index;
    index.rebuild(atoms, alive, num_constants);

    std::sort(fresh.begin(), fresh.end(), [](const FreshAtom& a, const FreshAtom& b) {
        return a.upper.count() < b.upper.count();
    });
    std::vector<std::uint32_t> kept_fresh;
    for (auto& f : fresh) {
        if (index.covered(f.upper, &atoms[f.partner].upper, atoms, alive,
                          static_cast<std::uint32_t>(atoms.size())))
            continue;
        std::uint32_t id = static_cast<std::uint32_t>(atoms.size());
        atoms.push_back(atom_union(atoms[f.source], atoms[f.partner], step));
        alive.push_back(true);
        index.add(atoms, id);
        kept_fresh.push_back(id);
    }

    // survivors can only turn redundant under a kept fresh atom inside them
    if (!kept_fresh.empty()) {
        std::vector<std::uint32_t> candidates;
        for (std::uint32_t i = 0; i < kept_fresh[0]; ++i) {
            if (!alive[i]) continue;
            for (auto k : kept_fresh)
                if (atoms[k].upper.proper_subset_of(atoms[i].upper)) {
                    candidates.push_back(i);
                    break;
                }
        }
        std::sort(candidates.begin(), candidates.end(),
                  [&](std::uint32_t a, std::uint32_t b) {
                      return atoms[a].size() < atoms[b].size();
                  });
        for (auto i : candidates)
            if (index.covered(atoms[i].upper, nullptr, atoms, alive, i)) alive[i] = false;
    }

    std::vector<Atom> next;
    next.reserve(atoms.size());
    for (std::uint32_t i = 0; i < atoms.size(); ++i)
        if (alive[i]) next.push_back(std::move(atoms[i]));
    atoms = std::move(next);
}

} // namespace detail

/// Freest model of a set of positive duples, built by crossing them in the
/// given order. The non-redundant result is independent of the order.
inline AtomizedModel freest_model(UniversePtr universe,
                                  const std::vector<Duple>& positives,
                                  const FreestModelOptions& opts = {}) {
    AtomizedModel init = freest_empty_model(universe);
    if (!opts.remove_redundant_each_step) {
        AtomizedModel m = init;
        std::uint64_t step = 0;
        for (const auto& d : positives) m = full_cross(m, d, ++step);
        return remove_redundant(m);
    }

    std::vector<Atom> atoms = init.atoms();
    std::uint64_t step = 0;
    for (std::size_t di = 0; di < positives.size(); ++di) {
        std::size_t dis_n = 0, rhs_n = 0;
        detail::cross_nonredundant_inplace(atoms, positives[di].left,
                                           positives[di].right, ++step, &dis_n, &rhs_n);
        if (opts.trace_csv) {
            *opts.trace_csv << step << ',' << di << ',' << dis_n << ',' << rhs_n
                            << ',' << atoms.size() << ',' << atoms.size() << '\n';
        }
    }
    AtomizedModel out(universe);
    for (auto& a : atoms) out.add(std::move(a));
    return out;
}

} // namespace aml

#endif
