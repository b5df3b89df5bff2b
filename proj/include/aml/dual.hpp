#ifndef AML_DUAL_HPP
#define AML_DUAL_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "aml/axioms.hpp"
#include "aml/core.hpp"

namespace aml {

/// Atoms of the dual come from two places: indicator sets grown from the
/// right-hand terms of negative duples, and pinning entries contributed by
/// the atoms of the union model.
enum class DualAtomKind : std::uint8_t { Indicator, Pinning };

struct DualAtom {
    DualAtomKind kind;
    /// Indicator set for indicator entries; the source atom's upper constant
    /// segment for pinning entries.
    Bitset constants;
};

/// Dual algebra for one batch. Stores per-constant lower segments as
/// bit-sets over dual-atom indices; term segments follow from the membership
/// rule (indicator: C(t) ⊆ ind, pinning: C(t) ∩ U^c(ψ) = ∅).
class Dual {
public:
    Dual(std::size_t num_constants, std::vector<DualAtom> atoms, std::uint64_t generation)
        : num_constants_(num_constants), atoms_(std::move(atoms)), generation_(generation) {
        constant_segment_.reserve(num_constants_);
        for (std::size_t c = 0; c < num_constants_; ++c) {
            Bitset seg(atoms_.size());
            for (std::size_t k = 0; k < atoms_.size(); ++k) {
                bool in = atoms_[k].kind == DualAtomKind::Indicator
                              ? atoms_[k].constants.test(c)
                              : !atoms_[k].constants.test(c);
                if (in) seg.set(k);
            }
            constant_segment_.push_back(std::move(seg));
        }
    }

    std::size_t size() const { return atoms_.size(); }
    std::size_t num_constants() const { return num_constants_; }
    std::uint64_t generation() const { return generation_; }
    const std::vector<DualAtom>& atoms() const { return atoms_; }

    const Bitset& constant_segment(std::size_t c) const { return constant_segment_[c]; }

    Bitset term_segment(const Term& t) const {
        Bitset seg(atoms_.size());
        for (std::size_t k = 0; k < atoms_.size(); ++k) {
            bool in = atoms_[k].kind == DualAtomKind::Indicator
                          ? t.constants().subset_of(atoms_[k].constants)
                          : t.constants().disjoint_from(atoms_[k].constants);
            if (in) seg.set(k);
        }
        return seg;
    }

    std::size_t count_kind(DualAtomKind k) const {
        std::size_t n = 0;
        for (const auto& a : atoms_)
            if (a.kind == k) ++n;
        return n;
    }

private:
    std::size_t num_constants_;
    std::vector<DualAtom> atoms_;
    std::vector<Bitset> constant_segment_;
    std::uint64_t generation_;
};

/// Builds the dual for a batch. `union_atoms` must already be trimmed to
/// atoms consistent with the batch positives. Throws InconsistencyError,
/// carrying the offending negative duple, iff the batch axioms are
/// inconsistent.
inline Dual build_dual(std::span<const Atom> union_atoms, const AxiomSet& axioms,
                       const Batch& batch, std::uint64_t generation = 0) {
    const std::size_t nc = axioms.num_constants();

    // Indicator sets: one per distinct negative right-hand term, extended to
    // the fixed point under the batch positives, then deduplicated again.
    std::vector<Bitset> indicators;
    {
        std::unordered_map<Bitset, bool, BitsetHash> seen;
        for (auto id : batch.duple_ids) {
            const auto& e = axioms.entry(id);
            if (e.sign != Sign::Negative) continue;
            const Bitset& rhs = axioms.term(e.right).constants();
            if (seen.emplace(rhs, true).second) indicators.push_back(rhs);
        }
        std::vector<std::pair<const Bitset*, const Bitset*>> pos;  // (right, left)
        for (auto id : batch.duple_ids) {
            const auto& e = axioms.entry(id);
            if (e.sign != Sign::Positive) continue;
            pos.emplace_back(&axioms.term(e.right).constants(),
                             &axioms.term(e.left).constants());
        }
        for (auto& ind : indicators) {
            bool changed = true;
            while (changed) {
                changed = false;
                for (auto& [right, left] : pos) {
                    if (right->subset_of(ind) && !left->subset_of(ind)) {
                        ind |= *left;
                        changed = true;
                    }
                }
            }
        }
        std::unordered_map<Bitset, bool, BitsetHash> dedup;
        std::vector<Bitset> unique;
        for (auto& ind : indicators)
            if (dedup.emplace(ind, true).second) unique.push_back(std::move(ind));
        indicators = std::move(unique);
    }

    std::vector<DualAtom> atoms;
    atoms.reserve(indicators.size() + union_atoms.size());
    for (auto& ind : indicators)
        atoms.push_back({DualAtomKind::Indicator, std::move(ind)});
    for (const auto& psi : union_atoms)
        atoms.push_back({DualAtomKind::Pinning, psi.upper});

    Dual dual(nc, std::move(atoms), generation);

    for (auto id : batch.duple_ids) {
        const auto& e = axioms.entry(id);
        if (e.sign != Sign::Negative) continue;
        Bitset right_seg = dual.term_segment(axioms.term(e.right));
        Bitset left_seg = dual.term_segment(axioms.term(e.left));
        if (right_seg.subset_of(left_seg))
            throw InconsistencyError(axioms.duple(id));
    }
    return dual;
}

/// Reduces the dual while keeping every batch negative discriminated:
/// indicator entries stay, one discriminating atom per negative duple is
/// pinned greedily in seeded random order, and the remaining pinning entries
/// are subsampled so that at least a fraction `min_duple_fraction` of the
/// retained atoms are of duple origin.
inline Dual reduce_dual(const Dual& dual, const AxiomSet& axioms, const Batch& batch,
                        double min_duple_fraction, std::mt19937_64& rng) {
    const std::size_t n = dual.size();
    std::vector<bool> keep(n, false);
    for (std::size_t k = 0; k < n; ++k)
        if (dual.atoms()[k].kind == DualAtomKind::Indicator) keep[k] = true;

    auto negatives = batch.negatives(axioms);
    std::shuffle(negatives.begin(), negatives.end(), rng);
    for (auto id : negatives) {
        const auto& e = axioms.entry(id);
        Bitset right_seg = dual.term_segment(axioms.term(e.right));
        Bitset left_seg = dual.term_segment(axioms.term(e.left));
        Bitset disc = right_seg;
        disc.subtract(left_seg);
        bool covered = false;
        std::vector<std::uint32_t> candidates;
        disc.for_each([&](std::size_t k) {
            if (keep[k]) covered = true;
            candidates.push_back(static_cast<std::uint32_t>(k));
        });
        if (!covered && !candidates.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
            keep[candidates[pick(rng)]] = true;
        }
    }

    std::size_t duple_kept = 0, pinning_required = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!keep[k]) continue;
        if (dual.atoms()[k].kind == DualAtomKind::Indicator) ++duple_kept;
        else ++pinning_required;
    }

    // Pinning budget from |D_R| ≥ κ (|D_R| + |S|); cover atoms stay even
    // when they exceed it.
    std::size_t pinning_budget = n;  // κ = 0 leaves pinning untouched
    if (min_duple_fraction > 0.0) {
        pinning_budget = static_cast<std::size_t>(
            static_cast<double>(duple_kept) * (1.0 - min_duple_fraction) / min_duple_fraction);
    }

    std::vector<std::uint32_t> optional_pinning;
    for (std::size_t k = 0; k < n; ++k)
        if (!keep[k] && dual.atoms()[k].kind == DualAtomKind::Pinning)
            optional_pinning.push_back(static_cast<std::uint32_t>(k));
    std::shuffle(optional_pinning.begin(), optional_pinning.end(), rng);
    for (auto k : optional_pinning) {
        if (pinning_required >= pinning_budget) break;
        keep[k] = true;
        ++pinning_required;
    }

    std::vector<DualAtom> retained;
    for (std::size_t k = 0; k < n; ++k)
        if (keep[k]) retained.push_back(dual.atoms()[k]);
    return Dual(dual.num_constants(), std::move(retained), dual.generation() + 1);
}

} // namespace aml

#endif
