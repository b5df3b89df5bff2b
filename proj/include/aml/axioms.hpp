#ifndef AML_AXIOMS_HPP
#define AML_AXIOMS_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "aml/core.hpp"

namespace aml {

/// Duple store with interned terms: repeated axiom terms share one Term and
/// one id, which the dual construction and trace bookkeeping key on.
class AxiomSet {
public:
    explicit AxiomSet(std::size_t num_constants) : num_constants_(num_constants) {}

    struct Entry {
        std::uint32_t left;
        std::uint32_t right;
        Sign sign;
    };

    std::uint32_t intern(const Term& t) {
        if (t.width() != num_constants_)
            throw std::invalid_argument("term width does not match axiom set");
        auto it = term_ids_.find(t.constants());
        if (it != term_ids_.end()) return it->second;
        terms_.push_back(t);
        std::uint32_t id = static_cast<std::uint32_t>(terms_.size() - 1);
        term_ids_.emplace(t.constants(), id);
        return id;
    }

    void add(const Term& left, const Term& right, Sign sign) {
        entries_.push_back({intern(left), intern(right), sign});
    }
    void add(const Duple& d) { add(d.left, d.right, d.sign); }
    void add_positive(const Term& l, const Term& r) { add(l, r, Sign::Positive); }
    void add_negative(const Term& l, const Term& r) { add(l, r, Sign::Negative); }

    std::size_t num_constants() const { return num_constants_; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }
    const Entry& entry(std::size_t i) const { return entries_[i]; }
    const Term& term(std::uint32_t id) const { return terms_[id]; }
    std::size_t num_terms() const { return terms_.size(); }

    Duple duple(std::size_t i) const {
        const Entry& e = entries_[i];
        return {terms_[e.left], terms_[e.right], e.sign};
    }

    std::vector<std::uint32_t> positive_ids() const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].sign == Sign::Positive) out.push_back(i);
        return out;
    }
    std::vector<std::uint32_t> negative_ids() const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].sign == Sign::Negative) out.push_back(i);
        return out;
    }

    std::size_t count_unsatisfied(const AtomizedModel& model) const {
        std::size_t bad = 0;
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (!satisfies(model, duple(i))) ++bad;
        return bad;
    }

    /// Duple ids grouped by right-hand term; a classification example (one
    /// positive plus its counter-label negatives) forms one group, so batch
    /// sampling by group matches sampling by example.
    std::vector<std::vector<std::uint32_t>> groups_by_right_term() const {
        std::unordered_map<std::uint32_t, std::size_t> slot;
        std::vector<std::vector<std::uint32_t>> out;
        for (std::uint32_t i = 0; i < entries_.size(); ++i) {
            auto [it, fresh] = slot.emplace(entries_[i].right, out.size());
            if (fresh) out.emplace_back();
            out[it->second].push_back(i);
        }
        return out;
    }

private:
    std::size_t num_constants_;
    std::vector<Term> terms_;
    std::unordered_map<Bitset, std::uint32_t, BitsetHash> term_ids_;
    std::vector<Entry> entries_;
};

/// A batch is a selection of duple ids from a parent AxiomSet.
struct Batch {
    std::vector<std::uint32_t> duple_ids;

    std::vector<std::uint32_t> positives(const AxiomSet& ax) const {
        std::vector<std::uint32_t> out;
        for (auto i : duple_ids)
            if (ax.entry(i).sign == Sign::Positive) out.push_back(i);
        return out;
    }
    std::vector<std::uint32_t> negatives(const AxiomSet& ax) const {
        std::vector<std::uint32_t> out;
        for (auto i : duple_ids)
            if (ax.entry(i).sign == Sign::Negative) out.push_back(i);
        return out;
    }
};

inline Batch full_batch(const AxiomSet& ax) {
    Batch b;
    b.duple_ids.resize(ax.size());
    for (std::uint32_t i = 0; i < ax.size(); ++i) b.duple_ids[i] = i;
    return b;
}

/// Samples `count` example groups with replacement.
inline Batch sample_batch(const std::vector<std::vector<std::uint32_t>>& groups,
                          std::size_t count, std::mt19937_64& rng) {
    Batch b;
    std::uniform_int_distribution<std::size_t> pick(0, groups.size() - 1);
    for (std::size_t i = 0; i < count; ++i) {
        for (auto id : groups[pick(rng)]) b.duple_ids.push_back(id);
    }
    return b;
}

} // namespace aml

#endif
