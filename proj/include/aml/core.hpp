#ifndef AML_CORE_HPP
#define AML_CORE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "aml/bitset.hpp"

namespace aml {

/// The fixed set of named constants a model is built over. Constant
/// identifiers are dense indices 0..size()-1.
class ConstantUniverse {
public:
    explicit ConstantUniverse(std::vector<std::string> names)
        : names_(std::move(names)) {
        if (names_.empty())
            throw std::invalid_argument("universe needs at least one constant");
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (!index_.emplace(names_[i], i).second)
                throw std::invalid_argument("duplicate constant label: " + names_[i]);
        }
    }

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const { return names_; }

    std::uint32_t id(const std::string& label) const {
        auto it = index_.find(label);
        if (it == index_.end())
            throw std::invalid_argument("unknown constant label: " + label);
        return static_cast<std::uint32_t>(it->second);
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

using UniversePtr = std::shared_ptr<const ConstantUniverse>;

inline UniversePtr make_universe(std::vector<std::string> names) {
    return std::make_shared<const ConstantUniverse>(std::move(names));
}

/// A term is identified with its set of component constants; a single
/// constant is a term of size one.
class Term {
public:
    Term() = default;
    explicit Term(Bitset constants) : constants_(std::move(constants)) {
        if (constants_.none())
            throw std::invalid_argument("term must have at least one constant");
    }
    Term(std::size_t num_constants, std::initializer_list<std::uint32_t> ids)
        : Term(num_constants, std::vector<std::uint32_t>(ids)) {}
    Term(std::size_t num_constants, const std::vector<std::uint32_t>& ids)
        : constants_(num_constants) {
        if (ids.empty())
            throw std::invalid_argument("term must have at least one constant");
        for (auto id : ids) {
            if (id >= num_constants)
                throw std::invalid_argument("term constant out of range");
            constants_.set(id);
        }
    }

    static Term single(std::size_t num_constants, std::uint32_t id) {
        return Term(num_constants, {id});
    }

    const Bitset& constants() const { return constants_; }
    std::size_t width() const { return constants_.size(); }
    std::size_t arity() const { return constants_.count(); }

    /// Idempotent summation: component constants of s ⊙ t.
    friend Term operator*(const Term& a, const Term& b) {
        return Term(a.constants_ | b.constants_);
    }

    bool operator==(const Term& o) const { return constants_ == o.constants_; }

private:
    Bitset constants_;
};

/// An atom is identified with its upper constant segment. The growth count
/// and birth step are engine bookkeeping, not semilattice content; atom
/// equality ignores them.
struct Atom {
    Bitset upper;
    std::uint32_t growth = 0;   // times the atom widened along its chain
    std::uint64_t birth = 0;    // global crossing step at creation

    Atom() = default;
    explicit Atom(Bitset u, std::uint32_t g = 0, std::uint64_t b = 0)
        : upper(std::move(u)), growth(g), birth(b) {
        if (upper.none())
            throw std::invalid_argument("atom needs a non-empty upper segment");
    }
    Atom(std::size_t num_constants, std::initializer_list<std::uint32_t> ids)
        : upper(num_constants) {
        for (auto id : ids) upper.set(id);
        if (upper.none())
            throw std::invalid_argument("atom needs a non-empty upper segment");
    }

    std::size_t size() const { return upper.count(); }
    bool operator==(const Atom& o) const { return upper == o.upper; }
};

enum class Sign : std::uint8_t { Positive, Negative };

struct Duple {
    Term left;
    Term right;
    Sign sign = Sign::Positive;
};

inline Duple pos(Term l, Term r) { return {std::move(l), std::move(r), Sign::Positive}; }
inline Duple neg(Term l, Term r) { return {std::move(l), std::move(r), Sign::Negative}; }

/// Thrown when a batch of axioms is self-contradictory; carries the negative
/// duple whose dual check failed.
struct InconsistencyError : std::runtime_error {
    Duple duple;
    std::size_t batch_index;
    InconsistencyError(Duple d, std::size_t batch = 0)
        : std::runtime_error("axioms are inconsistent"),
          duple(std::move(d)), batch_index(batch) {}
};

/// A set of atoms over a fixed universe, deduplicated by upper segment.
/// When an atom is re-derived the existing atom's statistics win.
class AtomizedModel {
public:
    AtomizedModel() = default;
    explicit AtomizedModel(UniversePtr universe) : universe_(std::move(universe)) {}

    const UniversePtr& universe() const { return universe_; }
    std::size_t num_constants() const { return universe_->size(); }
    std::size_t size() const { return atoms_.size(); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const Atom& atom(std::size_t i) const { return atoms_[i]; }

    bool contains(const Bitset& upper) const { return index_.count(upper) != 0; }

    /// Returns the index of the stored atom (new or pre-existing).
    std::size_t add(Atom a) {
        if (a.upper.size() != universe_->size())
            throw std::invalid_argument("atom width does not match universe");
        auto it = index_.find(a.upper);
        if (it != index_.end()) return it->second;
        atoms_.push_back(std::move(a));
        index_.emplace(atoms_.back().upper, atoms_.size() - 1);
        return atoms_.size() - 1;
    }

    /// Rebuilds the model keeping only the atoms at `keep` indices.
    AtomizedModel restricted_to(const std::vector<std::uint32_t>& keep) const {
        AtomizedModel out(universe_);
        for (auto i : keep) out.add(atoms_[i]);
        return out;
    }

    bool same_atoms(const AtomizedModel& o) const {
        if (atoms_.size() != o.atoms_.size()) return false;
        for (const auto& a : atoms_)
            if (!o.contains(a.upper)) return false;
        return true;
    }

private:
    UniversePtr universe_;
    std::vector<Atom> atoms_;
    std::unordered_map<Bitset, std::size_t, BitsetHash> index_;
};

inline void validate_term(const AtomizedModel& model, const Term& t) {
    if (t.width() != model.num_constants())
        throw std::invalid_argument("term width does not match model universe");
}

/// Freest semilattice over the universe: one singleton atom per constant.
inline AtomizedModel freest_empty_model(UniversePtr universe) {
    if (!universe || universe->size() == 0)
        throw std::invalid_argument("empty universe");
    AtomizedModel m(universe);
    for (std::size_t c = 0; c < universe->size(); ++c) {
        Bitset u(universe->size());
        u.set(c);
        m.add(Atom(std::move(u), 0, 0));
    }
    return m;
}

/// Indices of the atoms below t: those whose upper segment meets C(t).
inline std::vector<std::uint32_t> lower_segment_indices(const AtomizedModel& model,
                                                        const Term& t) {
    validate_term(model, t);
    std::vector<std::uint32_t> out;
    const auto& atoms = model.atoms();
    for (std::uint32_t i = 0; i < atoms.size(); ++i)
        if (atoms[i].upper.intersects(t.constants())) out.push_back(i);
    return out;
}

inline std::vector<Atom> lower_atomic_segment(const AtomizedModel& model, const Term& t) {
    std::vector<Atom> out;
    for (auto i : lower_segment_indices(model, t)) out.push_back(model.atom(i));
    return out;
}

/// T_L ≤ T_R holds iff the lower segment of T_L is contained in that of T_R.
inline bool duple_holds(const AtomizedModel& model, const Term& left, const Term& right) {
    validate_term(model, left);
    validate_term(model, right);
    for (const auto& a : model.atoms())
        if (a.upper.intersects(left.constants()) && !a.upper.intersects(right.constants()))
            return false;
    return true;
}

inline bool duple_holds(const AtomizedModel& model, const Duple& d) {
    return duple_holds(model, d.left, d.right);
}

/// Whether the model agrees with the duple, sign included.
inline bool satisfies(const AtomizedModel& model, const Duple& d) {
    bool pos = duple_holds(model, d.left, d.right);
    return d.sign == Sign::Positive ? pos : !pos;
}

/// A single atom discriminates (left, right) when it lies below left but
/// not below right; this depends only on the atom.
inline bool atom_discriminates(const Atom& a, const Term& left, const Term& right) {
    return a.upper.intersects(left.constants()) && !a.upper.intersects(right.constants());
}

inline std::vector<std::uint32_t> discriminant_indices(const AtomizedModel& model,
                                                       const Term& left,
                                                       const Term& right) {
    validate_term(model, left);
    validate_term(model, right);
    std::vector<std::uint32_t> out;
    const auto& atoms = model.atoms();
    for (std::uint32_t i = 0; i < atoms.size(); ++i)
        if (atom_discriminates(atoms[i], left, right)) out.push_back(i);
    return out;
}

inline std::vector<Atom> discriminant(const AtomizedModel& model, const Duple& d) {
    std::vector<Atom> out;
    for (auto i : discriminant_indices(model, d.left, d.right)) out.push_back(model.atom(i));
    return out;
}

/// Union of atoms. When the union strictly widens `a`, the growth count
/// advances and the birth is stamped with the caller's step.
inline Atom atom_union(const Atom& a, const Atom& b, std::uint64_t step) {
    if (b.upper.subset_of(a.upper)) return a;
    Atom out(a.upper | b.upper, a.growth + 1, step);
    return out;
}

/// An atom is redundant when every constant of its upper segment is covered
/// by a strictly narrower atom of the model.
inline bool is_redundant(const AtomizedModel& model, const Atom& phi) {
    Bitset cover(phi.upper.size());
    for (const auto& eta : model.atoms()) {
        if (eta.upper.proper_subset_of(phi.upper)) {
            cover |= eta.upper;
            if (cover == phi.upper) return true;
        }
    }
    return false;
}

namespace detail {

/// Non-redundancy check against a size-sorted prefix of kept atoms. Every
/// redundant atom decomposes into non-redundant ones, so checking covers
/// against already-kept (narrower) atoms is exact.
inline bool covered_by(const Bitset& upper, const std::vector<const Bitset*>& kept) {
    Bitset cover(upper.size());
    for (const Bitset* u : kept) {
        if (u->proper_subset_of(upper)) {
            cover |= *u;
            if (cover == upper) return true;
        }
    }
    return false;
}

} // namespace detail

/// The unique non-redundant atomization of the same model. Duple truth is
/// unchanged for every duple.
inline AtomizedModel remove_redundant(const AtomizedModel& model) {
    std::vector<std::uint32_t> order(model.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return model.atom(a).size() < model.atom(b).size();
    });
    AtomizedModel out(model.universe());
    std::vector<const Bitset*> kept;
    for (auto i : order) {
        const Atom& a = model.atom(i);
        if (!detail::covered_by(a.upper, kept)) {
            out.add(a);
            kept.push_back(&a.upper);
        }
    }
    return out;
}

/// Term over the complement of the atom's upper segment; none when the atom
/// covers every constant.
inline std::optional<Term> pinning_term(const Atom& phi, std::size_t num_constants) {
    Bitset complement = Bitset::full(num_constants);
    complement.subtract(phi.upper);
    if (complement.none()) return std::nullopt;
    return Term(std::move(complement));
}

/// Histogram of |upper| over the non-redundant atoms.
inline std::map<std::size_t, std::size_t> atom_size_histogram(const AtomizedModel& model) {
    std::map<std::size_t, std::size_t> hist;
    const AtomizedModel core = remove_redundant(model);
    for (const auto& a : core.atoms()) ++hist[a.size()];
    return hist;
}

} // namespace aml

#endif
