#ifndef AML_TRACE_HPP
#define AML_TRACE_HPP

#include <span>
#include <vector>

#include "aml/core.hpp"
#include "aml/dual.hpp"

namespace aml {

/// Trace of an atom: union of the dual lower segments of its upper
/// constants. Universal — depends on the dual only, not on any model.
inline Bitset trace_of_atom(const Atom& phi, const Dual& dual) {
    Bitset tr(dual.size());
    phi.upper.for_each([&](std::size_t c) { tr |= dual.constant_segment(c); });
    return tr;
}

inline std::vector<Bitset> traces_of_atoms(std::span<const Atom> atoms, const Dual& dual) {
    std::vector<Bitset> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) out.push_back(trace_of_atom(a, dual));
    return out;
}

/// Trace of a term in a model: intersection of the traces of the atoms in
/// its lower segment. An empty segment yields the full dual index set (the
/// identity of intersection); callers treat that as a model defect.
inline Bitset trace_of_term_cached(const Term& t, std::span<const Atom> atoms,
                                   std::span<const Bitset> atom_traces,
                                   const Dual& dual) {
    Bitset tr = Bitset::full(dual.size());
    for (std::size_t i = 0; i < atoms.size(); ++i)
        if (atoms[i].upper.intersects(t.constants())) tr &= atom_traces[i];
    return tr;
}

inline Bitset trace_of_term(const Term& t, const AtomizedModel& model, const Dual& dual) {
    Bitset tr = Bitset::full(dual.size());
    for (const auto& a : model.atoms())
        if (a.upper.intersects(t.constants())) tr &= trace_of_atom(a, dual);
    return tr;
}

} // namespace aml

#endif
