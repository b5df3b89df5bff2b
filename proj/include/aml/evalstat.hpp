#ifndef AML_EVALSTAT_HPP
#define AML_EVALSTAT_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aml/axioms.hpp"
#include "aml/core.hpp"

namespace aml {

// ---------------------------------------------------------------------------
// misses and classification
// ---------------------------------------------------------------------------

/// Atoms below the label that are not below the term.
inline std::size_t count_misses(const AtomizedModel& model, std::uint32_t label_constant,
                                const Term& t) {
    validate_term(model, t);
    if (label_constant >= model.num_constants())
        throw std::invalid_argument("label constant out of range");
    std::size_t misses = 0;
    for (const auto& a : model.atoms())
        if (a.upper.test(label_constant) && !a.upper.intersects(t.constants())) ++misses;
    return misses;
}

/// Label with the fewest misses; ties go to the lowest label index.
inline std::size_t classify_fewest_misses(const AtomizedModel& model,
                                          std::span<const std::uint32_t> label_constants,
                                          const Term& t) {
    if (label_constants.empty()) throw std::invalid_argument("need at least one label");
    std::size_t best = 0, best_misses = count_misses(model, label_constants[0], t);
    for (std::size_t c = 1; c < label_constants.size(); ++c) {
        std::size_t m = count_misses(model, label_constants[c], t);
        if (m < best_misses) {
            best = c;
            best_misses = m;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// discriminative subset selection
// ---------------------------------------------------------------------------

/// Greedy passes over shuffled atoms: an atom enters a pass when it
/// discriminates some negative duple no earlier member of that pass does.
/// Passes accumulate until the target fraction of the model is reached, then
/// atoms without a label constant are dropped.
inline AtomizedModel select_atom_subset(const AtomizedModel& model, const AxiomSet& axioms,
                                        const std::vector<std::uint32_t>& negative_ids,
                                        double fraction,
                                        std::span<const std::uint32_t> label_constants,
                                        std::mt19937_64& rng) {
    if (fraction <= 0.0 || fraction > 1.0)
        throw std::invalid_argument("subset fraction must be in (0,1]");

    for (auto id : negative_ids) {
        const auto& e = axioms.entry(id);
        bool discriminated = false;
        for (const auto& a : model.atoms())
            if (atom_discriminates(a, axioms.term(e.left), axioms.term(e.right))) {
                discriminated = true;
                break;
            }
        if (!discriminated)
            throw std::invalid_argument("model fails negative duple #" + std::to_string(id));
    }

    Bitset label_mask(model.num_constants());
    for (auto c : label_constants) label_mask.set(c);

    const std::size_t target =
        std::max<std::size_t>(1, static_cast<std::size_t>(fraction * model.size()));
    std::vector<bool> picked(model.size(), false);
    std::size_t picked_count = 0;

    std::vector<std::uint32_t> order(model.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;

    while (picked_count < target) {
        std::size_t before = picked_count;
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<bool> covered(negative_ids.size(), false);
        std::size_t covered_count = 0;
        for (auto i : order) {
            const Atom& a = model.atom(i);
            bool adds = false;
            for (std::size_t r = 0; r < negative_ids.size(); ++r) {
                if (covered[r]) continue;
                const auto& e = axioms.entry(negative_ids[r]);
                if (atom_discriminates(a, axioms.term(e.left), axioms.term(e.right))) {
                    covered[r] = true;
                    ++covered_count;
                    adds = true;
                }
            }
            if (adds && !picked[i]) {
                picked[i] = true;
                ++picked_count;
            }
            if (covered_count == negative_ids.size()) break;
        }
        if (picked_count == before) break;  // pool of discriminating atoms exhausted
    }

    AtomizedModel out(model.universe());
    for (std::uint32_t i = 0; i < model.size(); ++i)
        if (picked[i] && model.atom(i).upper.intersects(label_mask)) out.add(model.atom(i));
    return out;
}

// ---------------------------------------------------------------------------
// expected false-negative estimators
// ---------------------------------------------------------------------------

struct AtomStats {
    std::uint64_t growth = 0;        // g
    std::uint64_t success_tail = 0;  // h = steps since last growth
};

inline AtomStats stats_of(const Atom& a, std::uint64_t global_step) {
    return {a.growth, global_step >= a.birth ? global_step - a.birth : 0};
}

/// Expected probability that one atom turns a positive test duple negative
/// after n positive training duples.
inline double expected_pfn_atom(std::uint64_t g, std::uint64_t h, std::uint64_t n) {
    return std::min(1.0 / (static_cast<double>(h) + 2.0),
                    (static_cast<double>(g) + 1.0) / (static_cast<double>(n) + 2.0));
}

/// First-order expected false-negative rate of a subset; may exceed 1,
/// read as a rate of at least one.
inline double expected_pfn_subset(std::span<const AtomStats> stats, std::uint64_t n) {
    double sum = 0.0;
    for (const auto& s : stats)
        sum += std::min(1.0 / (static_cast<double>(s.success_tail) + 1.0),
                        (static_cast<double>(s.growth) + 1.0) / (static_cast<double>(n) + 1.0));
    return sum;
}

struct LoadAndTransition {
    double load = 0.0;        // L
    double transition = 0.0;  // 1 − e^{−L}
};

inline LoadAndTransition load_and_transition(std::span<const AtomStats> stats,
                                             std::uint64_t j) {
    LoadAndTransition out;
    out.load = expected_pfn_subset(stats, j);
    out.transition = 1.0 - std::exp(-out.load);
    return out;
}

// ---------------------------------------------------------------------------
// empirical false-positive rates
// ---------------------------------------------------------------------------

inline double empirical_pfp_atom(const Atom& a, const AxiomSet& axioms,
                                 const std::vector<std::uint32_t>& negative_ids) {
    if (negative_ids.empty()) throw std::invalid_argument("no negative duples");
    std::size_t undiscriminated = 0;
    for (auto id : negative_ids) {
        const auto& e = axioms.entry(id);
        if (!atom_discriminates(a, axioms.term(e.left), axioms.term(e.right)))
            ++undiscriminated;
    }
    return static_cast<double>(undiscriminated) / static_cast<double>(negative_ids.size());
}

struct EmpiricalPfp {
    std::vector<double> per_atom;
    double joint = 0.0;                // fraction discriminated by no member
    double independence_product = 1.0; // Π per-atom rates, for comparison
};

inline EmpiricalPfp empirical_pfp(const AtomizedModel& model, const AxiomSet& axioms,
                                  const std::vector<std::uint32_t>& negative_ids) {
    if (negative_ids.empty()) throw std::invalid_argument("no negative duples");
    EmpiricalPfp out;
    out.per_atom.reserve(model.size());
    for (const auto& a : model.atoms()) {
        double r = empirical_pfp_atom(a, axioms, negative_ids);
        out.independence_product *= r;
        out.per_atom.push_back(r);
    }
    std::size_t misses = 0;
    for (auto id : negative_ids) {
        const auto& e = axioms.entry(id);
        bool discriminated = false;
        for (const auto& a : model.atoms())
            if (atom_discriminates(a, axioms.term(e.left), axioms.term(e.right))) {
                discriminated = true;
                break;
            }
        if (!discriminated) ++misses;
    }
    out.joint = static_cast<double>(misses) / static_cast<double>(negative_ids.size());
    return out;
}

// ---------------------------------------------------------------------------
// logistic head
// ---------------------------------------------------------------------------

/// Multinomial softmax over ±1 atom-activation vectors, trained full-batch
/// with adaptive-moment gradient steps (cross-entropy loss).
struct LogisticHead {
    std::size_t dim = 0;
    std::size_t classes = 0;
    std::vector<double> weights;  // classes × dim, row-major

    double weight(std::size_t c, std::size_t d) const { return weights[c * dim + d]; }
};

namespace detail {

inline void softmax_scores(const LogisticHead& head, std::span<const double> x,
                           std::vector<double>& probs) {
    probs.assign(head.classes, 0.0);
    double maxz = -1e300;
    for (std::size_t c = 0; c < head.classes; ++c) {
        double z = 0.0;
        for (std::size_t d = 0; d < head.dim; ++d) z += head.weights[c * head.dim + d] * x[d];
        probs[c] = z;
        maxz = std::max(maxz, z);
    }
    double sum = 0.0;
    for (auto& p : probs) {
        p = std::exp(p - maxz);
        sum += p;
    }
    for (auto& p : probs) p /= sum;
}

} // namespace detail

/// Mean cross-entropy over the dataset; used directly by the training loop
/// and by finite-difference checks.
inline double logistic_loss(const LogisticHead& head,
                            const std::vector<std::vector<double>>& inputs,
                            const std::vector<std::uint32_t>& targets) {
    double loss = 0.0;
    std::vector<double> probs;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        detail::softmax_scores(head, inputs[i], probs);
        loss += -std::log(std::max(probs[targets[i]], 1e-300));
    }
    return loss / static_cast<double>(inputs.size());
}

/// Analytic gradient of the mean cross-entropy w.r.t. the weights.
inline std::vector<double> logistic_gradient(const LogisticHead& head,
                                             const std::vector<std::vector<double>>& inputs,
                                             const std::vector<std::uint32_t>& targets) {
    std::vector<double> grad(head.classes * head.dim, 0.0);
    std::vector<double> probs;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        detail::softmax_scores(head, inputs[i], probs);
        for (std::size_t c = 0; c < head.classes; ++c) {
            double coeff = probs[c] - (targets[i] == c ? 1.0 : 0.0);
            for (std::size_t d = 0; d < head.dim; ++d)
                grad[c * head.dim + d] += coeff * inputs[i][d];
        }
    }
    double inv = 1.0 / static_cast<double>(inputs.size());
    for (auto& g : grad) g *= inv;
    return grad;
}

inline LogisticHead train_logistic_head(const std::vector<std::vector<double>>& inputs,
                                        const std::vector<std::uint32_t>& targets,
                                        std::size_t classes, std::size_t epochs,
                                        double learning_rate) {
    if (inputs.size() != targets.size())
        throw std::invalid_argument("inputs and targets differ in length");
    LogisticHead head;
    head.classes = classes;
    head.dim = inputs.empty() ? 0 : inputs[0].size();
    for (const auto& x : inputs)
        if (x.size() != head.dim) throw std::invalid_argument("ragged activation vectors");
    head.weights.assign(classes * head.dim, 0.0);

    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::vector<double> m(head.weights.size(), 0.0), v(head.weights.size(), 0.0);
    for (std::size_t t = 1; t <= epochs; ++t) {
        auto grad = logistic_gradient(head, inputs, targets);
        double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < grad.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            head.weights[i] -= learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    }
    return head;
}

/// Ties go to the lowest class, so zero weights predict class 0.
inline std::size_t logistic_predict(const LogisticHead& head, std::span<const double> x) {
    if (x.size() != head.dim) throw std::invalid_argument("activation length mismatch");
    std::vector<double> probs;
    detail::softmax_scores(head, x, probs);
    std::size_t best = 0;
    for (std::size_t c = 1; c < head.classes; ++c)
        if (probs[c] > probs[best]) best = c;
    return best;
}

/// ±1 activation of the model's atoms on a term: +1 when the atom lies in
/// the term's lower segment.
inline std::vector<double> atom_activations(const AtomizedModel& model, const Term& t) {
    std::vector<double> out;
    out.reserve(model.size());
    for (const auto& a : model.atoms())
        out.push_back(a.upper.intersects(t.constants()) ? 1.0 : -1.0);
    return out;
}

} // namespace aml

#endif
