#ifndef AML_EMBED_HPP
#define AML_EMBED_HPP

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aml/axioms.hpp"
#include "aml/core.hpp"

namespace aml {

// ---------------------------------------------------------------------------
// images
// ---------------------------------------------------------------------------

/// Constant layout for image tasks. Binary images use two constants per
/// pixel (black/white); graded images use two intensity-ordered chain
/// families per pixel and channel. Label constants sit at the end of the
/// universe in class order.
struct ImageEmbeddingSpec {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 1;
    std::size_t levels = 2;
    std::vector<std::string> labels;

    std::size_t pixels() const { return height * width * channels; }
    std::size_t constants_per_pixel() const { return levels == 2 ? 2 : 2 * levels; }
    std::size_t pixel_constants() const { return pixels() * constants_per_pixel(); }
    std::size_t num_constants() const { return pixel_constants() + labels.size(); }

    std::size_t pixel_index(std::size_t i, std::size_t j, std::size_t k = 0) const {
        return (i * width + j) * channels + k;
    }

    // binary layout: [black, white] per pixel
    std::uint32_t black(std::size_t i, std::size_t j, std::size_t k = 0) const {
        return static_cast<std::uint32_t>(2 * pixel_index(i, j, k));
    }
    std::uint32_t white(std::size_t i, std::size_t j, std::size_t k = 0) const {
        return static_cast<std::uint32_t>(2 * pixel_index(i, j, k) + 1);
    }

    // graded layout: [asc(0..levels-1), desc(0..levels-1)] per pixel/channel
    std::uint32_t ascending(std::size_t i, std::size_t j, std::size_t k,
                            std::size_t level) const {
        return static_cast<std::uint32_t>(pixel_index(i, j, k) * 2 * levels + level);
    }
    std::uint32_t descending(std::size_t i, std::size_t j, std::size_t k,
                             std::size_t level) const {
        return static_cast<std::uint32_t>(pixel_index(i, j, k) * 2 * levels + levels + level);
    }

    std::uint32_t label_constant(std::size_t cls) const {
        return static_cast<std::uint32_t>(pixel_constants() + cls);
    }

    UniversePtr make_universe() const {
        std::vector<std::string> names(num_constants());
        char buf[64];
        for (std::size_t i = 0; i < height; ++i)
            for (std::size_t j = 0; j < width; ++j)
                for (std::size_t k = 0; k < channels; ++k) {
                    if (levels == 2) {
                        std::snprintf(buf, sizeof buf, "black(%zu,%zu)", i + 1, j + 1);
                        names[black(i, j, k)] = channels == 1 ? buf : buf + std::string("@") + std::to_string(k);
                        std::snprintf(buf, sizeof buf, "white(%zu,%zu)", i + 1, j + 1);
                        names[white(i, j, k)] = channels == 1 ? buf : buf + std::string("@") + std::to_string(k);
                    } else {
                        for (std::size_t v = 0; v < levels; ++v) {
                            std::snprintf(buf, sizeof buf, "l(%zu,%zu,%zu,%zu)", i + 1, j + 1, k, v);
                            names[ascending(i, j, k, v)] = buf;
                            std::snprintf(buf, sizeof buf, "g(%zu,%zu,%zu,%zu)", i + 1, j + 1, k, v);
                            names[descending(i, j, k, v)] = buf;
                        }
                    }
                }
        for (std::size_t c = 0; c < labels.size(); ++c)
            names[label_constant(c)] = labels[c];
        return make_universe_checked(std::move(names));
    }

private:
    static UniversePtr make_universe_checked(std::vector<std::string> names) {
        return aml::make_universe(std::move(names));
    }
};

/// Term of an H×W binary image: one constant per pixel, in its observed
/// color.
inline Term embed_binary_image(const ImageEmbeddingSpec& spec,
                               const std::vector<bool>& pixels_black) {
    if (spec.levels != 2) throw std::invalid_argument("binary embedding needs levels == 2");
    if (pixels_black.size() != spec.pixels())
        throw std::invalid_argument("pixel count does not match spec");
    Bitset cs(spec.num_constants());
    for (std::size_t i = 0; i < spec.height; ++i)
        for (std::size_t j = 0; j < spec.width; ++j)
            for (std::size_t k = 0; k < spec.channels; ++k)
                cs.set(pixels_black[spec.pixel_index(i, j, k)] ? spec.black(i, j, k)
                                                               : spec.white(i, j, k));
    return Term(std::move(cs));
}

/// Term of a graded image: an ascending- and a descending-chain constant per
/// pixel and channel.
inline Term embed_graded_image(const ImageEmbeddingSpec& spec,
                               const std::vector<std::uint32_t>& intensities) {
    if (spec.levels < 2) throw std::invalid_argument("graded embedding needs levels >= 2");
    if (intensities.size() != spec.pixels())
        throw std::invalid_argument("intensity count does not match spec");
    Bitset cs(spec.num_constants());
    for (std::size_t i = 0; i < spec.height; ++i)
        for (std::size_t j = 0; j < spec.width; ++j)
            for (std::size_t k = 0; k < spec.channels; ++k) {
                std::uint32_t v = intensities[spec.pixel_index(i, j, k)];
                if (v >= spec.levels) throw std::invalid_argument("intensity out of range");
                if (spec.levels == 2) {
                    cs.set(v ? spec.black(i, j, k) : spec.white(i, j, k));
                } else {
                    cs.set(spec.ascending(i, j, k, v));
                    cs.set(spec.descending(i, j, k, v));
                }
            }
    return Term(std::move(cs));
}

/// The chain order duples, emitted once per spec: l(v) ≤ l(v+1) and
/// g(v+1) ≤ g(v) for every pixel/channel, 2·(levels−1) duples each.
inline std::vector<Duple> chain_duples(const ImageEmbeddingSpec& spec) {
    std::vector<Duple> out;
    if (spec.levels == 2) return out;
    const std::size_t nc = spec.num_constants();
    for (std::size_t i = 0; i < spec.height; ++i)
        for (std::size_t j = 0; j < spec.width; ++j)
            for (std::size_t k = 0; k < spec.channels; ++k)
                for (std::size_t v = 0; v + 1 < spec.levels; ++v) {
                    out.push_back(pos(Term::single(nc, spec.ascending(i, j, k, v)),
                                      Term::single(nc, spec.ascending(i, j, k, v + 1))));
                    out.push_back(pos(Term::single(nc, spec.descending(i, j, k, v + 1)),
                                      Term::single(nc, spec.descending(i, j, k, v))));
                }
    return out;
}

/// One positive duple label ≤ term per example, and one negative duple per
/// example per other class.
inline AxiomSet build_classification_axioms(const ImageEmbeddingSpec& spec,
                                            const std::vector<Term>& terms,
                                            const std::vector<std::uint32_t>& classes) {
    if (terms.size() != classes.size())
        throw std::invalid_argument("terms and classes differ in length");
    AxiomSet ax(spec.num_constants());
    for (const auto& d : chain_duples(spec)) ax.add(d);
    const std::size_t ncls = spec.labels.size();
    for (std::size_t e = 0; e < terms.size(); ++e) {
        if (classes[e] >= ncls) throw std::invalid_argument("class label out of range");
        Term label = Term::single(spec.num_constants(), spec.label_constant(classes[e]));
        ax.add_positive(label, terms[e]);
        for (std::size_t c = 0; c < ncls; ++c)
            if (c != classes[e])
                ax.add_negative(Term::single(spec.num_constants(), spec.label_constant(c)),
                                terms[e]);
    }
    return ax;
}

/// Quantizes an 8-bit intensity to `levels` equidistant steps.
inline std::uint32_t quantize_intensity(std::uint8_t raw, std::size_t levels) {
    return static_cast<std::uint32_t>(raw * levels / 256);
}

// ---------------------------------------------------------------------------
// the vertical-bar toy rule
// ---------------------------------------------------------------------------

/// n×n binary images: the rule holds when column 1 is entirely black and no
/// other column is. Pixels are row-major; bit set = black.
inline bool vertical_bar_rule(std::size_t n, const std::vector<bool>& black) {
    for (std::size_t i = 0; i < n; ++i)
        if (!black[i * n]) return false;
    for (std::size_t j = 1; j < n; ++j) {
        bool all = true;
        for (std::size_t i = 0; i < n; ++i)
            if (!black[i * n + j]) { all = false; break; }
        if (all) return false;
    }
    return true;
}

inline ImageEmbeddingSpec vertical_bar_spec(std::size_t n) {
    ImageEmbeddingSpec spec;
    spec.height = n;
    spec.width = n;
    spec.labels = {"p"};
    return spec;
}

struct VerticalBarDataset {
    ImageEmbeddingSpec spec;
    std::vector<Term> positives;   // all images obeying the rule
    std::vector<Term> negatives;   // all violating images (full enumeration only)
};

/// Enumerates the rule's positive images; with `full_count` also the
/// complete set of violating images. (2^n − 1)^(n−1) positives exist.
inline VerticalBarDataset generate_vertical_bar_dataset(std::size_t n, bool full_count) {
    if (n < 2) throw std::invalid_argument("side must be at least 2");
    if (n * n > 30) throw std::invalid_argument("enumeration too large");
    VerticalBarDataset out;
    out.spec = vertical_bar_spec(n);
    const std::size_t total = std::size_t(1) << (n * n);
    std::vector<bool> black(n * n);
    for (std::size_t mask = 0; mask < total; ++mask) {
        for (std::size_t p = 0; p < n * n; ++p) black[p] = (mask >> p) & 1;
        bool ok = vertical_bar_rule(n, black);
        if (ok) out.positives.push_back(embed_binary_image(out.spec, black));
        else if (full_count) out.negatives.push_back(embed_binary_image(out.spec, black));
    }
    return out;
}

/// Samples distinct random images violating the rule.
inline std::vector<Term> sample_vertical_bar_counterexamples(std::size_t n,
                                                             std::size_t count,
                                                             std::mt19937_64& rng) {
    std::vector<Term> out;
    std::unordered_map<Bitset, bool, BitsetHash> seen;
    ImageEmbeddingSpec spec = vertical_bar_spec(n);
    std::uniform_int_distribution<std::size_t> bits(0, (std::size_t(1) << (n * n)) - 1);
    std::vector<bool> black(n * n);
    while (out.size() < count) {
        std::size_t mask = bits(rng);
        for (std::size_t p = 0; p < n * n; ++p) black[p] = (mask >> p) & 1;
        if (vertical_bar_rule(n, black)) continue;
        Term t = embed_binary_image(spec, black);
        if (seen.emplace(t.constants(), true).second) out.push_back(std::move(t));
    }
    return out;
}

/// p ≤ image for the positives plus p ≰ image for the counterexamples.
inline AxiomSet vertical_bar_axioms(const ImageEmbeddingSpec& spec,
                                    const std::vector<Term>& positives,
                                    const std::vector<Term>& counterexamples) {
    AxiomSet ax(spec.num_constants());
    Term p = Term::single(spec.num_constants(), spec.label_constant(0));
    for (const auto& t : positives) ax.add_positive(p, t);
    for (const auto& t : counterexamples) ax.add_negative(p, t);
    return ax;
}

// ---------------------------------------------------------------------------
// IDX files
// ---------------------------------------------------------------------------

struct IdxImages {
    std::size_t count = 0, rows = 0, cols = 0;
    std::vector<std::uint8_t> pixels;  // count × rows × cols

    const std::uint8_t* image(std::size_t i) const { return pixels.data() + i * rows * cols; }
};

namespace detail {
inline std::uint32_t read_be32(std::istream& in) {
    std::array<unsigned char, 4> b{};
    in.read(reinterpret_cast<char*>(b.data()), 4);
    if (!in) throw std::runtime_error("truncated IDX header");
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}
} // namespace detail

inline IdxImages read_idx_images(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    if (detail::read_be32(in) != 0x00000803u)
        throw std::runtime_error(path + ": bad image magic");
    IdxImages out;
    out.count = detail::read_be32(in);
    out.rows = detail::read_be32(in);
    out.cols = detail::read_be32(in);
    out.pixels.resize(out.count * out.rows * out.cols);
    in.read(reinterpret_cast<char*>(out.pixels.data()),
            static_cast<std::streamsize>(out.pixels.size()));
    if (!in) throw std::runtime_error(path + ": truncated image data");
    return out;
}

inline std::vector<std::uint8_t> read_idx_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    if (detail::read_be32(in) != 0x00000801u)
        throw std::runtime_error(path + ": bad label magic");
    std::vector<std::uint8_t> out(detail::read_be32(in));
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!in) throw std::runtime_error(path + ": truncated label data");
    return out;
}

inline void write_idx_images(const std::string& path, const IdxImages& imgs) {
    std::ofstream out(path, std::ios::binary);
    auto be32 = [&](std::uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
        out.write(reinterpret_cast<char*>(b), 4);
    };
    be32(0x00000803u);
    be32(static_cast<std::uint32_t>(imgs.count));
    be32(static_cast<std::uint32_t>(imgs.rows));
    be32(static_cast<std::uint32_t>(imgs.cols));
    out.write(reinterpret_cast<const char*>(imgs.pixels.data()),
              static_cast<std::streamsize>(imgs.pixels.size()));
}

inline void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
    std::ofstream out(path, std::ios::binary);
    auto be32 = [&](std::uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
        out.write(reinterpret_cast<char*>(b), 4);
    };
    be32(0x00000801u);
    be32(static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
}

/// Binary embedding of an 8-bit grayscale image: pixel ≥ threshold is black.
inline Term embed_thresholded_image(const ImageEmbeddingSpec& spec,
                                    const std::uint8_t* raw, std::uint8_t threshold = 128) {
    std::vector<bool> black(spec.pixels());
    for (std::size_t p = 0; p < spec.pixels(); ++p) black[p] = raw[p] >= threshold;
    return embed_binary_image(spec, black);
}

// ---------------------------------------------------------------------------
// Hamiltonian cycles
// ---------------------------------------------------------------------------

struct GraphSpec {
    std::size_t num_nodes = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // 0-based, r < s

    void validate() const {
        if (num_nodes < 3) throw std::invalid_argument("graph needs at least 3 nodes");
        std::unordered_map<std::uint64_t, bool> seen;
        for (auto [r, s] : edges) {
            if (r == s) throw std::invalid_argument("self-loop in edge list");
            if (r >= num_nodes || s >= num_nodes)
                throw std::invalid_argument("edge endpoint out of range");
            std::uint64_t key = (std::uint64_t(std::min(r, s)) << 32) | std::max(r, s);
            if (!seen.emplace(key, true).second)
                throw std::invalid_argument("duplicate edge in edge list");
        }
    }

    bool connected() const {
        if (num_nodes == 0) return false;
        std::vector<std::vector<std::uint32_t>> adj(num_nodes);
        for (auto [r, s] : edges) {
            adj[r].push_back(s);
            adj[s].push_back(r);
        }
        std::vector<bool> vis(num_nodes, false);
        std::queue<std::uint32_t> q;
        q.push(0);
        vis[0] = true;
        std::size_t n = 1;
        while (!q.empty()) {
            auto u = q.front();
            q.pop();
            for (auto w : adj[u])
                if (!vis[w]) {
                    vis[w] = true;
                    ++n;
                    q.push(w);
                }
        }
        return n == num_nodes;
    }

    std::vector<std::vector<std::uint32_t>> incident_edges() const {
        std::vector<std::vector<std::uint32_t>> out(num_nodes);
        for (std::uint32_t k = 0; k < edges.size(); ++k) {
            out[edges[k].first].push_back(k);
            out[edges[k].second].push_back(k);
        }
        return out;
    }
};

/// Edge list file: first line "v e", then one "a b" pair per line, 1-based.
inline GraphSpec read_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    GraphSpec g;
    std::size_t e = 0;
    if (!(in >> g.num_nodes >> e)) throw std::runtime_error(path + ": bad header line");
    for (std::size_t k = 0; k < e; ++k) {
        std::uint32_t a, b;
        if (!(in >> a >> b)) throw std::runtime_error(path + ": truncated edge list");
        if (a == 0 || b == 0) throw std::runtime_error(path + ": node ids are 1-based");
        g.edges.emplace_back(a - 1, b - 1);
    }
    g.validate();
    return g;
}

/// Constant layout of the cycle embedding: 2v + 5e + 2 constants.
struct HamiltonianEmbedding {
    GraphSpec graph;
    UniversePtr universe;
    AxiomSet axioms;

    std::uint32_t node(std::size_t i) const { return static_cast<std::uint32_t>(i); }
    std::uint32_t edge(std::size_t k) const {
        return static_cast<std::uint32_t>(graph.num_nodes + k);
    }
    std::uint32_t no_edge(std::size_t k) const {
        return static_cast<std::uint32_t>(graph.num_nodes + graph.edges.size() + k);
    }
    std::uint32_t weak_edge(std::size_t k) const {  // Z_k
        return static_cast<std::uint32_t>(graph.num_nodes + 2 * graph.edges.size() + k);
    }
    std::uint32_t edge_context(std::size_t k) const {  // g_k
        return static_cast<std::uint32_t>(graph.num_nodes + 3 * graph.edges.size() + k);
    }
    std::uint32_t gap_context(std::size_t k) const {  // h_k
        return static_cast<std::uint32_t>(graph.num_nodes + 4 * graph.edges.size() + k);
    }
    std::uint32_t node_id(std::size_t i) const {
        return static_cast<std::uint32_t>(graph.num_nodes + 5 * graph.edges.size() + i);
    }
    std::uint32_t path() const {
        return static_cast<std::uint32_t>(2 * graph.num_nodes + 5 * graph.edges.size());
    }
    std::uint32_t wrong() const {
        return static_cast<std::uint32_t>(2 * graph.num_nodes + 5 * graph.edges.size() + 1);
    }
    std::size_t num_constants() const {
        return 2 * graph.num_nodes + 5 * graph.edges.size() + 2;
    }

    HamiltonianEmbedding(GraphSpec g) : graph(std::move(g)), axioms(0) {
        graph.validate();
        if (!graph.connected()) throw std::invalid_argument("graph must be connected");

        std::vector<std::string> names(num_constants());
        for (std::size_t i = 0; i < graph.num_nodes; ++i) {
            names[node(i)] = "V" + std::to_string(i + 1);
            names[node_id(i)] = "id" + std::to_string(i + 1);
        }
        for (std::size_t k = 0; k < graph.edges.size(); ++k) {
            names[edge(k)] = "E" + std::to_string(k + 1);
            names[no_edge(k)] = "nE" + std::to_string(k + 1);
            names[weak_edge(k)] = "Z" + std::to_string(k + 1);
            names[edge_context(k)] = "g" + std::to_string(k + 1);
            names[gap_context(k)] = "h" + std::to_string(k + 1);
        }
        names[path()] = "P";
        names[wrong()] = "W";
        universe = make_universe(std::move(names));
        axioms = build_axioms();
    }

private:
    AxiomSet build_axioms() const {
        const std::size_t nc = num_constants();
        const std::size_t v = graph.num_nodes;
        const std::size_t e = graph.edges.size();
        AxiomSet ax(nc);

        auto single = [&](std::uint32_t c) { return Term::single(nc, c); };
        auto add_equality = [&](const Term& a, const Term& b) {
            ax.add_positive(a, b);
            ax.add_positive(b, a);
        };

        // edge topology: V_r ⊙ V_s ≤ E_k
        for (std::size_t k = 0; k < e; ++k)
            ax.add_positive(Term(nc, {node(graph.edges[k].first), node(graph.edges[k].second)}),
                            single(edge(k)));

        // Z_k ≤ E_k ⊙ nE_k
        for (std::size_t k = 0; k < e; ++k)
            ax.add_positive(single(weak_edge(k)), Term(nc, {edge(k), no_edge(k)}));

        // ⊙V_i ≤ P and ⊙Z_k = P
        {
            std::vector<std::uint32_t> vs, zs;
            for (std::size_t i = 0; i < v; ++i) vs.push_back(node(i));
            for (std::size_t k = 0; k < e; ++k) zs.push_back(weak_edge(k));
            ax.add_positive(Term(nc, vs), single(path()));
            add_equality(Term(nc, zs), single(path()));
        }

        // wrong paths: W ≤ E_k ⊙ nE_k ⊙ P, plus the negative W ≰ P
        for (std::size_t k = 0; k < e; ++k)
            ax.add_positive(single(wrong()), Term(nc, {edge(k), no_edge(k), path()}));
        ax.add_negative(single(wrong()), single(path()));

        // per-node two-edge path equalities
        auto incident = graph.incident_edges();
        for (std::size_t i = 0; i < v; ++i) {
            const auto& inc = incident[i];
            for (std::size_t a = 0; a < inc.size(); ++a)
                for (std::size_t b = a + 1; b < inc.size(); ++b) {
                    std::vector<std::uint32_t> lhs{path()};
                    for (auto x : inc)
                        if (x != inc[a] && x != inc[b]) lhs.push_back(no_edge(x));
                    Term left(nc, lhs);
                    Term right(nc, {edge(inc[a]), edge(inc[b]), path()});
                    add_equality(left, right);
                }
        }

        // per-node negatives: V_i and id_i do not follow from the rest of the
        // graph with every edge absent
        for (std::size_t i = 0; i < v; ++i) {
            std::vector<std::uint32_t> rhs;
            for (std::size_t j = 0; j < v; ++j)
                if (j != i) {
                    rhs.push_back(node(j));
                    rhs.push_back(node_id(j));
                }
            for (std::size_t k = 0; k < e; ++k) rhs.push_back(no_edge(k));
            for (std::size_t k = 0; k < e; ++k)
                if (graph.edges[k].first != i && graph.edges[k].second != i)
                    rhs.push_back(edge(k));
            Term right(nc, rhs);
            ax.add_negative(single(node(i)), right);
            ax.add_negative(single(node_id(i)), right);
        }

        // identity propagation along edges: E_k ⊙ id_r = id_s ⊙ E_k
        for (std::size_t k = 0; k < e; ++k)
            add_equality(Term(nc, {edge(k), node_id(graph.edges[k].first)}),
                         Term(nc, {edge(k), node_id(graph.edges[k].second)}));

        // connectivity star: P ⊙ id_1 = id_j ⊙ P for every j
        for (std::size_t j = 0; j < v; ++j)
            add_equality(Term(nc, {path(), node_id(0)}), Term(nc, {path(), node_id(j)}));

        // contexts tying Z_k to E_k and nE_k
        for (std::size_t k = 0; k < e; ++k) {
            add_equality(Term(nc, {edge_context(k), weak_edge(k)}),
                         Term(nc, {edge_context(k), edge(k)}));
            add_equality(Term(nc, {gap_context(k), weak_edge(k)}),
                         Term(nc, {gap_context(k), no_edge(k)}));
        }
        return ax;
    }
};

struct PathInterpretation {
    std::vector<std::uint32_t> edges;  // k with E_k ≤ P in the model
    bool hamiltonian_cycle = false;
};

/// Collects the edges the model places below the path constant and checks,
/// with a plain graph test, whether they form a single cycle through every
/// node.
inline PathInterpretation interpret_path(const AtomizedModel& model,
                                         const HamiltonianEmbedding& emb) {
    PathInterpretation out;
    const std::size_t nc = emb.num_constants();
    Term p = Term::single(nc, emb.path());
    for (std::size_t k = 0; k < emb.graph.edges.size(); ++k)
        if (duple_holds(model, Term::single(nc, emb.edge(k)), p))
            out.edges.push_back(static_cast<std::uint32_t>(k));

    const std::size_t v = emb.graph.num_nodes;
    if (out.edges.size() != v) return out;
    std::vector<std::vector<std::uint32_t>> adj(v);
    for (auto k : out.edges) {
        adj[emb.graph.edges[k].first].push_back(emb.graph.edges[k].second);
        adj[emb.graph.edges[k].second].push_back(emb.graph.edges[k].first);
    }
    for (std::size_t i = 0; i < v; ++i)
        if (adj[i].size() != 2) return out;
    // degree 2 everywhere and v edges: a cycle iff connected
    std::vector<bool> vis(v, false);
    std::size_t cur = 0, prev = v, seen = 0;
    while (!vis[cur]) {
        vis[cur] = true;
        ++seen;
        std::size_t next = (adj[cur][0] != prev || adj[cur][1] == prev) ? adj[cur][0]
                                                                        : adj[cur][1];
        prev = cur;
        cur = next;
    }
    out.hamiltonian_cycle = seen == v;
    return out;
}

/// Registers a dead-end path: W ≤ ⊙ of its edge constants. The standing
/// negative W ≰ P then rules the path out.
inline void add_unwanted_path(AxiomSet& axioms, const HamiltonianEmbedding& emb,
                              const std::vector<std::uint32_t>& edge_ids) {
    if (edge_ids.empty()) throw std::invalid_argument("unwanted path needs edges");
    std::vector<std::uint32_t> cs;
    for (auto k : edge_ids) cs.push_back(emb.edge(k));
    axioms.add_positive(Term::single(emb.num_constants(), emb.wrong()),
                        Term(emb.num_constants(), cs));
}

} // namespace aml

#endif
