#ifndef AML_BITSET_HPP
#define AML_BITSET_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace aml {

/// Fixed-width bit vector. Width is set at construction and never changes;
/// all binary operations require equal widths. Set algebra on constant sets
/// and dual-atom index sets runs through this class, so everything is
/// word-wise over uint64_t.
class Bitset {
public:
    Bitset() = default;

    explicit Bitset(std::size_t nbits)
        : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    static Bitset full(std::size_t nbits) {
        Bitset b(nbits);
        for (auto& w : b.words_) w = ~0ULL;
        b.trim();
        return b;
    }

    std::size_t size() const { return nbits_; }

    void set(std::size_t i) { words_[i >> 6] |= (1ULL << (i & 63)); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_) n += std::popcount(w);
        return n;
    }

    bool any() const {
        for (auto w : words_) if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    Bitset& operator|=(const Bitset& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    Bitset& operator&=(const Bitset& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    /// this \ o
    Bitset& subtract(const Bitset& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }

    friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }
    friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }

    bool operator==(const Bitset& o) const { return words_ == o.words_; }
    bool operator!=(const Bitset& o) const { return words_ != o.words_; }

    bool subset_of(const Bitset& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }
    bool proper_subset_of(const Bitset& o) const {
        return subset_of(o) && words_ != o.words_;
    }
    bool intersects(const Bitset& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }
    bool disjoint_from(const Bitset& o) const { return !intersects(o); }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            std::uint64_t w = words_[wi];
            while (w) {
                fn(wi * 64 + std::countr_zero(w));
                w &= w - 1;
            }
        }
    }

    std::vector<std::uint32_t> indices() const {
        std::vector<std::uint32_t> out;
        out.reserve(count());
        for_each([&](std::size_t i) { out.push_back(static_cast<std::uint32_t>(i)); });
        return out;
    }

    /// Lowest set bit, or size() when empty.
    std::size_t first_set() const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi)
            if (words_[wi]) return wi * 64 + std::countr_zero(words_[wi]);
        return nbits_;
    }

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ nbits_;
        for (auto w : words_) {
            h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
        }
        return static_cast<std::size_t>(h);
    }

    std::size_t word_count() const { return words_.size(); }
    const std::uint64_t* data() const { return words_.data(); }

    /// Overwrites with a | b; all three must share a width. No allocation
    /// once capacity is established.
    void assign_or(const Bitset& a, const Bitset& b) {
        nbits_ = a.nbits_;
        words_.resize(a.words_.size());
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] = a.words_[i] | b.words_[i];
    }

private:
    void trim() {
        if (nbits_ & 63) words_.back() &= (1ULL << (nbits_ & 63)) - 1;
    }

    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitsetHash {
    std::size_t operator()(const Bitset& b) const { return b.hash(); }
};

} // namespace aml

#endif
