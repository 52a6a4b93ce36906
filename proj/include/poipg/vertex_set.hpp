#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "poipg/errors.hpp"

namespace poipg {

// Set of vertex ids in [0, 64), packed into one word. Iteration ascends by id.
class VertexSet {
public:
    static constexpr int max_id = 64;

    constexpr VertexSet() = default;
    VertexSet(std::initializer_list<int> ids) {
        for (int id : ids) insert(id);
    }

    static constexpr VertexSet from_bits(std::uint64_t bits) {
        VertexSet s;
        s.bits_ = bits;
        return s;
    }
    static VertexSet single(int id) {
        VertexSet s;
        s.insert(id);
        return s;
    }
    // {0, 1, .., n-1}
    static VertexSet first_n(int n) {
        if (n < 0 || n > max_id) throw GraphError("vertex count out of range: " + std::to_string(n));
        return from_bits(n == max_id ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
    }

    void insert(int id) {
        check(id);
        bits_ |= bit(id);
    }
    void erase(int id) {
        check(id);
        bits_ &= ~bit(id);
    }
    bool contains(int id) const { return id >= 0 && id < max_id && (bits_ & bit(id)) != 0; }
    VertexSet with(int id) const {
        VertexSet s = *this;
        s.insert(id);
        return s;
    }
    VertexSet without(int id) const {
        VertexSet s = *this;
        s.erase(id);
        return s;
    }

    bool empty() const { return bits_ == 0; }
    int size() const { return std::popcount(bits_); }
    // lowest member id; the canonical representative used when ordering set pairs
    int min() const {
        if (empty()) throw GraphError("min() on empty vertex set");
        return std::countr_zero(bits_);
    }
    bool intersects(VertexSet o) const { return (bits_ & o.bits_) != 0; }
    bool subset_of(VertexSet o) const { return (bits_ & ~o.bits_) == 0; }

    friend constexpr VertexSet operator|(VertexSet a, VertexSet b) { return from_bits(a.bits_ | b.bits_); }
    friend constexpr VertexSet operator&(VertexSet a, VertexSet b) { return from_bits(a.bits_ & b.bits_); }
    friend constexpr VertexSet operator-(VertexSet a, VertexSet b) { return from_bits(a.bits_ & ~b.bits_); }
    auto operator<=>(const VertexSet&) const = default;

    std::uint64_t bits() const { return bits_; }
    std::vector<int> to_vector() const {
        std::vector<int> v;
        v.reserve(static_cast<std::size_t>(size()));
        for (int id : *this) v.push_back(id);
        return v;
    }

    class const_iterator {
    public:
        using value_type = int;
        int operator*() const { return std::countr_zero(rest_); }
        const_iterator& operator++() {
            rest_ &= rest_ - 1;
            return *this;
        }
        bool operator==(const const_iterator& o) const { return rest_ == o.rest_; }
        bool operator!=(const const_iterator& o) const { return rest_ != o.rest_; }

    private:
        friend class VertexSet;
        explicit const_iterator(std::uint64_t r) : rest_(r) {}
        std::uint64_t rest_;
    };
    const_iterator begin() const { return const_iterator(bits_); }
    const_iterator end() const { return const_iterator(0); }

private:
    static constexpr std::uint64_t bit(int id) { return std::uint64_t{1} << id; }
    static void check(int id) {
        if (id < 0 || id >= max_id) throw GraphError("vertex id out of range: " + std::to_string(id));
    }
    std::uint64_t bits_ = 0;
};

}  // namespace poipg
