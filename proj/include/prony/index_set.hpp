#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prony {

/// A d-tuple of integers. Torus moment indices may be negative.
struct MultiIndex {
    std::vector<int> entries;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> e) : entries(std::move(e)) {}
    MultiIndex(std::initializer_list<int> e) : entries(e) {}

    int dimension() const { return static_cast<int>(entries.size()); }
    int operator[](std::size_t i) const { return entries[i]; }

    /// Sum of the entries.
    int total_degree() const;
    /// Largest absolute entry.
    int max_degree() const;

    auto operator<=>(const MultiIndex&) const = default;
};

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b);
MultiIndex operator-(const MultiIndex& a);
std::string to_string(const MultiIndex& k);

enum class IndexShape {
    TotalDegree,   ///< k >= 0, |k| <= n
    Box,           ///< {0..n}^d
    SymmetricBox,  ///< {-n..n}^d
};

/// Finite, deterministically ordered set of multi-indices.
///
/// TotalDegree is enumerated by increasing total degree; inside one degree
/// the order is lexicographically decreasing, so (1,0) precedes (0,1).
/// Box and SymmetricBox are row-major: the last coordinate varies fastest.
class IndexSet {
public:
    IndexSet(int dimension, int order, IndexShape shape);

    static IndexSet total_degree(int d, int n) { return {d, n, IndexShape::TotalDegree}; }
    static IndexSet box(int d, int n) { return {d, n, IndexShape::Box}; }
    static IndexSet symmetric_box(int d, int n) { return {d, n, IndexShape::SymmetricBox}; }

    /// Closed-form cardinality, independent of the enumeration.
    static std::size_t cardinality(IndexShape shape, int d, int n);

    int dimension() const { return dimension_; }
    int order() const { return order_; }
    IndexShape shape() const { return shape_; }
    std::size_t size() const { return elements_.size(); }

    const MultiIndex& operator[](std::size_t i) const { return elements_[i]; }
    auto begin() const { return elements_.begin(); }
    auto end() const { return elements_.end(); }

    bool contains(const MultiIndex& k) const { return position(k).has_value(); }
    std::optional<std::size_t> position(const MultiIndex& k) const;

private:
    int dimension_;
    int order_;
    IndexShape shape_;
    std::vector<MultiIndex> elements_;
    std::map<std::vector<int>, std::size_t> lookup_;  // TotalDegree only
};

}  // namespace prony
