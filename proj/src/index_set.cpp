#include "prony/index_set.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "prony/error.hpp"

namespace prony {

int MultiIndex::total_degree() const { return std::accumulate(entries.begin(), entries.end(), 0); }

int MultiIndex::max_degree() const
{
    int m = 0;
    for (int e : entries) m = std::max(m, std::abs(e));
    return m;
}

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b)
{
    if (a.dimension() != b.dimension()) throw Error("multi-index dimension mismatch");
    MultiIndex r = a;
    for (std::size_t i = 0; i < r.entries.size(); ++i) r.entries[i] -= b.entries[i];
    return r;
}

MultiIndex operator-(const MultiIndex& a)
{
    MultiIndex r = a;
    for (int& e : r.entries) e = -e;
    return r;
}

std::string to_string(const MultiIndex& k)
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < k.entries.size(); ++i) {
        if (i) os << ',';
        os << k.entries[i];
    }
    os << ')';
    return os.str();
}

namespace {

std::size_t binomial(int n, int k)
{
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return r;
}

std::size_t ipow(std::size_t base, int e)
{
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// Row-major odometer over {lo..hi}^d.
std::vector<MultiIndex> enumerate_box(int d, int lo, int hi)
{
    std::vector<MultiIndex> out;
    out.reserve(ipow(static_cast<std::size_t>(hi - lo + 1), d));
    std::vector<int> k(static_cast<std::size_t>(d), lo);
    while (true) {
        out.emplace_back(k);
        int axis = d - 1;
        while (axis >= 0 && k[static_cast<std::size_t>(axis)] == hi) {
            k[static_cast<std::size_t>(axis)] = lo;
            --axis;
        }
        if (axis < 0) break;
        ++k[static_cast<std::size_t>(axis)];
    }
    return out;
}

// All k >= 0 with |k| == degree, lexicographically decreasing.
void append_degree(int d, int degree, std::vector<int>& prefix, std::vector<MultiIndex>& out)
{
    const int axis = static_cast<int>(prefix.size());
    if (axis == d - 1) {
        prefix.push_back(degree);
        out.emplace_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int v = degree; v >= 0; --v) {
        prefix.push_back(v);
        append_degree(d, degree - v, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

IndexSet::IndexSet(int dimension, int order, IndexShape shape)
    : dimension_(dimension), order_(order), shape_(shape)
{
    if (dimension < 1) throw Error("index set dimension must be >= 1");
    if (order < 0) throw Error("index set order must be >= 0");

    switch (shape) {
    case IndexShape::Box: elements_ = enumerate_box(dimension, 0, order); break;
    case IndexShape::SymmetricBox: elements_ = enumerate_box(dimension, -order, order); break;
    case IndexShape::TotalDegree: {
        std::vector<int> prefix;
        for (int deg = 0; deg <= order; ++deg) append_degree(dimension, deg, prefix, elements_);
        for (std::size_t i = 0; i < elements_.size(); ++i) lookup_.emplace(elements_[i].entries, i);
        break;
    }
    }
}

std::size_t IndexSet::cardinality(IndexShape shape, int d, int n)
{
    switch (shape) {
    case IndexShape::TotalDegree: return binomial(n + d, d);
    case IndexShape::Box: return ipow(static_cast<std::size_t>(n + 1), d);
    case IndexShape::SymmetricBox: return ipow(static_cast<std::size_t>(2 * n + 1), d);
    }
    return 0;
}

std::optional<std::size_t> IndexSet::position(const MultiIndex& k) const
{
    if (k.dimension() != dimension_) return std::nullopt;
    if (shape_ == IndexShape::TotalDegree) {
        auto it = lookup_.find(k.entries);
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }
    const int lo = shape_ == IndexShape::Box ? 0 : -order_;
    const std::size_t radix = static_cast<std::size_t>(order_ - lo + 1);
    std::size_t pos = 0;
    for (int e : k.entries) {
        if (e < lo || e > order_) return std::nullopt;
        pos = pos * radix + static_cast<std::size_t>(e - lo);
    }
    return pos;
}

}  // namespace prony
