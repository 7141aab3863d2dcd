#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace prony {

inline constexpr double kGauntTolerance = 1e-12;
inline constexpr std::uint32_t kGauntCacheVersion = 1;

/// Expansion coefficients of products of real spherical harmonics,
///   Y_k^l Y_r^s = sum_{t <= k+r} sum_u c(k,l,r,s,t,u) Y_t^u,
/// for all k, r <= max_degree. Each coefficient is the surface integral of
/// the triple product. Stored sparsely per unordered pair of factors;
/// values below kGauntTolerance are dropped.
class GauntTable {
public:
    struct Entry {
        std::uint32_t target;  ///< harmonic_position(t, u)
        double value;
    };

    GauntTable(int max_degree, int quadrature_degree, double tolerance, std::vector<std::uint64_t> pair_start,
               std::vector<Entry> entries);

    int max_degree() const { return max_degree_; }
    int quadrature_degree() const { return quadrature_degree_; }
    double tolerance() const { return tolerance_; }
    std::size_t nonzero_count() const { return entries_.size(); }

    /// Expansion of the product of harmonics at positions i and j.
    std::span<const Entry> products(std::size_t i, std::size_t j) const;
    double coefficient(int k, int l, int r, int s, int t, int u) const;

    static std::size_t pair_index(std::size_t i, std::size_t j) { return i <= j ? j * (j + 1) / 2 + i : i * (i + 1) / 2 + j; }

    const std::vector<std::uint64_t>& pair_start() const { return pair_start_; }
    const std::vector<Entry>& entries() const { return entries_; }

private:
    int max_degree_;
    int quadrature_degree_;
    double tolerance_;
    std::vector<std::uint64_t> pair_start_;  // size pairs + 1
    std::vector<Entry> entries_;             // sorted by target inside each pair
};

/// Quadrature-based table: Gauss-Legendre in cos(theta), trapezoidal in phi,
/// exact to polynomial degree 4n + 2 (the triple products reach 4n).
GauntTable gaunt_coefficients(int n);

/// Binary cache file. Layout (little endian):
///   char[8] "PRONYGNT", u32 version, i32 n, i32 quadrature degree,
///   f64 tolerance, u64 record count, then records of
///   i16 k, l, r, s, t, u and f64 c, with (k,l) <= (r,s) in graded order.
/// Written to a temporary file and renamed into place.
void save_gaunt_table(const GauntTable& table, const std::filesystem::path& file);

/// nullopt when the file is missing, corrupt or its header does not match
/// the parameters the current build would use for degree n.
std::optional<GauntTable> load_gaunt_table(const std::filesystem::path& file, int n);

/// Loads gaunt_<n>.bin from the directory, computing and storing it on a miss.
GauntTable cached_gaunt_table(int n, const std::filesystem::path& cache_dir);

/// $PRONY_CACHE_DIR, else the system temporary directory + "/prony-cache".
std::filesystem::path default_cache_dir();

}  // namespace prony
