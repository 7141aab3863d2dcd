#include "prony/gaunt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "prony/error.hpp"
#include "prony/harmonics.hpp"

namespace prony {

namespace {

constexpr char kMagic[8] = {'P', 'R', 'O', 'N', 'Y', 'G', 'N', 'T'};

int quadrature_degree_for(int n) { return 4 * n + 2; }

std::size_t pair_count(int n)
{
    const std::size_t count = harmonic_count(n);
    return count * (count + 1) / 2;
}

// 1 for m = 0, sqrt2 cos(m phi) for m > 0, sqrt2 sin(|m| phi) for m < 0
double azimuth_factor(int m, double phi)
{
    if (m == 0) return 1.0;
    return m > 0 ? std::numbers::sqrt2 * std::cos(m * phi) : std::numbers::sqrt2 * std::sin(-m * phi);
}

}  // namespace

GauntTable::GauntTable(int max_degree, int quadrature_degree, double tolerance, std::vector<std::uint64_t> pair_start,
                       std::vector<Entry> entries)
    : max_degree_(max_degree),
      quadrature_degree_(quadrature_degree),
      tolerance_(tolerance),
      pair_start_(std::move(pair_start)),
      entries_(std::move(entries))
{
    if (pair_start_.size() != pair_count(max_degree) + 1 || pair_start_.back() != entries_.size())
        throw Error("inconsistent Gaunt table layout");
}

std::span<const GauntTable::Entry> GauntTable::products(std::size_t i, std::size_t j) const
{
    const std::size_t p = pair_index(i, j);
    if (p + 1 >= pair_start_.size()) throw Error("harmonic index beyond the Gaunt table degree");
    return {entries_.data() + pair_start_[p], entries_.data() + pair_start_[p + 1]};
}

double GauntTable::coefficient(int k, int l, int r, int s, int t, int u) const
{
    if (k < 0 || r < 0 || t < 0 || l < 1 || s < 1 || u < 1 || l > 2 * k + 1 || s > 2 * r + 1 || u > 2 * t + 1)
        throw Error("invalid harmonic index");
    if (k > max_degree_ || r > max_degree_) throw Error("harmonic index beyond the Gaunt table degree");
    const auto row = products(harmonic_position(k, l), harmonic_position(r, s));
    const auto target = static_cast<std::uint32_t>(harmonic_position(t, u));
    auto it = std::lower_bound(row.begin(), row.end(), target, [](const Entry& e, std::uint32_t v) { return e.target < v; });
    return it != row.end() && it->target == target ? it->value : 0.0;
}

GauntTable gaunt_coefficients(int n)
{
    if (n < 0) throw Error("Gaunt table degree must be >= 0");
    const int degree = quadrature_degree_for(n);
    const int top = 2 * n;  // largest product degree
    const auto polar = gauss_legendre(degree / 2 + 1);
    const int azimuth_nodes = degree + 1;
    const std::size_t nodes = polar.nodes.size();

    // legendre[pos * nodes + i] = P_t^m(z_i), t <= 2n
    const std::size_t legendre_size = legendre_position(top, top) + 1;
    std::vector<double> legendre(legendre_size * nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const auto p = normalized_legendre(top, polar.nodes[i]);
        for (std::size_t pos = 0; pos < legendre_size; ++pos) legendre[pos * nodes + i] = p[pos];
    }

    // azimuthal integrals of three factors, trapezoidal rule; keep the nonzero ones
    struct Azimuth {
        int m3;
        double value;
    };
    const std::size_t side = static_cast<std::size_t>(2 * n + 1);
    std::vector<std::vector<Azimuth>> azimuth(side * side);
    {
        std::vector<std::vector<double>> factor(static_cast<std::size_t>(2 * top + 1), std::vector<double>(static_cast<std::size_t>(azimuth_nodes)));
        const double dphi = 2.0 * std::numbers::pi / azimuth_nodes;
        for (int m = -top; m <= top; ++m)
            for (int j = 0; j < azimuth_nodes; ++j) factor[static_cast<std::size_t>(m + top)][static_cast<std::size_t>(j)] = azimuth_factor(m, j * dphi);
        for (int m1 = -n; m1 <= n; ++m1)
            for (int m2 = -n; m2 <= n; ++m2) {
                auto& list = azimuth[static_cast<std::size_t>(m1 + n) * side + static_cast<std::size_t>(m2 + n)];
                const auto& f1 = factor[static_cast<std::size_t>(m1 + top)];
                const auto& f2 = factor[static_cast<std::size_t>(m2 + top)];
                for (int m3 = -top; m3 <= top; ++m3) {
                    const auto& f3 = factor[static_cast<std::size_t>(m3 + top)];
                    double sum = 0.0;
                    for (int j = 0; j < azimuth_nodes; ++j) sum += f1[static_cast<std::size_t>(j)] * f2[static_cast<std::size_t>(j)] * f3[static_cast<std::size_t>(j)];
                    sum *= dphi;
                    if (std::abs(sum) > 1e-13) list.push_back({m3, sum});
                }
            }
    }

    const std::size_t count = harmonic_count(n);
    std::vector<std::uint64_t> pair_start;
    pair_start.reserve(pair_count(n) + 1);
    std::vector<GauntTable::Entry> entries;
    std::vector<double> weighted(nodes);

    for (std::size_t j = 0; j < count; ++j) {
        const auto hj = harmonic_index_at(j);
        const int mj = hj.azimuthal();
        const double* pj = &legendre[legendre_position(hj.degree, std::abs(mj)) * nodes];
        for (std::size_t i = 0; i <= j; ++i) {
            pair_start.push_back(entries.size());
            const auto hi = harmonic_index_at(i);
            const int mi = hi.azimuthal();
            const double* pi = &legendre[legendre_position(hi.degree, std::abs(mi)) * nodes];
            for (std::size_t q = 0; q < nodes; ++q) weighted[q] = polar.weights[q] * pi[q] * pj[q];

            const std::size_t first = entries.size();
            for (const auto& az : azimuth[static_cast<std::size_t>(mi + n) * side + static_cast<std::size_t>(mj + n)]) {
                const int m3 = std::abs(az.m3);
                for (int t = m3; t <= hi.degree + hj.degree; ++t) {
                    const double* pt = &legendre[legendre_position(t, m3) * nodes];
                    double polar_sum = 0.0;
                    for (std::size_t q = 0; q < nodes; ++q) polar_sum += weighted[q] * pt[q];
                    const double c = az.value * polar_sum;
                    if (std::abs(c) > kGauntTolerance)
                        entries.push_back({static_cast<std::uint32_t>(t * t + t + az.m3), c});
                }
            }
            std::sort(entries.begin() + static_cast<std::ptrdiff_t>(first), entries.end(),
                      [](const auto& a, const auto& b) { return a.target < b.target; });
        }
    }
    pair_start.push_back(entries.size());
    return {n, degree, kGauntTolerance, std::move(pair_start), std::move(entries)};
}

namespace {

template <typename T>
void put(std::string& buf, T v)
{
    char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    buf.append(bytes, sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& v)
{
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

void save_gaunt_table(const GauntTable& table, const std::filesystem::path& file)
{
    std::string header(kMagic, sizeof(kMagic));
    put(header, kGauntCacheVersion);
    put(header, static_cast<std::int32_t>(table.max_degree()));
    put(header, static_cast<std::int32_t>(table.quadrature_degree()));
    put(header, table.tolerance());
    put(header, static_cast<std::uint64_t>(table.nonzero_count()));

    std::filesystem::create_directories(file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
    auto tmp = file;
    tmp += ".tmp." + std::to_string(std::random_device{}());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write Gaunt cache " + tmp.string());
        out.write(header.data(), static_cast<std::streamsize>(header.size()));
        const std::size_t count = harmonic_count(table.max_degree());
        std::string buf;
        for (std::size_t j = 0; j < count; ++j) {
            const auto hj = harmonic_index_at(j);
            for (std::size_t i = 0; i <= j; ++i) {
                const auto hi = harmonic_index_at(i);
                for (const auto& e : table.products(i, j)) {
                    const auto ht = harmonic_index_at(e.target);
                    for (int v : {hi.degree, hi.order, hj.degree, hj.order, ht.degree, ht.order}) put(buf, static_cast<std::int16_t>(v));
                    put(buf, e.value);
                }
            }
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
        if (!out) throw Error("failed writing Gaunt cache " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

std::optional<GauntTable> load_gaunt_table(const std::filesystem::path& file, int n)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    std::uint32_t version = 0;
    std::int32_t degree = 0, quad = 0;
    double tol = 0.0;
    std::uint64_t records = 0;
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) return std::nullopt;
    if (!get(in, version) || !get(in, degree) || !get(in, quad) || !get(in, tol) || !get(in, records)) return std::nullopt;
    if (version != kGauntCacheVersion || degree != n || quad != quadrature_degree_for(n) || tol != kGauntTolerance)
        return std::nullopt;

    const std::size_t pairs = pair_count(n);
    const std::size_t count = harmonic_count(n);
    const std::size_t targets = harmonic_count(2 * n);
    std::vector<std::uint64_t> pair_start(pairs + 1, 0);
    std::vector<GauntTable::Entry> entries;
    entries.reserve(records);

    std::vector<std::uint64_t> per_pair(pairs, 0);
    std::size_t last_pair = 0;
    std::uint32_t last_target = 0;
    for (std::uint64_t rec = 0; rec < records; ++rec) {
        std::int16_t f[6];
        double c = 0.0;
        for (auto& v : f)
            if (!get(in, v)) return std::nullopt;
        if (!get(in, c)) return std::nullopt;
        for (int a = 0; a < 6; a += 2)
            if (f[a] < 0 || f[a + 1] < 1 || f[a + 1] > 2 * f[a] + 1) return std::nullopt;
        const std::size_t i = harmonic_position(f[0], f[1]);
        const std::size_t j = harmonic_position(f[2], f[3]);
        const std::size_t t = harmonic_position(f[4], f[5]);
        if (i > j || j >= count || t >= targets) return std::nullopt;
        const std::size_t p = GauntTable::pair_index(i, j);
        if (rec > 0 && (p < last_pair || (p == last_pair && t <= last_target))) return std::nullopt;
        last_pair = p;
        last_target = static_cast<std::uint32_t>(t);
        ++per_pair[p];
        entries.push_back({static_cast<std::uint32_t>(t), c});
    }
    if (in.peek() != std::char_traits<char>::eof()) return std::nullopt;
    for (std::size_t p = 0; p < pairs; ++p) pair_start[p + 1] = pair_start[p] + per_pair[p];
    return GauntTable(n, quad, tol, std::move(pair_start), std::move(entries));
}

GauntTable cached_gaunt_table(int n, const std::filesystem::path& cache_dir)
{
    const auto file = cache_dir / ("gaunt_" + std::to_string(n) + ".bin");
    if (auto table = load_gaunt_table(file, n)) return std::move(*table);
    auto table = gaunt_coefficients(n);
    try {
        save_gaunt_table(table, file);
    } catch (const std::exception&) {
        // an unwritable cache only costs recomputation next time
    }
    return table;
}

std::filesystem::path default_cache_dir()
{
    if (const char* env = std::getenv("PRONY_CACHE_DIR"); env && *env) return env;
    return std::filesystem::temp_directory_path() / "prony-cache";
}

}  // namespace prony
