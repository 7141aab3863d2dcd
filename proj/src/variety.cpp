#include "prony/variety.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>

#include "prony/error.hpp"
#include "prony/harmonics.hpp"
#include "prony/index_set.hpp"
#include "prony/sphere.hpp"
#include "prony/torus.hpp"

namespace prony {

namespace {

// Kernel component of an evaluation vector, in kernel coordinates when the
// kernel basis is the smaller one and in ambient coordinates otherwise. Both
// have the same norm.
template <typename Scalar>
class KernelProjector {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    explicit KernelProjector(const KernelBasis<Scalar>& basis)
        : basis_(basis), use_kernel_(basis.kernel_materialized && basis.kernel_dimension() <= basis.rank)
    {
    }

    bool uses_kernel() const { return use_kernel_; }
    const Matrix& basis() const { return use_kernel_ ? basis_.kernel : basis_.signal; }

    template <typename Derived>
    Matrix project(const Eigen::MatrixBase<Derived>& w) const
    {
        if (use_kernel_) return basis_.kernel.adjoint() * w;
        return w - basis_.signal * (basis_.signal.adjoint() * w);
    }

private:
    const KernelBasis<Scalar>& basis_;
    bool use_kernel_;
};

template <typename Point>
struct Refined {
    Point point;
    double residual;
    int iterations;
};

// Damped Gauss-Newton on the stacked kernel-polynomial values. `eval` returns
// the evaluation vector and its derivative in local coordinates, `retract`
// moves along a local step.
template <typename Scalar, typename Point, typename Eval, typename Retract>
Refined<Point> gauss_newton(Point x, const KernelProjector<Scalar>& proj, double scale, const Eval& eval,
                            const Retract& retract, int max_iterations)
{
    auto [w, dw] = eval(x);
    auto r = proj.project(w);
    double q = r.squaredNorm();
    int it = 0;
    for (; it < max_iterations; ++it) {
        const auto jac = proj.project(dw);
        Eigen::MatrixXd normal = (jac.adjoint() * jac).real();
        const Eigen::VectorXd grad = (jac.adjoint() * r).real();
        normal.diagonal().array() += 1e-12 * normal.diagonal().maxCoeff() + 1e-300;
        const Eigen::VectorXd step = -normal.ldlt().solve(grad);

        double damping = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 30; ++halving, damping *= 0.5) {
            Point y = retract(x, damping * step);
            auto [wy, dwy] = eval(y);
            auto ry = proj.project(wy);
            const double qy = ry.squaredNorm();
            if (qy < q) {
                x = std::move(y);
                w = std::move(wy);
                dw = std::move(dwy);
                r = std::move(ry);
                q = qy;
                improved = true;
                break;
            }
        }
        if (!improved || damping * step.norm() < 1e-12) {
            ++it;
            break;
        }
    }
    return {std::move(x), q / scale, it};
}

template <typename Point, typename Distance>
RecoveredSupport<Point> collect(std::vector<Refined<Point>> refined, const ExtractionSettings& s, double dedup,
                                const Distance& distance)
{
    std::sort(refined.begin(), refined.end(), [](const auto& a, const auto& b) { return a.residual < b.residual; });
    RecoveredSupport<Point> out;
    out.seed_count = refined.size();
    auto near_any = [&](const Point& p, const std::vector<Point>& pts) {
        return std::any_of(pts.begin(), pts.end(), [&](const Point& o) { return distance(p, o) <= dedup; });
    };
    for (const auto& r : refined) {
        if (r.residual > s.residual_tolerance) continue;
        if (near_any(r.point, out.points)) continue;
        out.points.push_back(r.point);
        out.residuals.push_back(r.residual);
        out.iterations.push_back(r.iterations);
    }
    for (const auto& r : refined) {
        if (r.residual <= s.residual_tolerance || r.residual > s.unresolved_level) continue;
        if (near_any(r.point, out.points) || near_any(r.point, out.unresolved)) continue;
        out.unresolved.push_back(r.point);
        out.unresolved_residuals.push_back(r.residual);
    }
    return out;
}

void validate_settings(const ExtractionSettings& s)
{
    if (!(s.residual_tolerance > 0.0)) throw Error("residual tolerance must be positive");
    if (!(s.dedup_radius >= 0.0)) throw Error("dedup radius must be positive (or 0 for the default)");
    if (s.grid_resolution != 0 && s.grid_resolution < 2) throw Error("grid resolution must be at least 2");
    if (s.max_iterations < 1) throw Error("iteration cap must be positive");
    if (s.refinements < 0) throw Error("refinement count must be >= 0");
    if (!(s.seed_factor > 0.0)) throw Error("seed factor must be positive");
}

template <typename Scalar>
void require_kernel(const KernelBasis<Scalar>& kernel)
{
    if (kernel.kernel_dimension() == 0) throw NotIdentifiable("no kernel: order too small or M = matrix size");
}

double median(std::vector<double> v)
{
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

int box_order(Eigen::Index ambient, int dimension)
{
    const int n = static_cast<int>(std::lround(std::pow(static_cast<double>(ambient), 1.0 / dimension))) - 1;
    if (n < 0 || static_cast<Eigen::Index>(IndexSet::cardinality(IndexShape::Box, dimension, n)) != ambient)
        throw Error("kernel size is not (n+1)^d for dimension " + std::to_string(dimension));
    return n;
}

int sphere_order(Eigen::Index ambient)
{
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(ambient)))) - 1;
    if (n < 0 || static_cast<Eigen::Index>(harmonic_count(n)) != ambient) throw Error("kernel size is not (n+1)^2");
    return n;
}

// Torus evaluation vector w_k = exp(2 pi i k . t) over {0..n}^d and its
// derivatives 2 pi i k_a w_k. Kernel vectors v of (f(k - l)) give the
// polynomials v^* w vanishing on the support.
struct TorusEvaluator {
    int dimension;
    IndexSet box;

    std::pair<Eigen::VectorXcd, Eigen::MatrixXcd> operator()(const Eigen::VectorXd& t) const
    {
        const int n = box.order();
        std::vector<std::vector<cplx>> axis(static_cast<std::size_t>(dimension), std::vector<cplx>(static_cast<std::size_t>(n + 1)));
        for (int a = 0; a < dimension; ++a)
            for (int k = 0; k <= n; ++k)
                axis[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * std::numbers::pi * k * t[a]);
        Eigen::VectorXcd w(static_cast<Eigen::Index>(box.size()));
        Eigen::MatrixXcd dw(w.size(), dimension);
        for (std::size_t i = 0; i < box.size(); ++i) {
            cplx v = 1.0;
            for (int a = 0; a < dimension; ++a) v *= axis[static_cast<std::size_t>(a)][static_cast<std::size_t>(box[i][static_cast<std::size_t>(a)])];
            const auto row = static_cast<Eigen::Index>(i);
            w[row] = v;
            for (int a = 0; a < dimension; ++a) dw(row, a) = cplx(0.0, 2.0 * std::numbers::pi * box[i][static_cast<std::size_t>(a)]) * v;
        }
        return {w, dw};
    }
};

Eigen::VectorXd wrap_unit(Eigen::VectorXd t)
{
    for (auto& c : t) {
        c -= std::floor(c);
        if (c >= 1.0) c = 0.0;
    }
    return t;
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_frame(const Eigen::Vector3d& x)
{
    const Eigen::Vector3d a = x.unitOrthogonal();
    return {a, x.cross(a)};
}

}  // namespace

std::vector<cplx> trigonometric_polynomial_on_grid(std::span<const cplx> coefficients, int dimension, int order,
                                                   int resolution)
{
    const std::size_t m = static_cast<std::size_t>(order + 1);
    const std::size_t g = static_cast<std::size_t>(resolution);
    if (coefficients.size() != IndexSet::cardinality(IndexShape::Box, dimension, order))
        throw Error("coefficient count does not match (n+1)^d");

    std::vector<cplx> phase(g * m);
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t k = 0; k < m; ++k)
            phase[a * m + k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((a * k) % g) / static_cast<double>(g));

    // contract one axis at a time: (pre, m, post) -> (pre, g, post)
    std::vector<cplx> cur(coefficients.begin(), coefficients.end());
    std::vector<std::size_t> dims(static_cast<std::size_t>(dimension), m);
    for (int axis = 0; axis < dimension; ++axis) {
        std::size_t pre = 1, post = 1;
        for (int b = 0; b < axis; ++b) pre *= dims[static_cast<std::size_t>(b)];
        for (int b = axis + 1; b < dimension; ++b) post *= dims[static_cast<std::size_t>(b)];
        std::vector<cplx> next(pre * g * post, cplx(0.0));
        for (std::size_t p = 0; p < pre; ++p)
            for (std::size_t a = 0; a < g; ++a) {
                cplx* out = &next[(p * g + a) * post];
                for (std::size_t k = 0; k < m; ++k) {
                    const cplx e = phase[a * m + k];
                    const cplx* in = &cur[(p * m + k) * post];
                    for (std::size_t s = 0; s < post; ++s) out[s] += e * in[s];
                }
            }
        cur = std::move(next);
        dims[static_cast<std::size_t>(axis)] = g;
    }
    return cur;
}

double certificate_value(const KernelBasis<cplx>& kernel, int dimension, const Eigen::VectorXd& t)
{
    if (t.size() != dimension) throw Error("point dimension mismatch");
    const int n = box_order(kernel.ambient, dimension);
    const TorusEvaluator eval{dimension, IndexSet::box(dimension, n)};
    return KernelProjector<cplx>(kernel).project(eval(t).first).squaredNorm();
}

double certificate_value(const KernelBasis<double>& kernel, const Eigen::Vector3d& x)
{
    const int n = sphere_order(kernel.ambient);
    return KernelProjector<double>(kernel).project(eval_harmonics(n, x)).squaredNorm();
}

RecoveredSupport<Eigen::VectorXd> extract_support(const TorusZeroLocator& locator)
{
    const auto& s = locator.settings;
    validate_settings(s);
    const int d = locator.dimension;
    const int n = locator.order;
    if (d < 1 || n < 0) throw Error("invalid torus locator");
    if (box_order(locator.kernel.ambient, d) != n) throw Error("kernel size does not match the locator order");
    require_kernel(locator.kernel);

    const double dedup = s.dedup_radius > 0.0 ? s.dedup_radius : 1.0 / (4.0 * std::max(n, 1));
    const KernelProjector<cplx> proj(locator.kernel);
    const double norm2 = static_cast<double>(locator.kernel.ambient);
    const TorusEvaluator eval{d, IndexSet::box(d, n)};

    auto search = [&](int grid) {
        // relative certificate on the grid
        std::size_t points = 1;
        for (int a = 0; a < d; ++a) points *= static_cast<std::size_t>(grid);
        std::vector<double> q(points, 0.0);
        const auto& basis = proj.basis();
        for (Eigen::Index r = 0; r < basis.cols(); ++r) {
            const Eigen::VectorXcd coeffs = basis.col(r).conjugate();
            const auto vals = trigonometric_polynomial_on_grid({coeffs.data(), static_cast<std::size_t>(coeffs.size())}, d, n, grid);
            for (std::size_t i = 0; i < points; ++i) q[i] += std::norm(vals[i]);
        }
        for (auto& v : q) v = proj.uses_kernel() ? v / norm2 : std::max(0.0, 1.0 - v / norm2);

        const double threshold = s.seed_factor * median(q);
        const auto neighbours = IndexSet::symmetric_box(d, 1);
        std::vector<Eigen::VectorXd> seeds;
        std::vector<int> coord(static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < points; ++i) {
            if (!(q[i] < threshold)) continue;
            std::size_t rest = i;
            for (int a = d - 1; a >= 0; --a) {
                coord[static_cast<std::size_t>(a)] = static_cast<int>(rest % static_cast<std::size_t>(grid));
                rest /= static_cast<std::size_t>(grid);
            }
            bool minimum = true;
            for (const auto& off : neighbours) {
                std::size_t j = 0;
                bool self = true;
                for (int a = 0; a < d; ++a) {
                    const int o = off[static_cast<std::size_t>(a)];
                    self = self && o == 0;
                    j = j * static_cast<std::size_t>(grid) + static_cast<std::size_t>((coord[static_cast<std::size_t>(a)] + o + grid) % grid);
                }
                if (!self && q[j] < q[i]) {
                    minimum = false;
                    break;
                }
            }
            if (!minimum) continue;
            Eigen::VectorXd t(d);
            for (int a = 0; a < d; ++a) t[a] = static_cast<double>(coord[static_cast<std::size_t>(a)]) / grid;
            seeds.push_back(t);
        }

        auto retract = [](const Eigen::VectorXd& t, const Eigen::VectorXd& step) { return wrap_unit(t + step); };
        std::vector<Refined<Eigen::VectorXd>> refined;
        refined.reserve(seeds.size());
        for (const auto& seed : seeds) refined.push_back(gauss_newton(seed, proj, norm2, eval, retract, s.max_iterations));
        return collect(std::move(refined), s, dedup, [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return torus_distance(a, b); });
    };

    // a missed zero shows up as fewer points than the signal rank; search a finer grid
    int grid = s.grid_resolution > 0 ? s.grid_resolution : std::max(2, 4 * n);
    auto out = search(grid);
    for (int pass = 0; pass < s.refinements && static_cast<Eigen::Index>(out.points.size()) < locator.kernel.rank; ++pass) {
        grid *= 2;
        out = search(grid);
    }

    // lexicographic order for reproducible output
    std::vector<std::size_t> order(out.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(out.points[a].begin(), out.points[a].end(), out.points[b].begin(), out.points[b].end());
    });
    RecoveredSupport<Eigen::VectorXd> sorted = out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.points[i] = out.points[order[i]];
        sorted.residuals[i] = out.residuals[order[i]];
        sorted.iterations[i] = out.iterations[order[i]];
    }
    return sorted;
}

RecoveredSupport<Eigen::Vector3d> extract_support(const SphereZeroLocator& locator)
{
    const auto& s = locator.settings;
    validate_settings(s);
    const int n = locator.order;
    if (n < 0 || sphere_order(locator.kernel.ambient) != n) throw Error("kernel size does not match the locator order");
    require_kernel(locator.kernel);

    const double dedup = s.dedup_radius > 0.0 ? s.dedup_radius : std::numbers::pi / (4.0 * std::max(n, 1));
    const KernelProjector<double> proj(locator.kernel);
    const double norm2 = static_cast<double>(harmonic_count(n)) / (4.0 * std::numbers::pi);

    auto eval = [n](const Eigen::Vector3d& x) {
        const auto jet = eval_harmonics_jet(n, x);
        const auto [a, b] = tangent_frame(x);
        Eigen::MatrixXd dw(jet.values.size(), 2);
        dw.col(0) = jet.gradient * a;
        dw.col(1) = jet.gradient * b;
        return std::pair<Eigen::VectorXd, Eigen::MatrixXd>{jet.values, dw};
    };
    auto retract = [](const Eigen::Vector3d& x, const Eigen::VectorXd& step) -> Eigen::Vector3d {
        const auto [a, b] = tangent_frame(x);
        return (x + step[0] * a + step[1] * b).normalized();
    };

    auto search = [&](std::size_t count) {
        const auto grid = fibonacci_sphere(count);
        std::vector<double> q(count);
        constexpr std::size_t chunk = 2048;
        for (std::size_t start = 0; start < count; start += chunk) {
            const std::size_t len = std::min(chunk, count - start);
            const Eigen::MatrixXd y = harmonic_columns(n, std::span(grid).subspan(start, len));
            const Eigen::MatrixXd coeff = proj.basis().transpose() * y;
            for (std::size_t i = 0; i < len; ++i) {
                const auto col = static_cast<Eigen::Index>(i);
                const double part = coeff.col(col).squaredNorm();
                q[start + i] = proj.uses_kernel() ? part / norm2 : std::max(0.0, (y.col(col).squaredNorm() - part) / norm2);
            }
        }

        // Fibonacci nodes are sorted by z, so neighbours lie in a window of indices
        const double radius = 2.0 * std::sqrt(4.0 * std::numbers::pi / static_cast<double>(count));
        const double threshold = s.seed_factor * median(q);
        std::vector<Eigen::Vector3d> seeds;
        for (std::size_t i = 0; i < count; ++i) {
            if (!(q[i] < threshold)) continue;
            bool minimum = true;
            for (std::size_t j = i; j-- > 0 && grid[j].z() - grid[i].z() <= radius && minimum;)
                if ((grid[j] - grid[i]).norm() <= radius && q[j] < q[i]) minimum = false;
            for (std::size_t j = i + 1; j < count && grid[i].z() - grid[j].z() <= radius && minimum; ++j)
                if ((grid[j] - grid[i]).norm() <= radius && q[j] < q[i]) minimum = false;
            if (minimum) seeds.push_back(grid[i]);
        }

        std::vector<Refined<Eigen::Vector3d>> refined;
        refined.reserve(seeds.size());
        for (const auto& seed : seeds) refined.push_back(gauss_newton(seed, proj, norm2, eval, retract, s.max_iterations));
        return collect(std::move(refined), s, dedup, [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return sphere_distance(a, b); });
    };

    std::size_t count = s.grid_resolution > 0 ? static_cast<std::size_t>(s.grid_resolution) : 20 * harmonic_count(n);
    auto out = search(count);
    for (int pass = 0; pass < s.refinements && static_cast<Eigen::Index>(out.points.size()) < locator.kernel.rank; ++pass) {
        count *= 4;
        out = search(count);
    }
    return out;
}

SparsityEstimate estimate_sparsity(const TorusMoments& moments, int n, double rank_tolerance)
{
    if (n < 0) throw Error("order must be >= 0");
    if (moments.order() < n + 1)
        throw Error("flat-extension check at order " + std::to_string(n) + " needs moments of order " + std::to_string(n + 1));
    SparsityEstimate e;
    e.sparsity = assemble_toeplitz(moments, n).kernel(rank_tolerance).rank;
    e.next_rank = assemble_toeplitz(moments, n + 1).kernel(rank_tolerance).rank;
    e.flat = e.sparsity == e.next_rank;
    return e;
}

SparsityEstimate estimate_sparsity(const SphereMoments& moments, int n, const GauntTable& gaunt, double rank_tolerance)
{
    if (n < 0) throw Error("order must be >= 0");
    if (moments.degree() < 2 * n + 2)
        throw Error("flat-extension check at order " + std::to_string(n) + " needs moments through degree " + std::to_string(2 * n + 2));
    SparsityEstimate e;
    e.sparsity = assemble_spherical_moment_matrix(moments, n, gaunt).kernel(rank_tolerance).rank;
    e.next_rank = assemble_spherical_moment_matrix(moments, n + 1, gaunt).kernel(rank_tolerance).rank;
    e.flat = e.sparsity == e.next_rank;
    return e;
}

}  // namespace prony
