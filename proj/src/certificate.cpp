#include "prony/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "prony/ensemble.hpp"
#include "prony/error.hpp"
#include "prony/harmonics.hpp"

namespace prony {

namespace {

SphereCertificate from_signal(const KernelBasis<double>& basis, int n)
{
    if (ambiguous_rank_split(basis.singular_values, basis.tolerance)) throw NotIdentifiable("spectral gap too small");
    SphereCertificate c;
    c.order = n;
    c.signal = basis.signal;
    c.vacuous = basis.kernel_dimension() == 0;
    return c;
}

template <typename F>
void for_each_chunk(int n, std::span<const Eigen::Vector3d> grid, const F& f)
{
    constexpr std::size_t chunk = 2048;
    for (std::size_t start = 0; start < grid.size(); start += chunk) {
        const std::size_t len = std::min(chunk, grid.size() - start);
        f(start, harmonic_columns(n, grid.subspan(start, len)));
    }
}

}  // namespace

double SphereCertificate::scale() const { return 4.0 * std::numbers::pi / static_cast<double>(harmonic_count(order)); }

double SphereCertificate::operator()(const Eigen::Vector3d& x) const
{
    return scale() * (signal.transpose() * eval_harmonics(order, x)).squaredNorm();
}

std::vector<double> SphereCertificate::evaluate(std::span<const Eigen::Vector3d> grid) const
{
    std::vector<double> out(grid.size());
    for_each_chunk(order, grid, [&](std::size_t start, const Eigen::MatrixXd& y) {
        const Eigen::MatrixXd c = signal.transpose() * y;
        for (Eigen::Index i = 0; i < y.cols(); ++i) out[start + static_cast<std::size_t>(i)] = scale() * c.col(i).squaredNorm();
    });
    return out;
}

SphereCertificate build_certificate(std::span<const Eigen::Vector3d> points, int n, double rank_tolerance)
{
    if (points.empty()) throw Error("certificate needs at least one point");
    if (n < 0) throw Error("certificate order must be >= 0");
    const auto y = assemble_spherical_fourier(points, n);
    return from_signal(numerical_kernel<double>(y.values, rank_tolerance), n);
}

SphereCertificate build_certificate(const SphericalMomentMatrix& matrix, double rank_tolerance)
{
    return from_signal(matrix.kernel(rank_tolerance), matrix.order);
}

CertificateReport validate_certificate(const SphereCertificate& certificate, std::span<const Eigen::Vector3d> points,
                                       std::span<const Eigen::Vector3d> grid, double exclusion_radius)
{
    CertificateReport r;
    r.exclusion_radius = exclusion_radius > 0.0 ? exclusion_radius : std::numbers::pi / (4.0 * std::max(certificate.order, 1));
    const auto values = certificate.evaluate(grid);
    r.grid_min = values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
    r.grid_max = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());

    double far_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool far = std::all_of(points.begin(), points.end(),
                                     [&](const Eigen::Vector3d& x) { return sphere_distance(x, grid[i]) > r.exclusion_radius; });
        if (far) far_max = std::max(far_max, values[i]);
    }
    r.margin = std::isfinite(far_max) ? 1.0 - far_max : 1.0;

    r.interpolates = true;
    for (const auto& x : points) {
        const double v = certificate(x);
        r.point_values.push_back(v);
        r.interpolates = r.interpolates && std::abs(v - 1.0) <= kCertificateTolerance;
    }
    r.upper_bound_ok = r.grid_max <= 1.0 + kCertificateTolerance;
    r.lower_bound_ok = r.grid_min >= -kCertificateTolerance;
    r.positive_margin = r.margin > 0.0;
    return r;
}

std::vector<double> kernel_surface(const KernelBasis<double>& kernel, std::span<const Eigen::Vector3d> grid)
{
    if (kernel.kernel_dimension() == 0) throw NotIdentifiable("no kernel: order too small or M = matrix size");
    if (!kernel.kernel_materialized) throw Error("kernel surface needs explicit kernel vectors");
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(kernel.ambient)))) - 1;
    std::vector<double> out(grid.size());
    for_each_chunk(n, grid, [&](std::size_t start, const Eigen::MatrixXd& y) {
        const Eigen::MatrixXd p = kernel.kernel.transpose() * y;
        for (Eigen::Index i = 0; i < y.cols(); ++i)
            out[start + static_cast<std::size_t>(i)] = 1.0 + 0.5 * std::pow(p.col(i).cwiseAbs().minCoeff(), 0.25);
    });
    return out;
}

std::vector<double> dual_surface(const SphereCertificate& certificate, std::span<const Eigen::Vector3d> grid)
{
    auto values = certificate.evaluate(grid);
    for (auto& v : values) v = 1.0 + 0.5 * v;
    return values;
}

}  // namespace prony
