#include "prony/harmonics.hpp"

#include <cmath>
#include <utility>
#include <numbers>

#include "prony/ensemble.hpp"
#include "prony/error.hpp"

namespace prony {

namespace {

constexpr double kInvSqrt4Pi = 0.28209479177387814347;  // 1/sqrt(4 pi)

double recursion_factor(int k, int m) { return std::sqrt((4.0 * k * k - 1.0) / (double(k) * k - double(m) * m)); }

// Q_k^m(z) with P_k^m(z) = (1-z^2)^{m/2} Q_k^m(z). Optionally also dQ/dz.
// Stable degree recursion, normalized on the fly.
void legendre_quotients(int n, double z, std::vector<double>& q, std::vector<double>* dq)
{
    q.assign(legendre_position(n, n) + 1, 0.0);
    if (dq) dq->assign(q.size(), 0.0);
    double diag = kInvSqrt4Pi;
    for (int m = 0; m <= n; ++m) {
        if (m > 0) diag *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
        q[legendre_position(m, m)] = diag;
        if (m + 1 > n) continue;
        const double c = std::sqrt(2.0 * m + 3.0);
        q[legendre_position(m + 1, m)] = c * z * diag;
        if (dq) (*dq)[legendre_position(m + 1, m)] = c * diag;
        for (int k = m + 2; k <= n; ++k) {
            const double a = recursion_factor(k, m);
            const double a_prev = recursion_factor(k - 1, m);
            const double q1 = q[legendre_position(k - 1, m)];
            const double q2 = q[legendre_position(k - 2, m)];
            q[legendre_position(k, m)] = a * (z * q1 - q2 / a_prev);
            if (dq) {
                const double d1 = (*dq)[legendre_position(k - 1, m)];
                const double d2 = (*dq)[legendre_position(k - 2, m)];
                (*dq)[legendre_position(k, m)] = a * (q1 + z * d1 - d2 / a_prev);
            }
        }
    }
}

template <bool WithGradient>
void evaluate(int n, const Eigen::Vector3d& x, Eigen::VectorXd& values, Eigen::Matrix<double, Eigen::Dynamic, 3>* grad)
{
    if (n < 0) throw Error("harmonic degree must be >= 0");
    require_unit_vector(x);
    std::vector<double> q, dq;
    legendre_quotients(n, x.z(), q, WithGradient ? &dq : nullptr);

    // C_m + i S_m = (x + i y)^m
    std::vector<double> cm(static_cast<std::size_t>(n + 1)), sm(static_cast<std::size_t>(n + 1));
    cm[0] = 1.0;
    sm[0] = 0.0;
    for (int m = 1; m <= n; ++m) {
        cm[m] = x.x() * cm[m - 1] - x.y() * sm[m - 1];
        sm[m] = x.x() * sm[m - 1] + x.y() * cm[m - 1];
    }

    const std::size_t count = harmonic_count(n);
    values.resize(static_cast<Eigen::Index>(count));
    if constexpr (WithGradient) grad->setZero(static_cast<Eigen::Index>(count), 3);

    for (int k = 0; k <= n; ++k) {
        const Eigen::Index zonal = static_cast<Eigen::Index>(k * k + k);
        values[zonal] = q[legendre_position(k, 0)];
        if constexpr (WithGradient) (*grad)(zonal, 2) = dq[legendre_position(k, 0)];
        for (int m = 1; m <= k; ++m) {
            const double qkm = std::numbers::sqrt2 * q[legendre_position(k, m)];
            values[zonal + m] = qkm * cm[m];
            values[zonal - m] = qkm * sm[m];
            if constexpr (WithGradient) {
                const double dqkm = std::numbers::sqrt2 * dq[legendre_position(k, m)];
                (*grad)(zonal + m, 0) = qkm * m * cm[m - 1];
                (*grad)(zonal + m, 1) = -qkm * m * sm[m - 1];
                (*grad)(zonal + m, 2) = dqkm * cm[m];
                (*grad)(zonal - m, 0) = qkm * m * sm[m - 1];
                (*grad)(zonal - m, 1) = qkm * m * cm[m - 1];
                (*grad)(zonal - m, 2) = dqkm * sm[m];
            }
        }
    }
}

}  // namespace

HarmonicIndex harmonic_index_at(std::size_t position)
{
    int k = static_cast<int>(std::sqrt(static_cast<double>(position)));
    while (static_cast<std::size_t>(k * k) > position) --k;
    while (static_cast<std::size_t>((k + 1) * (k + 1)) <= position) ++k;
    return {k, static_cast<int>(position - static_cast<std::size_t>(k * k)) + 1};
}

double eval_harmonic(int k, int l, const Eigen::Vector3d& x)
{
    if (k < 0 || l < 1 || l > 2 * k + 1) throw Error("invalid harmonic index");
    return eval_harmonics(k, x)[static_cast<Eigen::Index>(harmonic_position(k, l))];
}

Eigen::VectorXd eval_harmonics(int n, const Eigen::Vector3d& x)
{
    Eigen::VectorXd v;
    evaluate<false>(n, x, v, nullptr);
    return v;
}

HarmonicJet eval_harmonics_jet(int n, const Eigen::Vector3d& x)
{
    HarmonicJet jet;
    evaluate<true>(n, x, jet.values, &jet.gradient);
    return jet;
}

SphericalFourierMatrix assemble_spherical_fourier(std::span<const Eigen::Vector3d> points, int n)
{
    SphericalFourierMatrix y{n, Eigen::MatrixXd(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(harmonic_count(n)))};
    for (std::size_t j = 0; j < points.size(); ++j)
        y.values.row(static_cast<Eigen::Index>(j)) = eval_harmonics(n, points[j]).transpose();
    return y;
}

Eigen::MatrixXd harmonic_columns(int n, std::span<const Eigen::Vector3d> points)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(harmonic_count(n)), static_cast<Eigen::Index>(points.size()));
    for (std::size_t j = 0; j < points.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = eval_harmonics(n, points[j]);
    return out;
}

std::vector<double> normalized_legendre(int n, double z)
{
    std::vector<double> q;
    legendre_quotients(n, z, q, nullptr);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int m = 1; m <= n; ++m) {
        const double sm = std::pow(s, m);
        for (int k = m; k <= n; ++k) q[legendre_position(k, m)] *= sm;
    }
    return q;
}

GaussLegendre gauss_legendre(int count)
{
    if (count < 1) throw Error("Gauss-Legendre rule needs at least one node");
    // P_count(z) and its derivative by the three-term recurrence
    auto legendre = [count](double z) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= count; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, count * (z * p1 - p0) / (z * z - 1.0)};
    };

    GaussLegendre rule;
    rule.nodes.resize(static_cast<std::size_t>(count));
    rule.weights.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < (count + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(z);
            const double step = p / dp;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        const double dp = legendre(z).second;
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -z;
        rule.nodes[static_cast<std::size_t>(count - 1 - i)] = z;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(count - 1 - i)] = w;
    }
    return rule;
}

SphereQuadrature sphere_quadrature(int exact_degree)
{
    const int polar = exact_degree / 2 + 1;   // 2*polar - 1 >= exact_degree
    const int azimuth = exact_degree + 1;     // trapezoid exact below this frequency
    const auto gl = gauss_legendre(polar);
    SphereQuadrature rule;
    rule.nodes.reserve(static_cast<std::size_t>(polar * azimuth));
    rule.weights.reserve(rule.nodes.capacity());
    const double dphi = 2.0 * std::numbers::pi / azimuth;
    for (int i = 0; i < polar; ++i) {
        const double z = gl.nodes[static_cast<std::size_t>(i)];
        const double s = std::sqrt(1.0 - z * z);
        for (int j = 0; j < azimuth; ++j) {
            const double phi = j * dphi;
            Eigen::Vector3d x(s * std::cos(phi), s * std::sin(phi), z);
            rule.nodes.push_back(x.normalized());
            rule.weights.push_back(gl.weights[static_cast<std::size_t>(i)] * dphi);
        }
    }
    return rule;
}

std::vector<Eigen::Vector3d> fibonacci_sphere(std::size_t count)
{
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(count);
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * static_cast<double>(i);
        pts.emplace_back(Eigen::Vector3d(s * std::cos(phi), s * std::sin(phi), z).normalized());
    }
    return pts;
}

}  // namespace prony
