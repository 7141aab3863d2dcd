#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace prony {

/// Real orthonormal spherical harmonics on S^2.
///
/// Convention: fully normalized, no Condon-Shortley phase. For degree k the
/// orders l = 1..2k+1 run through sin(m phi) for m = k..1, the zonal
/// harmonic, then cos(m phi) for m = 1..k. With signed azimuthal order
/// m = l - k - 1 the negative values are the sine terms. Degree one is
/// sqrt(3/(4 pi)) * (y, z, x).
struct HarmonicIndex {
    int degree = 0;
    int order = 1;  ///< 1 <= order <= 2*degree+1

    int azimuthal() const { return order - degree - 1; }
};

constexpr std::size_t harmonic_dimension(int k) { return static_cast<std::size_t>(2 * k + 1); }
/// Number of harmonics of degree <= n.
constexpr std::size_t harmonic_count(int n) { return static_cast<std::size_t>((n + 1) * (n + 1)); }
/// Column of (k, l) in the graded ordering.
constexpr std::size_t harmonic_position(int k, int l) { return static_cast<std::size_t>(k * k + l - 1); }
HarmonicIndex harmonic_index_at(std::size_t position);

/// Y_k^l(x). Throws for an invalid index or a non-unit x.
double eval_harmonic(int k, int l, const Eigen::Vector3d& x);

/// All harmonics of degree <= n at x, in graded order.
Eigen::VectorXd eval_harmonics(int n, const Eigen::Vector3d& x);

/// Values and ambient gradients (N x 3) of the polynomial extension of the
/// harmonics to R^3. Tangential derivatives on the sphere are the
/// projections of these gradients.
struct HarmonicJet {
    Eigen::VectorXd values;
    Eigen::Matrix<double, Eigen::Dynamic, 3> gradient;
};
HarmonicJet eval_harmonics_jet(int n, const Eigen::Vector3d& x);

/// Nonequispaced spherical Fourier matrix: rows are points, columns harmonics.
struct SphericalFourierMatrix {
    int order = 0;
    Eigen::MatrixXd values;
};
SphericalFourierMatrix assemble_spherical_fourier(std::span<const Eigen::Vector3d> points, int n);

/// Harmonic values at many points, one column per point (N x points).
Eigen::MatrixXd harmonic_columns(int n, std::span<const Eigen::Vector3d> points);

/// Normalized associated Legendre values P_k^m(z) for 0 <= m <= k <= n,
/// scaled so that 2 pi * integral over [-1,1] of P^2 is one. Stored at
/// legendre_position(k, m).
std::vector<double> normalized_legendre(int n, double z);
constexpr std::size_t legendre_position(int k, int m) { return static_cast<std::size_t>(k * (k + 1) / 2 + m); }

struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
/// Gauss-Legendre rule on [-1,1]; exact for polynomials of degree 2*count-1.
GaussLegendre gauss_legendre(int count);

/// Product rule on S^2 (Gauss-Legendre in cos(theta), trapezoidal in phi)
/// exact for all polynomials of degree <= exact_degree.
struct SphereQuadrature {
    std::vector<Eigen::Vector3d> nodes;
    std::vector<double> weights;
};
SphereQuadrature sphere_quadrature(int exact_degree);

/// Spherical Fibonacci point set.
std::vector<Eigen::Vector3d> fibonacci_sphere(std::size_t count);

}  // namespace prony
