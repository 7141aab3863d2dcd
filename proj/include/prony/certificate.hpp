#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "prony/linalg.hpp"
#include "prony/sphere.hpp"

namespace prony {

/// Sum-of-squares dual certificate on S^2,
///   p(x) = (4 pi / N) sum_r p_r(x)^2,  N = (n+1)^2,
/// where the p_r are an orthonormal basis of the signal space (the orthogonal
/// complement of the Vandermonde / moment-matrix kernel). 0 <= p <= 1 with
/// p = 1 exactly on the support.
struct SphereCertificate {
    int order = 0;
    Eigen::MatrixXd signal;  ///< N x M, orthonormal columns
    bool vacuous = false;    ///< signal space is everything; p == 1

    double scale() const;
    double operator()(const Eigen::Vector3d& x) const;
    std::vector<double> evaluate(std::span<const Eigen::Vector3d> grid) const;
};

/// From known points via the spherical Fourier matrix Y_n.
SphereCertificate build_certificate(std::span<const Eigen::Vector3d> points, int n,
                                    double rank_tolerance = kDefaultRankTolerance);
/// From the signal space of a moment matrix.
SphereCertificate build_certificate(const SphericalMomentMatrix& matrix, double rank_tolerance = kDefaultRankTolerance);

struct CertificateReport {
    double grid_min = 0.0;
    double grid_max = 0.0;
    std::vector<double> point_values;
    double exclusion_radius = 0.0;
    /// 1 - max{p(x) : grid x farther than exclusion_radius from every point};
    /// 1 when no grid point is that far.
    double margin = 0.0;

    bool upper_bound_ok = false;  ///< grid_max <= 1 + 1e-9
    bool lower_bound_ok = false;  ///< grid_min >= -1e-9
    bool interpolates = false;    ///< |p(x_j) - 1| <= 1e-9
    bool positive_margin = false;

    bool passed() const { return upper_bound_ok && lower_bound_ok && interpolates && positive_margin; }
};

inline constexpr double kCertificateTolerance = 1e-9;

/// exclusion_radius 0 picks pi / (4n).
CertificateReport validate_certificate(const SphereCertificate& certificate, std::span<const Eigen::Vector3d> points,
                                       std::span<const Eigen::Vector3d> grid, double exclusion_radius = 0.0);

/// 1 + min_r |p_r(x)|^{1/4} / 2 over the kernel polynomials. Needs the kernel
/// vectors explicitly; throws for an empty kernel.
std::vector<double> kernel_surface(const KernelBasis<double>& kernel, std::span<const Eigen::Vector3d> grid);

/// 1 + p(x) / 2.
std::vector<double> dual_surface(const SphereCertificate& certificate, std::span<const Eigen::Vector3d> grid);

}  // namespace prony
