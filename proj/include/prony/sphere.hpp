#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "prony/ensemble.hpp"
#include "prony/gaunt.hpp"
#include "prony/linalg.hpp"
#include "prony/moments.hpp"

namespace prony {

/// Spherical moment matrix with entries sum_j c_j Y_a(x_j) Y_b(x_j) for
/// harmonics a, b of degree <= n, assembled from moments through degree 2n.
struct SphericalMomentMatrix {
    int order = 0;
    Eigen::MatrixXd values;

    KernelBasis<double> kernel(double rank_tolerance = kDefaultRankTolerance) const
    {
        return numerical_kernel<double>(values, rank_tolerance);
    }
};

/// Needs moments through degree 2n and a Gaunt table of degree >= n.
SphericalMomentMatrix assemble_spherical_moment_matrix(const SphereMoments& moments, int n, const GauntTable& gaunt);

/// Y_n^T diag(c) Y_n from ground truth. For tests and diagnostics only.
Eigen::MatrixXd spherical_factorization(const SphereEnsemble& ensemble, int n);

struct SphereCoefficientFit {
    std::vector<double> coefficients;
    double residual_norm = 0.0;
    double relative_residual = 0.0;
};

/// Least-squares coefficients for a given support from all moments in the table.
SphereCoefficientFit recover_sphere_coefficients(std::span<const Eigen::Vector3d> points, const SphereMoments& moments);

}  // namespace prony
