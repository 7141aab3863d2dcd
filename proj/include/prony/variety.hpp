#pragma once

#include <vector>

#include <Eigen/Core>

#include "prony/ensemble.hpp"
#include "prony/gaunt.hpp"
#include "prony/linalg.hpp"
#include "prony/moments.hpp"

namespace prony {

/// Knobs for locating the common zeros of the kernel polynomials.
struct ExtractionSettings {
    /// Torus: grid points per axis (0 = 4n). Sphere: Fibonacci nodes (0 = 20 (n+1)^2).
    int grid_resolution = 0;
    /// Largest accepted relative certificate value q(x) / |w(x)|^2.
    double residual_tolerance = 1e-12;
    /// Minimum distance between reported points (0 = 1/(4n) torus, pi/(4n) sphere).
    double dedup_radius = 0.0;
    int max_iterations = 50;
    /// Grid local minima below seed_factor * median(q) are refined.
    double seed_factor = 0.5;
    /// Failed refinements ending below this relative value are reported as
    /// unresolved regions; higher ones are ordinary local minima of q.
    double unresolved_level = 1e-6;
    /// Extra passes on finer grids (torus: twice the resolution per axis,
    /// sphere: four times the nodes) while fewer points than the signal
    /// rank have been found.
    int refinements = 2;
};

struct TorusZeroLocator {
    int dimension = 1;
    int order = 0;
    KernelBasis<cplx> kernel;
    ExtractionSettings settings;
};

struct SphereZeroLocator {
    int order = 0;
    KernelBasis<double> kernel;
    ExtractionSettings settings;
};

template <typename Point>
struct RecoveredSupport {
    std::vector<Point> points;
    std::vector<double> residuals;  ///< relative certificate value at each point
    std::vector<int> iterations;
    /// Best point of each region where refinement stalled near a zero.
    std::vector<Point> unresolved;
    std::vector<double> unresolved_residuals;
    std::size_t seed_count = 0;
};

/// q(x) = sum over kernel polynomials |p_r(x)|^2, p_r(t) = sum_k conj(v_k) exp(2 pi i k . t).
double certificate_value(const KernelBasis<cplx>& kernel, int dimension, const Eigen::VectorXd& t);
/// q(x) = sum over kernel polynomials p_r(x)^2, p_r = sum v_a Y_a.
double certificate_value(const KernelBasis<double>& kernel, const Eigen::Vector3d& x);

/// Common zeros of the kernel polynomials on [0,1)^d. Throws NotIdentifiable
/// when the kernel is empty.
RecoveredSupport<Eigen::VectorXd> extract_support(const TorusZeroLocator& locator);
/// Common zeros of the kernel polynomials on S^2.
RecoveredSupport<Eigen::Vector3d> extract_support(const SphereZeroLocator& locator);

struct SparsityEstimate {
    Eigen::Index sparsity = 0;   ///< numerical rank at order n
    Eigen::Index next_rank = 0;  ///< numerical rank at order n + 1
    bool flat = false;           ///< ranks agree; only then is the estimate trustworthy
};

/// Rank of T_n and T_{n+1}; needs moments of order n + 1.
SparsityEstimate estimate_sparsity(const TorusMoments& moments, int n, double rank_tolerance = kDefaultRankTolerance);
/// Rank of the spherical moment matrices of order n and n + 1; needs moments
/// through degree 2n + 2 and a Gaunt table of degree >= n + 1.
SparsityEstimate estimate_sparsity(const SphereMoments& moments, int n, const GauntTable& gaunt,
                                   double rank_tolerance = kDefaultRankTolerance);

/// Values of sum_{k in {0..n}^d} c_k exp(2 pi i k . t) on the grid
/// t = g / resolution, g in {0..resolution-1}^d, row-major.
std::vector<cplx> trigonometric_polynomial_on_grid(std::span<const cplx> coefficients, int dimension, int order,
                                                   int resolution);

}  // namespace prony
