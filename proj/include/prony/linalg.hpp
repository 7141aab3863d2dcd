#pragma once

#include <complex>
#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace prony {

/// Default relative threshold separating signal from kernel singular values.
inline constexpr double kDefaultRankTolerance = 1e-8;

/// Numerical kernel of a matrix together with its orthogonal complement.
///
/// `signal` holds an orthonormal basis of the right singular vectors whose
/// singular values exceed `tolerance * sigma_max`; `kernel` the remaining
/// ones. For sketched (matrix-free) decompositions only the signal space is
/// computed and `kernel_materialized` is false; projections onto the kernel
/// are then formed as I - signal * signal^*.
template <typename Scalar>
struct KernelBasis {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Eigen::Index ambient = 0;
    Eigen::Index rank = 0;
    double tolerance = 0.0;
    Eigen::VectorXd singular_values;  ///< descending; leading values only when sketched
    Matrix signal;
    Matrix kernel;
    bool kernel_materialized = true;

    Eigen::Index kernel_dimension() const { return ambient - rank; }
};

/// Full SVD based kernel. Throws for an empty matrix or a tolerance outside (0,1).
template <typename Scalar>
KernelBasis<Scalar> numerical_kernel(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& matrix,
                                     double rank_tolerance);

using ComplexOperator = std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>;

/// Signal space of a numerically low-rank operator from a randomized range
/// sketch. The sketch width doubles until a singular value below the
/// threshold shows up; wide sketches fall back to the dense decomposition.
KernelBasis<std::complex<double>> sketched_kernel(Eigen::Index rows, Eigen::Index cols, const ComplexOperator& apply,
                                                  const ComplexOperator& apply_adjoint, double rank_tolerance,
                                                  std::uint64_t seed = 0x5eed);

/// True when some singular value lies within a factor 10 of the rank
/// threshold, i.e. the signal/kernel split is not clear-cut.
bool ambiguous_rank_split(const Eigen::VectorXd& singular_values, double rank_tolerance);

/// Number of singular values above rank_tolerance * largest.
Eigen::Index numerical_rank(const Eigen::VectorXd& singular_values, double rank_tolerance);

void require_rank_tolerance(double rank_tolerance);

}  // namespace prony
